use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{Graph, Group, NodeId};
use crate::error::{Error, Result};

/// Node id to group, `None` for a missing value.
pub type LabelMap = HashMap<u64, Option<Group>>;

/// Turns raw edge and label records into a valid [`Graph`].
///
/// Steps, in order: drop self-loops; keep only reciprocated pairs when the
/// input is directed; collapse duplicates; drop nodes without a label
/// (absent from `labels` or `NA`); keep the largest connected component.
/// Surviving nodes are renumbered densely in ascending original-id order.
/// Ties between equally large components go to the one holding the smallest
/// original id.
pub fn load_and_preprocess(edges: &[(u64, u64)], labels: &LabelMap, directed: bool) -> Result<Graph> {
    if edges.is_empty() {
        return Err(Error::InvalidParameter("edge list is empty".into()));
    }

    let arcs: HashSet<(u64, u64)> = edges.iter().copied().filter(|(u, v)| u != v).collect();
    let mut undirected: Vec<(u64, u64)> = arcs
        .iter()
        .filter(|&&(u, v)| !directed || arcs.contains(&(v, u)))
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .filter(|(u, v)| labeled(labels, *u) && labeled(labels, *v))
        .collect();
    undirected.sort_unstable();
    undirected.dedup();

    // dense ids in ascending original order
    let mut index: BTreeMap<u64, NodeId> = BTreeMap::new();
    for &(u, v) in &undirected {
        index.insert(u, 0);
        index.insert(v, 0);
    }
    if index.is_empty() {
        return Err(Error::EmptyGraph);
    }
    for (dense, slot) in index.values_mut().enumerate() {
        *slot = dense;
    }
    let ids: Vec<u64> = index.keys().copied().collect();
    let n = ids.len();
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in &undirected {
        let (a, b) = (index[&u], index[&v]);
        adjacency[a].push(b);
        adjacency[b].push(a);
    }

    let component = largest_component(&adjacency);
    let mut remap = vec![usize::MAX; n];
    let mut kept_ids = Vec::with_capacity(component.len());
    let mut kept_labels = Vec::with_capacity(component.len());
    for (new, &old) in component.iter().enumerate() {
        remap[old] = new;
        kept_ids.push(ids[old]);
        kept_labels.push(labels[&ids[old]].expect("unlabeled nodes were filtered"));
    }
    let kept_edges = undirected.iter().filter_map(|(u, v)| {
        let (a, b) = (remap[index[u]], remap[index[v]]);
        (a != usize::MAX && b != usize::MAX).then_some((a, b))
    });
    Graph::new(kept_labels, kept_edges)?.with_original_ids(kept_ids)
}

fn labeled(labels: &LabelMap, node: u64) -> bool {
    matches!(labels.get(&node), Some(Some(_)))
}

/// Nodes of the largest component, sorted ascending.
fn largest_component(adjacency: &[Vec<NodeId>]) -> Vec<NodeId> {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut best: Vec<NodeId> = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    best.sort_unstable();
    best
}

/// Reads whitespace-separated integer pairs, skipping blank and `#` lines.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Vec<(u64, u64)>> {
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = || -> Result<u64> {
            let field = fields.next().ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected two node ids".into(),
            })?;
            field.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid node id {field:?}"),
            })
        };
        let (u, v) = (next()?, next()?);
        edges.push((u, v));
    }
    Ok(edges)
}

/// Reads `node_id<TAB>group` records where group is `A`, `B` or `NA`.
pub fn read_labels<R: BufRead>(reader: R) -> Result<LabelMap> {
    let mut labels = LabelMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: i + 1, message };
        let mut fields = line.split_whitespace();
        let (Some(id), Some(group), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err("expected `node_id<TAB>group`".into()));
        };
        let id: u64 = id.parse().map_err(|_| parse_err(format!("invalid node id {id:?}")))?;
        let group = match group {
            "NA" => None,
            g => Some(g.parse::<Group>().map_err(|_| parse_err(format!("invalid group {g:?}")))?),
        };
        labels.insert(id, group);
    }
    Ok(labels)
}

/// Reads an edge list and a label file from disk and preprocesses them.
pub fn load_graph_files(edges: &Path, labels: &Path, directed: bool) -> Result<Graph> {
    let e = read_edge_list(BufReader::new(File::open(edges)?))?;
    let l = read_labels(BufReader::new(File::open(labels)?))?;
    load_and_preprocess(&e, &l, directed)
}

/// Writes the graph's edges with original ids, one `u v` pair per line.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# nodes: {} edges: {}", graph.node_count(), graph.edge_count())?;
    for &(u, v) in graph.edges() {
        writeln!(out, "{}\t{}", graph.original_id(u), graph.original_id(v))?;
    }
    Ok(())
}

pub fn write_labels<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    for node in 0..graph.node_count() {
        writeln!(out, "{}\t{}", graph.original_id(node), graph.label(node))?;
    }
    Ok(())
}
