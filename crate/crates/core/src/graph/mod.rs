//! Undirected two-group graphs.
//!
//! Graphs are stored in compressed adjacency form with dense node ids
//! `0..N`. They are immutable once built and always satisfy:
//! symmetric adjacency, no self-loops or multi-edges, a single connected
//! component.

mod generator;
mod preprocess;
mod truth;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generator::{generate_homophilous_graph, HomophilyBa};
pub use preprocess::{load_and_preprocess, load_graph_files, read_edge_list, read_labels, write_edge_list, write_labels, LabelMap};
pub use truth::{ground_truth, top_quantile_count, GroundTruth};

/// Group membership. `B` is the minority by convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
}

impl Group {
    pub const ALL: [Group; 2] = [Group::A, Group::B];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Group::A => 0,
            Group::B => 1,
        }
    }

    #[inline]
    pub fn from_index(i: usize) -> Group {
        if i == 0 {
            Group::A
        } else {
            Group::B
        }
    }

    #[inline]
    pub fn other(self) -> Group {
        match self {
            Group::A => Group::B,
            Group::B => Group::A,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::A => "A",
            Group::B => "B",
        })
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Group::A),
            "B" | "b" => Ok(Group::B),
            other => Err(Error::InvalidParameter(format!("unknown group {other:?}"))),
        }
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    labels: Vec<Group>,
    edges: Vec<(NodeId, NodeId)>,
    original_ids: Vec<u64>,
}

impl Graph {
    /// Builds a graph from labels and an undirected edge list.
    ///
    /// Every invariant is checked; an edge given in both orientations counts
    /// as a duplicate.
    pub fn new(labels: Vec<Group>, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Graph> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut normalized: Vec<(NodeId, NodeId)> = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) references a node >= {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge {:?}", w[0])));
        }

        let mut degree = vec![0usize; n];
        for &(u, v) in &normalized {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0; offsets[n]];
        for &(u, v) in &normalized {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }

        let graph = Graph {
            offsets,
            neighbors,
            labels,
            edges: normalized,
            original_ids: (0..n as u64).collect(),
        };
        if !graph.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(graph)
    }

    /// Attaches external ids (one per node, in node order) for reporting.
    pub fn with_original_ids(mut self, ids: Vec<u64>) -> Result<Graph> {
        if ids.len() != self.node_count() {
            return Err(Error::InvalidParameter(format!(
                "{} original ids for {} nodes",
                ids.len(),
                self.node_count()
            )));
        }
        self.original_ids = ids;
        Ok(self)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all degrees, `2 |E|`.
    #[inline]
    pub fn total_degree(&self) -> usize {
        self.neighbors.len()
    }

    pub fn mean_degree(&self) -> f64 {
        self.total_degree() as f64 / self.node_count() as f64
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn label(&self, node: NodeId) -> Group {
        self.labels[node]
    }

    pub fn labels(&self) -> &[Group] {
        &self.labels
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn original_id(&self, node: NodeId) -> u64 {
        self.original_ids[node]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Maps a position in `0..total_degree()` to the node owning that
    /// adjacency slot. Uniform positions give degree-proportional nodes.
    #[inline]
    pub fn node_at_slot(&self, slot: usize) -> NodeId {
        self.offsets.partition_point(|&o| o <= slot) - 1
    }

    /// Neighbor stored at adjacency slot `slot`.
    #[inline]
    pub fn neighbor_at_slot(&self, slot: usize) -> NodeId {
        self.neighbors[slot]
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == n
    }

    pub fn group_count(&self, group: Group) -> usize {
        self.labels.iter().filter(|&&g| g == group).count()
    }
}
