use rand::seq::index;
use rand::Rng;

use super::{record, NodeRecord, Sample};
use crate::error::{Error, Result};
use crate::graph::{Graph, Group, NodeId};

const UNSEEN: usize = usize::MAX;

/// Uniform node sample without replacement, plus the edges it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSample {
    pub nodes: Vec<NodeRecord>,
    /// Induced edges as record-index pairs.
    pub induced: Vec<(usize, usize)>,
}

impl Sample for NodeSample {
    fn records(&self) -> &[NodeRecord] {
        &self.nodes
    }

    fn records_mut(&mut self) -> &mut [NodeRecord] {
        &mut self.nodes
    }

    fn edge_pairs(&self) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
        Box::new(self.induced.iter().copied())
    }
}

/// Uniform edge sample without replacement. Records hold both endpoints of
/// every sampled edge: positions `2k` and `2k + 1` belong to edge `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSample {
    pub endpoints: Vec<NodeRecord>,
}

impl EdgeSample {
    pub fn edge_count(&self) -> usize {
        self.endpoints.len() / 2
    }
}

impl Sample for EdgeSample {
    fn records(&self) -> &[NodeRecord] {
        &self.endpoints
    }

    fn records_mut(&mut self) -> &mut [NodeRecord] {
        &mut self.endpoints
    }

    fn edge_pairs(&self) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
        Box::new((0..self.edge_count()).map(|k| (2 * k, 2 * k + 1)))
    }
}

/// Breadth-first crawl from random seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct SnowballSample {
    pub nodes: Vec<NodeRecord>,
    /// Wave index of each record; seeds are wave 0.
    pub waves: Vec<usize>,
    /// Edges seen while expanding a wave whose far end was kept, as
    /// record-index pairs.
    pub traversed: Vec<(usize, usize)>,
}

impl Sample for SnowballSample {
    fn records(&self) -> &[NodeRecord] {
        &self.nodes
    }

    fn records_mut(&mut self) -> &mut [NodeRecord] {
        &mut self.nodes
    }

    fn edge_pairs(&self) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
        Box::new(self.traversed.iter().copied())
    }
}

fn check_size(requested: usize, available: usize, what: &str) -> Result<()> {
    if requested == 0 {
        return Err(Error::InvalidParameter(format!("{what} sample size must be at least 1")));
    }
    if requested > available {
        return Err(Error::InvalidParameter(format!(
            "{what} sample size {requested} exceeds population {available}"
        )));
    }
    Ok(())
}

fn rec(graph: &Graph, node: NodeId, noisy: Option<&[Group]>) -> NodeRecord {
    record(graph.degree(node), node, graph.label(node), noisy)
}

pub fn node_sample<R: Rng + ?Sized>(graph: &Graph, n: usize, noisy: Option<&[Group]>, rng: &mut R) -> Result<NodeSample> {
    check_size(n, graph.node_count(), "node")?;
    let chosen = index::sample(rng, graph.node_count(), n).into_vec();
    let mut position = vec![UNSEEN; graph.node_count()];
    for (i, &u) in chosen.iter().enumerate() {
        position[u] = i;
    }
    let mut induced = Vec::new();
    for (i, &u) in chosen.iter().enumerate() {
        for &v in graph.neighbors(u) {
            if v > u && position[v] != UNSEEN {
                induced.push((i, position[v]));
            }
        }
    }
    Ok(NodeSample {
        nodes: chosen.iter().map(|&u| rec(graph, u, noisy)).collect(),
        induced,
    })
}

pub fn edge_sample<R: Rng + ?Sized>(
    graph: &Graph,
    n_edges: usize,
    noisy: Option<&[Group]>,
    rng: &mut R,
) -> Result<EdgeSample> {
    check_size(n_edges, graph.edge_count(), "edge")?;
    let endpoints = index::sample(rng, graph.edge_count(), n_edges)
        .into_iter()
        .flat_map(|k| {
            let (u, v) = graph.edges()[k];
            [rec(graph, u, noisy), rec(graph, v, noisy)]
        })
        .collect();
    Ok(EdgeSample { endpoints })
}

/// Snowball crawl of exactly `n_target` nodes.
///
/// Whole waves are added while they fit; the first wave that would overshoot
/// is subsampled uniformly to fill the remaining slots.
pub fn snowball_sample<R: Rng + ?Sized>(
    graph: &Graph,
    n_target: usize,
    n_seeds: usize,
    noisy: Option<&[Group]>,
    rng: &mut R,
) -> Result<SnowballSample> {
    check_size(n_target, graph.node_count(), "snowball")?;
    if n_seeds == 0 {
        return Err(Error::InvalidParameter("snowball needs at least one seed".into()));
    }
    let n = graph.node_count();
    let mut discovered = vec![false; n];
    let mut position = vec![UNSEEN; n];
    let mut order: Vec<NodeId> = Vec::with_capacity(n_target);
    let mut waves = Vec::with_capacity(n_target);
    let mut expanded: Vec<NodeId> = Vec::new();

    let mut wave: Vec<NodeId> = index::sample(rng, n, n_seeds.min(n_target)).into_vec();
    let mut depth = 0;
    loop {
        for &u in &wave {
            discovered[u] = true;
            position[u] = order.len();
            order.push(u);
            waves.push(depth);
        }
        if order.len() == n_target {
            break;
        }
        let mut next = Vec::new();
        for &u in &wave {
            for &v in graph.neighbors(u) {
                if !discovered[v] {
                    discovered[v] = true;
                    next.push(v);
                }
            }
        }
        expanded.extend_from_slice(&wave);
        if next.is_empty() {
            return Err(Error::InvalidGraph("crawl exhausted before reaching the target".into()));
        }
        let room = n_target - order.len();
        if next.len() > room {
            let mut keep = index::sample(rng, next.len(), room).into_vec();
            keep.sort_unstable();
            next = keep.into_iter().map(|i| next[i]).collect();
        }
        wave = next;
        depth += 1;
    }

    // expanded nodes occupy a prefix of the inclusion order
    let n_expanded = expanded.len();
    let mut traversed = Vec::new();
    for &u in &expanded {
        for &v in graph.neighbors(u) {
            let (pu, pv) = (position[u], position[v]);
            // an edge between two expanded nodes is seen from both ends
            if pv != UNSEEN && (pv >= n_expanded || pu < pv) {
                traversed.push((pu, pv));
            }
        }
    }
    traversed.sort_unstable();

    Ok(SnowballSample {
        nodes: order.iter().map(|&u| rec(graph, u, noisy)).collect(),
        waves,
        traversed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng;
    use std::collections::HashSet;

    #[test]
    fn full_node_sample_covers_graph() {
        let g = crate::graph::generate_homophilous_graph(100, 2, 0.3, 0.7, 1).unwrap();
        let s = node_sample(&g, 100, None, &mut rng::seeded(1)).unwrap();
        let seen: HashSet<_> = s.nodes.iter().map(|r| r.node).collect();
        assert_eq!(seen.len(), 100);
        assert_eq!(s.induced.len(), g.edge_count());
    }

    #[test]
    fn node_sample_size_checks() {
        let g = triangle();
        assert!(node_sample(&g, 4, None, &mut rng::seeded(1)).is_err());
        assert!(node_sample(&g, 0, None, &mut rng::seeded(1)).is_err());
        assert!(edge_sample(&g, 4, None, &mut rng::seeded(1)).is_err());
        assert!(snowball_sample(&g, 4, 1, None, &mut rng::seeded(1)).is_err());
        assert!(snowball_sample(&g, 2, 0, None, &mut rng::seeded(1)).is_err());
    }

    #[test]
    fn single_node_draws_are_uniform() {
        // chi-square over 10 nodes, 1e4 draws, 9 dof: 21.67 is the 0.01 critical value
        let labels = vec![Group::A; 10];
        let g = Graph::new(labels, (1..10).map(|i| (i - 1, i))).unwrap();
        let mut rng = rng::seeded(5);
        let mut counts = [0f64; 10];
        for _ in 0..10_000 {
            counts[node_sample(&g, 1, None, &mut rng).unwrap().nodes[0].node] += 1.0;
        }
        let chi2: f64 = counts.iter().map(|c| (c - 1000.0).powi(2) / 1000.0).sum();
        assert!(chi2 < 21.67, "chi2 = {chi2}");
    }

    #[test]
    fn full_edge_sample_covers_all_edges() {
        let g = complete_bipartite(2, 3);
        let s = edge_sample(&g, 6, None, &mut rng::seeded(2)).unwrap();
        let mut seen: Vec<_> = s
            .edge_pairs()
            .map(|(i, j)| (s.endpoints[i].node, s.endpoints[j].node))
            .collect();
        seen.sort_unstable();
        assert_eq!(seen, g.edges());
    }

    #[test]
    fn edge_endpoints_are_degree_biased() {
        // hub in B: half of all endpoints are the hub, although p_b = 1/5
        let g = star(4, Group::B, Group::A);
        let s = edge_sample(&g, 4, None, &mut rng::seeded(3)).unwrap();
        let p = super::super::sample_proportions(&s.endpoints, super::super::LabelField::True).unwrap();
        assert_eq!(p.b, 0.5);
    }

    #[test]
    fn snowball_on_path_takes_whole_waves() {
        let g = path(&[Group::A; 5]);
        // find a seed draw that lands on the middle node
        let mut rng = rng::seeded(0);
        let s = loop {
            let s = snowball_sample(&g, 3, 1, None, &mut rng).unwrap();
            if s.nodes[0].node == 2 {
                break s;
            }
        };
        let nodes: HashSet<_> = s.nodes.iter().map(|r| r.node).collect();
        assert_eq!(nodes, HashSet::from([1, 2, 3]));
        assert_eq!(s.waves, vec![0, 1, 1]);
        assert_eq!(s.traversed.len(), 2);
    }

    #[test]
    fn snowball_waves_are_contiguous() {
        let g = crate::graph::generate_homophilous_graph(500, 3, 0.2, 0.8, 4).unwrap();
        let s = snowball_sample(&g, 137, 10, None, &mut rng::seeded(4)).unwrap();
        assert_eq!(s.nodes.len(), 137);
        assert!(s.waves.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
        let unique: HashSet<_> = s.nodes.iter().map(|r| r.node).collect();
        assert_eq!(unique.len(), 137);
        for (r, &w) in s.nodes.iter().zip(&s.waves) {
            if w > 0 {
                let has_parent = s
                    .nodes
                    .iter()
                    .zip(&s.waves)
                    .any(|(p, &pw)| pw + 1 == w && g.has_edge(p.node, r.node));
                assert!(has_parent);
            }
        }
        let mut seen = HashSet::new();
        for &(i, j) in &s.traversed {
            assert!(g.has_edge(s.nodes[i].node, s.nodes[j].node));
            assert!(seen.insert((i.min(j), i.max(j))), "duplicate traversed edge");
        }
    }

    #[test]
    fn full_snowball_covers_graph() {
        let g = crate::graph::generate_homophilous_graph(80, 2, 0.3, 0.7, 6).unwrap();
        let s = snowball_sample(&g, 80, 3, None, &mut rng::seeded(6)).unwrap();
        assert_eq!(s.nodes.len(), 80);
    }
}
