use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, Group, NodeId};
use crate::error::{Error, Result};
use crate::rng;

/// Preferential attachment with group-dependent mixing weights.
///
/// Each arriving node joins group `B` with probability `minority_fraction`
/// and links to `links_per_node` distinct existing nodes. Target `u` is drawn
/// with probability proportional to `degree(u) * h(v, u)`, where `h` is
/// `ingroup_preference` for same-group pairs and `1 - ingroup_preference`
/// otherwise. Growth starts from a clique of `links_per_node` nodes with
/// alternating groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomophilyBa {
    pub nodes: usize,
    pub links_per_node: usize,
    pub minority_fraction: f64,
    pub ingroup_preference: f64,
}

impl HomophilyBa {
    pub fn validate(&self) -> Result<()> {
        if self.links_per_node == 0 {
            return Err(Error::InvalidParameter("links_per_node must be at least 1".into()));
        }
        if self.nodes <= self.links_per_node {
            return Err(Error::InvalidParameter(format!(
                "nodes ({}) must exceed links_per_node ({})",
                self.nodes, self.links_per_node
            )));
        }
        for (name, v) in [
            ("minority_fraction", self.minority_fraction),
            ("ingroup_preference", self.ingroup_preference),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn mixing(&self, from: Group, to: Group) -> f64 {
        if from == to {
            self.ingroup_preference
        } else {
            1.0 - self.ingroup_preference
        }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        self.validate()?;
        let n = self.nodes;
        let m = self.links_per_node;

        let mut labels = Vec::with_capacity(n);
        let mut edges = Vec::with_capacity(n * m);
        // one entry per edge endpoint, split by group: uniform picks are degree-proportional
        let mut endpoints: [Vec<NodeId>; 2] = [Vec::new(), Vec::new()];
        // nodes with positive degree per group
        let mut attached = [0usize; 2];
        let mut degree = vec![0usize; n];

        for v in 0..m {
            labels.push(if v % 2 == 0 { Group::A } else { Group::B });
        }
        for u in 0..m {
            for v in u + 1..m {
                edges.push((u, v));
                endpoints[labels[u].index()].push(u);
                endpoints[labels[v].index()].push(v);
                degree[u] += 1;
                degree[v] += 1;
            }
        }
        for v in 0..m {
            if degree[v] > 0 {
                attached[labels[v].index()] += 1;
            }
        }

        let mut targets: Vec<NodeId> = Vec::with_capacity(m);
        for v in m..n {
            let group = if rng.gen::<f64>() < self.minority_fraction { Group::B } else { Group::A };
            labels.push(group);
            targets.clear();

            let weight = Group::ALL.map(|g| self.mixing(group, g) * endpoints[g.index()].len() as f64);
            let total = weight[0] + weight[1];
            while targets.len() < m {
                // unchosen nodes that still carry positive attachment weight
                let open: usize = Group::ALL
                    .iter()
                    .filter(|g| weight[g.index()] > 0.0)
                    .map(|g| attached[g.index()])
                    .sum::<usize>()
                    - targets
                        .iter()
                        .filter(|&&t| degree[t] > 0 && weight[labels[t].index()] > 0.0)
                        .count();
                let pick = if open == 0 {
                    rng.gen_range(0..v)
                } else {
                    let g = if rng.gen::<f64>() * total < weight[0] { 0 } else { 1 };
                    let pool = &endpoints[g];
                    pool[rng.gen_range(0..pool.len())]
                };
                if !targets.contains(&pick) {
                    targets.push(pick);
                }
            }

            for &t in &targets {
                if degree[t] == 0 {
                    attached[labels[t].index()] += 1;
                }
                degree[t] += 1;
                endpoints[labels[t].index()].push(t);
                edges.push((t, v));
            }
            degree[v] = m;
            attached[group.index()] += 1;
            endpoints[group.index()].extend(std::iter::repeat_n(v, m));
        }

        Graph::new(labels, edges)
    }
}

/// Seeded convenience wrapper around [`HomophilyBa::generate`].
pub fn generate_homophilous_graph(
    nodes: usize,
    links_per_node: usize,
    minority_fraction: f64,
    ingroup_preference: f64,
    seed: u64,
) -> Result<Graph> {
    HomophilyBa {
        nodes,
        links_per_node,
        minority_fraction,
        ingroup_preference,
    }
    .generate(&mut rng::seeded(seed))
}
