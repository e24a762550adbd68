use serde::Serialize;

use super::{Graph, Group};
use crate::error::{Error, Result};
use crate::quantify::{coleman_homophily, ingroup_share, EdgeVector, PropVector};

/// Exact population values of the four measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub proportions: PropVector,
    pub edges: EdgeVector,
    /// Group shares among the top-quantile nodes by degree.
    pub visibility: PropVector,
    /// Coleman index per group, `None` where undefined.
    pub homophily: [Option<f64>; 2],
    pub top_quantile: f64,
}

impl GroundTruth {
    pub fn ingroup_share(&self, group: Group) -> Option<f64> {
        ingroup_share(&self.edges, group).ok()
    }

    pub fn homophily(&self, group: Group) -> Option<f64> {
        self.homophily[group.index()]
    }
}

/// Size of the top set for quantile `q` of `n` items: `round(q n)`.
pub fn top_quantile_count(n: usize, q: f64) -> Result<usize> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter(format!("top quantile {q} is outside (0, 1]")));
    }
    let scaled = q * n as f64;
    if scaled < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "top quantile {q} of {n} items selects nothing"
        )));
    }
    Ok(scaled.round() as usize)
}

/// Computes every measure by full enumeration of nodes and edges.
pub fn ground_truth(graph: &Graph, top_quantile: f64) -> Result<GroundTruth> {
    let n = graph.node_count();
    let n_b = graph.group_count(Group::B);
    let proportions = PropVector::new((n - n_b) as f64 / n as f64, n_b as f64 / n as f64);

    let mut counts = [0usize; 3];
    for &(u, v) in graph.edges() {
        counts[graph.label(u).index() + graph.label(v).index()] += 1;
    }
    let edges = if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    } else {
        let e = graph.edge_count() as f64;
        EdgeVector::new(counts[0] as f64 / e, counts[1] as f64 / e, counts[2] as f64 / e)
    };

    let k = top_quantile_count(n, top_quantile)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&i| (std::cmp::Reverse(graph.degree(i)), i));
    let top_b = order[..k].iter().filter(|&&i| graph.label(i) == Group::B).count();
    let visibility = PropVector::new((k - top_b) as f64 / k as f64, top_b as f64 / k as f64);

    let homophily = Group::ALL.map(|g| {
        let share = ingroup_share(&edges, g).ok()?;
        coleman_homophily(share, proportions.get(g)).ok().map(|h| h.value)
    });

    Ok(GroundTruth {
        proportions,
        edges,
        visibility,
        homophily,
        top_quantile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bipartite_by_group_is_perfectly_heterophilous() {
        let t = ground_truth(&complete_bipartite(2, 3), 0.2).unwrap();
        assert_eq!(t.edges, EdgeVector::new(0.0, 1.0, 0.0));
        assert_eq!(t.homophily, [Some(-1.0), Some(-1.0)]);
        assert_eq!(t.proportions, PropVector::new(0.4, 0.6));
    }

    #[test]
    fn two_bridged_cliques() {
        // 5-cliques in A (0..5) and B (5..10) plus the bridge 4-5
        let mut labels = vec![Group::A; 5];
        labels.extend([Group::B; 5]);
        let mut edges = vec![(4, 5)];
        for base in [0, 5] {
            for u in 0..5 {
                for v in u + 1..5 {
                    edges.push((base + u, base + v));
                }
            }
        }
        let t = ground_truth(&Graph::new(labels, edges).unwrap(), 0.2).unwrap();
        // 10 + 10 within-group edges, 1 bridge
        assert_abs_diff_eq!(t.edges.ab, 1.0 / 21.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.edges.aa, 10.0 / 21.0, epsilon = 1e-15);
        // s_a = 20/21, p_a = 1/2 -> H = (20/21 - 1/2) / (1/2) = 19/21
        assert_abs_diff_eq!(t.homophily(Group::A).unwrap(), 19.0 / 21.0, epsilon = 1e-12);
        // top 2 by degree: nodes 4 and 5 (degree 5)
        assert_eq!(t.visibility, PropVector::new(0.5, 0.5));
    }

    #[test]
    fn single_group_leaves_minority_homophily_undefined() {
        let t = ground_truth(&path(&[Group::A; 4]), 0.5).unwrap();
        assert_eq!(t.proportions, PropVector::new(1.0, 0.0));
        assert_eq!(t.homophily, [None, None]);
    }

    #[test]
    fn degree_ties_break_by_node_id() {
        // path 0-1-2-3-4: degrees 1,2,2,2,1 ; top 2 -> nodes 1 and 2
        let g = path(&[Group::A, Group::A, Group::B, Group::B, Group::A]);
        let t = ground_truth(&g, 0.4).unwrap();
        assert_eq!(t.visibility.b, 0.5);
    }

    #[test]
    fn quantile_count_bounds() {
        assert_eq!(top_quantile_count(10, 0.2).unwrap(), 2);
        assert_eq!(top_quantile_count(7, 0.2).unwrap(), 1);
        assert!(top_quantile_count(4, 0.2).is_err());
        assert!(top_quantile_count(10, 0.0).is_err());
        assert!(top_quantile_count(10, 1.5).is_err());
    }

    #[test]
    fn vectors_sum_to_one() {
        let g = crate::graph::generate_homophilous_graph(2_000, 3, 0.3, 0.8, 8).unwrap();
        let t = ground_truth(&g, 0.2).unwrap();
        assert!((t.proportions.sum() - 1.0).abs() <= 1e-12);
        assert!((t.edges.sum() - 1.0).abs() <= 1e-12);
        assert!((t.visibility.sum() - 1.0).abs() <= 1e-12);
    }
}
