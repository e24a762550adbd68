use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{record, top_quantile_shares, LabelField, NodeRecord, Sample};
use crate::error::{Error, Result};
use crate::graph::{top_quantile_count, Graph, Group, NodeId};
use crate::quantify::PropVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedMode {
    /// Start from the stationary distribution, `P(i) = d_i / D`.
    DegreeProportional,
    /// Start from a uniformly chosen node; pair with a burn-in.
    UniformWithBurnin,
}

/// A single random-walk chain. Revisits appear as repeated records.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSample {
    pub steps: Vec<NodeRecord>,
    pub seed_mode: SeedMode,
    pub burn_in: usize,
}

impl WalkSample {
    /// Consecutive node pairs traversed by the recorded part of the walk.
    pub fn walk_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.steps.windows(2).map(|w| (w[0].node, w[1].node))
    }
}

impl Sample for WalkSample {
    fn records(&self) -> &[NodeRecord] {
        &self.steps
    }

    fn records_mut(&mut self) -> &mut [NodeRecord] {
        &mut self.steps
    }

    fn edge_pairs(&self) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
        Box::new((1..self.steps.len()).map(|i| (i - 1, i)))
    }
}

/// Simple random walk recording `n_steps` nodes after `burn_in` discarded
/// transitions.
pub fn rwrw_walk<R: Rng + ?Sized>(
    graph: &Graph,
    n_steps: usize,
    seed_mode: SeedMode,
    burn_in: usize,
    noisy: Option<&[Group]>,
    rng: &mut R,
) -> Result<WalkSample> {
    if n_steps == 0 {
        return Err(Error::InvalidParameter("walk length must be at least 1".into()));
    }
    if graph.total_degree() == 0 {
        return Err(Error::InvalidGraph("cannot walk a graph without edges".into()));
    }
    let mut current = match seed_mode {
        SeedMode::DegreeProportional => graph.node_at_slot(rng.gen_range(0..graph.total_degree())),
        SeedMode::UniformWithBurnin => rng.gen_range(0..graph.node_count()),
    };
    let step = |from: NodeId, rng: &mut R| {
        let nbrs = graph.neighbors(from);
        nbrs[rng.gen_range(0..nbrs.len())]
    };
    for _ in 0..burn_in {
        current = step(current, rng);
    }
    let mut steps = Vec::with_capacity(n_steps);
    for i in 0..n_steps {
        if i > 0 {
            current = step(current, rng);
        }
        steps.push(record(graph.degree(current), current, graph.label(current), noisy));
    }
    Ok(WalkSample {
        steps,
        seed_mode,
        burn_in,
    })
}

/// Re-weighted walk mean `Σ g(X_j)/d_j / Σ 1/d_j`.
pub fn rwrw_estimate<F>(sample: &WalkSample, g: F) -> Result<f64>
where
    F: Fn(&NodeRecord) -> f64,
{
    if sample.steps.is_empty() {
        return Err(Error::EmptySample);
    }
    let (num, den) = sample.steps.iter().fold((0.0, 0.0), |(num, den), r| {
        let w = 1.0 / r.degree as f64;
        (num + g(r) * w, den + w)
    });
    Ok(num / den)
}

/// Group proportions from a walk via [`rwrw_estimate`].
pub fn rwrw_proportions(sample: &WalkSample, field: LabelField) -> Result<PropVector> {
    if field == LabelField::Noisy && sample.steps.iter().any(|r| r.noisy_label.is_none()) {
        return Err(Error::MissingNoisyLabels);
    }
    let b = rwrw_estimate(sample, |r| {
        if matches!(r.label(field), Ok(Group::B)) {
            1.0
        } else {
            0.0
        }
    })?;
    Ok(PropVector::from_minority(b))
}

/// Records drawn with replacement, weighted towards uniform-node sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledSet {
    pub records: Vec<NodeRecord>,
    /// Normalized weight of each walk step, proportional to `1 / d`.
    pub weights: Vec<f64>,
}

/// Importance resample of a walk with weights proportional to `1 / d_j`.
pub fn importance_resample<R: Rng + ?Sized>(sample: &WalkSample, out_size: usize, rng: &mut R) -> Result<ResampledSet> {
    if sample.steps.is_empty() {
        return Err(Error::EmptySample);
    }
    if out_size == 0 {
        return Err(Error::InvalidParameter("resample size must be at least 1".into()));
    }
    let raw: Vec<f64> = sample.steps.iter().map(|r| 1.0 / r.degree as f64).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let index = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let records = (0..out_size).map(|_| sample.steps[index.sample(rng)]).collect();
    Ok(ResampledSet { records, weights })
}

/// Top-quantile group shares from an importance resample of the walk.
pub fn estimate_visibility<R: Rng + ?Sized>(
    sample: &WalkSample,
    top_quantile: f64,
    out_size: usize,
    field: LabelField,
    rng: &mut R,
) -> Result<PropVector> {
    top_quantile_count(out_size, top_quantile)?;
    let resampled = importance_resample(sample, out_size, rng)?;
    top_quantile_shares(&resampled.records, top_quantile, field)
}
