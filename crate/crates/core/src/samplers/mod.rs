//! Graph sampling strategies and the estimators built on their output.
//!
//! Every sampler returns node records carrying the true label and, when noisy
//! labels are supplied, the classifier's label. Observed edges are kept as
//! pairs of positions into the record list so label lookups never need the
//! source graph.

mod baseline;
mod records;
mod walk;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{top_quantile_count, Group, NodeId};
use crate::quantify::{EdgeVector, PropVector};

pub use baseline::{edge_sample, node_sample, snowball_sample, EdgeSample, NodeSample, SnowballSample};
pub use records::{read_records, write_records};
pub use walk::{
    estimate_visibility, importance_resample, rwrw_estimate, rwrw_proportions, rwrw_walk, ResampledSet, SeedMode,
    WalkSample,
};

/// One observation of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeRecord {
    pub node: NodeId,
    pub degree: usize,
    pub true_label: Group,
    pub noisy_label: Option<Group>,
}

impl NodeRecord {
    pub fn label(&self, field: LabelField) -> Result<Group> {
        match field {
            LabelField::True => Ok(self.true_label),
            LabelField::Noisy => self.noisy_label.ok_or(Error::MissingNoisyLabels),
        }
    }
}

/// Which label an estimator reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelField {
    True,
    Noisy,
}

/// Common view over sampler outputs.
pub trait Sample {
    fn records(&self) -> &[NodeRecord];

    fn records_mut(&mut self) -> &mut [NodeRecord];

    /// Observed edges as pairs of indices into [`Sample::records`].
    fn edge_pairs(&self) -> Box<dyn Iterator<Item = (usize, usize)> + '_>;

    /// Replaces every record's noisy label with `noisy[node]`.
    fn relabel(&mut self, noisy: &[Group]) {
        for r in self.records_mut() {
            r.noisy_label = Some(noisy[r.node]);
        }
    }
}

pub(crate) fn record(degree: usize, node: NodeId, truth: Group, noisy: Option<&[Group]>) -> NodeRecord {
    NodeRecord {
        node,
        degree,
        true_label: truth,
        noisy_label: noisy.map(|labels| labels[node]),
    }
}

/// Normalized `(t_aa, t_ab, t_bb)` over the sample's observed edges.
pub fn estimate_edge_vector<S: Sample + ?Sized>(sample: &S, field: LabelField) -> Result<EdgeVector> {
    let records = sample.records();
    let mut counts = [0usize; 3];
    for (i, j) in sample.edge_pairs() {
        let k = records[i].label(field)?.index() + records[j].label(field)?.index();
        counts[k] += 1;
    }
    let total = counts.iter().sum::<usize>();
    if total == 0 {
        return Err(Error::NoEdges);
    }
    let t = total as f64;
    Ok(EdgeVector::new(counts[0] as f64 / t, counts[1] as f64 / t, counts[2] as f64 / t))
}

/// Unweighted group shares over records.
pub fn sample_proportions(records: &[NodeRecord], field: LabelField) -> Result<PropVector> {
    if records.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut b = 0usize;
    for r in records {
        if r.label(field)? == Group::B {
            b += 1;
        }
    }
    let n = records.len();
    Ok(PropVector::new((n - b) as f64 / n as f64, b as f64 / n as f64))
}

/// Group shares among the top `q` fraction of records by degree.
///
/// Records are ranked by degree, highest first, with ties broken by
/// ascending node id; duplicates are ranked like any other record.
pub fn top_quantile_shares(records: &[NodeRecord], q: f64, field: LabelField) -> Result<PropVector> {
    if records.is_empty() {
        return Err(Error::EmptySample);
    }
    let k = top_quantile_count(records.len(), q)?;
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_unstable_by_key(|&i| (std::cmp::Reverse(records[i].degree), records[i].node));
    let top: Vec<NodeRecord> = order[..k].iter().map(|&i| records[i]).collect();
    sample_proportions(&top, field)
}
