//! Replicated simulation grids over sampler × misclassification rate ×
//! sample size.
//!
//! Each replication draws a graph (or reuses a fixed one), one set of noisy
//! labels per rate, and one sample per (sampler, size). Every sample is then
//! scored under all rates and all three variants, so cells within a
//! replication share randomness. Each replication owns RNG streams keyed by
//! its index, so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ground_truth, load_graph_files, Graph, Group, HomophilyBa};
use crate::noise::{apply_noise, empirical_confusion, ConfusionMatrix};
use crate::quantify::{adjust_edge_proportions, adjust_proportions, adjust_visibility, coleman_homophily, ingroup_share};
use crate::rng::{self, StreamRng};
use crate::samplers::{
    edge_sample, estimate_edge_vector, importance_resample, node_sample, rwrw_proportions, rwrw_walk,
    sample_proportions, snowball_sample, top_quantile_shares, EdgeSample, LabelField, NodeRecord, NodeSample, Sample,
    SeedMode, SnowballSample, WalkSample,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Rwrw,
    Node,
    Edge,
    Snowball,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Rwrw => "rwrw",
            SamplerKind::Node => "node",
            SamplerKind::Edge => "edge",
            SamplerKind::Snowball => "snowball",
        }
    }
}

/// Minority-group measures reported per replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Share of nodes in the minority group.
    Proportion,
    /// Share of the minority's edge endpoints that stay in-group.
    EdgeShare,
    /// Minority share among the top-quantile nodes by degree.
    Visibility,
    /// Coleman homophily of the minority group.
    Homophily,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Proportion, Measure::EdgeShare, Measure::Visibility, Measure::Homophily];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Proportion => "proportion",
            Measure::EdgeShare => "edge_share",
            Measure::Visibility => "visibility",
            Measure::Homophily => "homophily",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    NoNoise,
    Uncorrected,
    Corrected,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::NoNoise, Variant::Uncorrected, Variant::Corrected];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NoNoise => "no_noise",
            Variant::Uncorrected => "uncorrected",
            Variant::Corrected => "corrected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    Generate(HomophilyBa),
    Files {
        edges: PathBuf,
        labels: PathBuf,
        #[serde(default)]
        directed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSettings {
    pub seed_mode: SeedMode,
    pub burn_in: usize,
}

impl Default for WalkSettings {
    fn default() -> Self {
        WalkSettings {
            seed_mode: SeedMode::DegreeProportional,
            burn_in: 0,
        }
    }
}

fn default_replications() -> usize {
    500
}
fn default_top_quantile() -> f64 {
    0.2
}
fn default_snowball_seeds() -> usize {
    10
}
fn default_resample_factor() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    /// Reuse one graph for every replication instead of drawing a fresh one.
    #[serde(default)]
    pub fixed_graph: bool,
    pub samplers: Vec<SamplerKind>,
    pub rates: Vec<f64>,
    /// Walk steps, nodes, or edges depending on the sampler.
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_top_quantile")]
    pub top_quantile: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub walk: WalkSettings,
    #[serde(default = "default_snowball_seeds")]
    pub snowball_seeds: usize,
    /// Importance resample size as a multiple of the walk length.
    #[serde(default = "default_resample_factor")]
    pub resample_factor: usize,
    /// When set, correct with a confusion matrix estimated from the first
    /// `k` sampled records instead of the true one.
    #[serde(default)]
    pub labeled_nodes: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.samplers.is_empty() || self.rates.is_empty() || self.sample_sizes.is_empty() {
            return bad("samplers, rates and sample_sizes must be non-empty".into());
        }
        for &r in &self.rates {
            if !(0.0..0.5).contains(&r) {
                return bad(format!("rate {r} is outside [0, 0.5)"));
            }
        }
        if self.sample_sizes.contains(&0) {
            return bad("sample sizes must be positive".into());
        }
        if !(self.top_quantile > 0.0 && self.top_quantile <= 1.0) {
            return bad(format!("top_quantile {} is outside (0, 1]", self.top_quantile));
        }
        if self.resample_factor == 0 || self.snowball_seeds == 0 {
            return bad("resample_factor and snowball_seeds must be positive".into());
        }
        if self.labeled_nodes == Some(0) {
            return bad("labeled_nodes must be positive".into());
        }
        if let GraphSource::Generate(params) = &self.graph {
            params.validate()?;
            if let Some(&n) = self.sample_sizes.iter().find(|&&n| n > params.nodes) {
                return bad(format!("sample size {n} exceeds graph size {}", params.nodes));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flag {
    None,
    OutOfRange,
    Failed(&'static str),
}

impl Flag {
    pub fn label(&self) -> String {
        match self {
            Flag::None => String::new(),
            Flag::OutOfRange => "out_of_range".into(),
            Flag::Failed(code) => format!("failed:{code}"),
        }
    }

    pub fn failed(&self) -> bool {
        matches!(self, Flag::Failed(_))
    }
}

/// One estimate for one (cell, replication, measure, variant).
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sampler: SamplerKind,
    pub rate: f64,
    pub size: usize,
    pub rep: usize,
    pub measure: Measure,
    pub variant: Variant,
    /// `NaN` when the row failed.
    pub estimate: f64,
    pub truth: f64,
    pub flag: Flag,
}

impl Row {
    pub fn error(&self) -> f64 {
        self.estimate - self.truth
    }

    fn sort_key(&self) -> impl Ord {
        (
            self.sampler,
            ordered(self.rate),
            self.size,
            self.rep,
            self.measure,
            self.variant,
        )
    }
}

fn ordered(x: f64) -> i64 {
    // rates live in [0, 0.5); this keeps twelve decimal places of ordering
    (x * 1e12).round() as i64
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
}

impl ExperimentResult {
    /// Rows of one cell, ordered by replication.
    pub fn cell(&self, sampler: SamplerKind, rate: f64, size: usize, measure: Measure, variant: Variant) -> Vec<&Row> {
        self.rows
            .iter()
            .filter(|r| {
                r.sampler == sampler
                    && ordered(r.rate) == ordered(rate)
                    && r.size == size
                    && r.measure == measure
                    && r.variant == variant
            })
            .collect()
    }
}

#[derive(Clone)]
enum AnySample {
    Walk(WalkSample),
    Node(NodeSample),
    Edge(EdgeSample),
    Snowball(SnowballSample),
}

impl AnySample {
    fn as_sample_mut(&mut self) -> &mut dyn Sample {
        match self {
            AnySample::Walk(s) => s,
            AnySample::Node(s) => s,
            AnySample::Edge(s) => s,
            AnySample::Snowball(s) => s,
        }
    }

    fn as_sample(&self) -> &dyn Sample {
        match self {
            AnySample::Walk(s) => s,
            AnySample::Node(s) => s,
            AnySample::Edge(s) => s,
            AnySample::Snowball(s) => s,
        }
    }
}

// stream tags
const GRAPH: u64 = 1;
const NOISE: u64 = 2;
const SAMPLE: u64 = 3;
const RESAMPLE: u64 = 4;

/// Value and out-of-range flag, or the failure code.
type Estimate = std::result::Result<(f64, bool), &'static str>;

/// Estimates of all four measures from one sample under one label field.
fn estimate_measures(
    sample: &AnySample,
    resampled: Option<&[NodeRecord]>,
    field: LabelField,
    correction: Option<&ConfusionMatrix>,
    top_quantile: f64,
) -> [Estimate; 4] {
    let records = sample.as_sample().records();
    let proportions = match sample {
        AnySample::Walk(w) => rwrw_proportions(w, field),
        _ => sample_proportions(records, field),
    }
    .and_then(|m| correction.map_or(Ok(m), |c| adjust_proportions(&m, c)))
    .map_err(|e| e.code());
    let edges = estimate_edge_vector(sample.as_sample(), field)
        .and_then(|t| correction.map_or(Ok(t), |c| adjust_edge_proportions(&t, c)))
        .map_err(|e| e.code());
    let visibility = top_quantile_shares(resampled.unwrap_or(records), top_quantile, field)
        .and_then(|m| correction.map_or(Ok(m), |c| adjust_visibility(&m, c)))
        .map_err(|e| e.code());

    let share = edges.and_then(|s| {
        let v = ingroup_share(&s, Group::B).map_err(|e| e.code())?;
        Ok((v, !s.in_range() || !(0.0..=1.0).contains(&v)))
    });
    let homophily = share.and_then(|(s, _)| {
        let p = proportions?;
        coleman_homophily(s, p.b)
            .map(|h| (h.value, h.out_of_range))
            .map_err(|e| e.code())
    });
    [
        proportions.map(|p| (p.b, !p.in_range())),
        share,
        visibility.map(|v| (v.b, !v.in_range())),
        homophily,
    ]
}

fn draw_sample(
    cfg: &ExperimentConfig,
    graph: &Graph,
    sampler: SamplerKind,
    size: usize,
    rng: &mut StreamRng,
) -> Result<AnySample> {
    Ok(match sampler {
        SamplerKind::Rwrw => AnySample::Walk(rwrw_walk(graph, size, cfg.walk.seed_mode, cfg.walk.burn_in, None, rng)?),
        SamplerKind::Node => AnySample::Node(node_sample(graph, size, None, rng)?),
        SamplerKind::Edge => AnySample::Edge(edge_sample(graph, size, None, rng)?),
        SamplerKind::Snowball => AnySample::Snowball(snowball_sample(graph, size, cfg.snowball_seeds, None, rng)?),
    })
}

fn load_fixed_graph(cfg: &ExperimentConfig) -> Result<Option<Graph>> {
    match &cfg.graph {
        GraphSource::Files {
            edges,
            labels,
            directed,
        } => Ok(Some(load_graph_files(edges, labels, *directed)?)),
        GraphSource::Generate(params) if cfg.fixed_graph => {
            Ok(Some(params.generate(&mut rng::stream(cfg.seed, &[GRAPH, 0]))?))
        }
        GraphSource::Generate(_) => Ok(None),
    }
}

struct CellKey {
    sampler: SamplerKind,
    rate: f64,
    size: usize,
    rep: usize,
}

fn push_rows(rows: &mut Vec<Row>, key: &CellKey, truths: &[Option<f64>; 4], estimates: [[Estimate; 4]; 3]) {
    for (variant, per_measure) in Variant::ALL.into_iter().zip(estimates) {
        for ((measure, estimate), truth) in Measure::ALL.into_iter().zip(per_measure).zip(truths) {
            let (estimate, truth, flag) = match (estimate, *truth) {
                (_, None) => (f64::NAN, f64::NAN, Flag::Failed("undefined_truth")),
                (Err(code), Some(t)) => (f64::NAN, t, Flag::Failed(code)),
                (Ok((v, oor)), Some(t)) => (v, t, if oor { Flag::OutOfRange } else { Flag::None }),
            };
            rows.push(Row {
                sampler: key.sampler,
                rate: key.rate,
                size: key.size,
                rep: key.rep,
                measure,
                variant,
                estimate,
                truth,
                flag,
            });
        }
    }
}

fn run_replication(cfg: &ExperimentConfig, fixed: Option<&Graph>, rep: usize) -> Vec<Row> {
    let seed = cfg.seed;
    let r = rep as u64;
    let owned;
    let graph = match (fixed, &cfg.graph) {
        (Some(g), _) => g,
        (None, GraphSource::Generate(params)) => {
            owned = params
                .generate(&mut rng::stream(seed, &[GRAPH, r]))
                .expect("generator parameters validated");
            &owned
        }
        (None, GraphSource::Files { .. }) => unreachable!("file graphs are always fixed"),
    };

    let truths: [Option<f64>; 4] = match ground_truth(graph, cfg.top_quantile) {
        Ok(t) => [
            Some(t.proportions.b),
            t.ingroup_share(Group::B),
            Some(t.visibility.b),
            t.homophily(Group::B),
        ],
        Err(_) => [None; 4],
    };

    let confusions: Vec<ConfusionMatrix> = cfg
        .rates
        .iter()
        .map(|&rate| ConfusionMatrix::symmetric(rate).expect("rates validated"))
        .collect();
    let noisy: Vec<Vec<Group>> = confusions
        .iter()
        .enumerate()
        .map(|(ri, c)| apply_noise(graph.labels(), c, &mut rng::stream(seed, &[NOISE, r, ri as u64])))
        .collect();

    let mut rows = Vec::new();
    for (si, &sampler) in cfg.samplers.iter().enumerate() {
        for (zi, &size) in cfg.sample_sizes.iter().enumerate() {
            let (s, z) = (si as u64, zi as u64);
            let drawn = draw_sample(cfg, graph, sampler, size, &mut rng::stream(seed, &[SAMPLE, r, s, z]));
            for (ri, (&rate, c)) in cfg.rates.iter().zip(&confusions).enumerate() {
                let key = CellKey { sampler, rate, size, rep };
                let sample = match &drawn {
                    Ok(sample) => sample,
                    Err(e) => {
                        let failed = [[Err(e.code()); 4]; 3];
                        push_rows(&mut rows, &key, &truths.map(|t| t.or(Some(f64::NAN))), failed);
                        continue;
                    }
                };
                let mut sample = sample.clone();
                sample.as_sample_mut().relabel(&noisy[ri]);
                let resampled = match &sample {
                    AnySample::Walk(w) => {
                        let mut rng = rng::stream(seed, &[RESAMPLE, r, s, z, ri as u64]);
                        importance_resample(w, size * cfg.resample_factor, &mut rng)
                            .ok()
                            .map(|set| set.records)
                    }
                    _ => None,
                };
                let correction = match cfg.labeled_nodes {
                    Some(k) => {
                        let labeled = &sample.as_sample().records()[..k.min(sample.as_sample().records().len())];
                        let truth: Vec<Group> = labeled.iter().map(|r| r.true_label).collect();
                        let pred: Vec<Group> = labeled.iter().filter_map(|r| r.noisy_label).collect();
                        empirical_confusion(&truth, &pred)
                    }
                    None => Ok(*c),
                };
                let q = cfg.top_quantile;
                let res = resampled.as_deref();
                let corrected = match &correction {
                    Ok(c) => estimate_measures(&sample, res, LabelField::Noisy, Some(c), q),
                    Err(e) => [Err(e.code()); 4],
                };
                let estimates = [
                    estimate_measures(&sample, res, LabelField::True, None, q),
                    estimate_measures(&sample, res, LabelField::Noisy, None, q),
                    corrected,
                ];
                push_rows(&mut rows, &key, &truths, estimates);
            }
        }
    }
    rows
}

/// Runs the full grid. Estimation failures become flagged rows.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let fixed = load_fixed_graph(cfg)?;
    if let Some(g) = &fixed {
        if let Some(&n) = cfg.sample_sizes.iter().find(|&&n| n > g.node_count()) {
            return Err(Error::InvalidParameter(format!(
                "sample size {n} exceeds graph size {}",
                g.node_count()
            )));
        }
    }

    #[cfg(feature = "parallel")]
    let per_rep: Vec<Vec<Row>> = {
        use rayon::prelude::*;
        (0..cfg.replications)
            .into_par_iter()
            .map(|rep| run_replication(cfg, fixed.as_ref(), rep))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_rep: Vec<Vec<Row>> = (0..cfg.replications)
        .map(|rep| run_replication(cfg, fixed.as_ref(), rep))
        .collect();

    let mut rows: Vec<Row> = per_rep.into_iter().flatten().collect();
    rows.sort_by_key(|r| r.sort_key());
    Ok(ExperimentResult {
        config: cfg.clone(),
        rows,
    })
}

/// `sqrt(mean(e²)) / truth`.
pub fn nrmse(errors: &[f64], truth: f64) -> Result<f64> {
    if truth == 0.0 {
        return Err(Error::ZeroTruth);
    }
    if errors.is_empty() {
        return Err(Error::EmptySample);
    }
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64;
    Ok(mse.sqrt() / truth)
}

/// Nearest-rank percentile of ascending data, `p` in `(0, 100]`.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub sampler: SamplerKind,
    pub rate: f64,
    pub size: usize,
    pub measure: Measure,
    pub variant: Variant,
    pub replications: usize,
    pub mean_estimate: f64,
    pub mean_truth: f64,
    pub mean_error: f64,
    pub sd_error: f64,
    pub error_p2_5: f64,
    pub error_p97_5: f64,
    /// `None` when the mean truth is zero.
    pub nrmse: Option<f64>,
    pub out_of_range_rate: f64,
    pub failure_rate: f64,
}

/// Per-cell error summaries. Failed rows are counted in `failure_rate` but
/// excluded from every statistic.
pub fn summarize(result: &ExperimentResult) -> Vec<CellSummary> {
    let mut cells: BTreeMap<_, Vec<&Row>> = BTreeMap::new();
    for row in &result.rows {
        let key = (row.sampler, ordered(row.rate), row.size, row.measure, row.variant);
        cells.entry(key).or_default().push(row);
    }
    cells.values().map(|cell| summarize_cell(cell)).collect()
}

fn summarize_cell(cell: &[&Row]) -> CellSummary {
    let head = cell[0];
    let ok: Vec<&Row> = cell.iter().copied().filter(|r| !r.flag.failed()).collect();
    let n = ok.len() as f64;
    let mean_of = |f: fn(&Row) -> f64| ok.iter().map(|r| f(r)).sum::<f64>() / n;
    let mean_error = mean_of(Row::error);
    let mean_truth = mean_of(|r| r.truth);
    let sd_error = if ok.len() > 1 {
        (ok.iter().map(|r| (r.error() - mean_error).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut errors: Vec<f64> = ok.iter().map(|r| r.error()).collect();
    errors.sort_by(f64::total_cmp);
    let (lo, hi) = if errors.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (percentile_nearest_rank(&errors, 2.5), percentile_nearest_rank(&errors, 97.5))
    };
    CellSummary {
        sampler: head.sampler,
        rate: head.rate,
        size: head.size,
        measure: head.measure,
        variant: head.variant,
        replications: cell.len(),
        mean_estimate: mean_of(|r| r.estimate),
        mean_truth,
        mean_error,
        sd_error,
        error_p2_5: lo,
        error_p97_5: hi,
        nrmse: nrmse(&errors, mean_truth).ok(),
        out_of_range_rate: ok.iter().filter(|r| r.flag == Flag::OutOfRange).count() as f64 / cell.len() as f64,
        failure_rate: (cell.len() - ok.len()) as f64 / cell.len() as f64,
    }
}

fn number(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        "NA".into()
    }
}

/// One line per row: `sampler,rate,size,rep,measure,variant,estimate,error,flags`.
pub fn write_rows_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sampler", "rate", "size", "rep", "measure", "variant", "estimate", "error", "flags"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.sampler.name().to_string(),
            r.rate.to_string(),
            r.size.to_string(),
            r.rep.to_string(),
            r.measure.name().to_string(),
            r.variant.name().to_string(),
            number(r.estimate),
            number(r.error()),
            r.flag.label(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Summary table; cells with an undefined NRMSE print `undefined`.
pub fn write_summary_csv<W: Write>(summary: &[CellSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "sampler",
        "rate",
        "size",
        "measure",
        "variant",
        "replications",
        "mean_estimate",
        "mean_truth",
        "mean_error",
        "sd_error",
        "error_p2_5",
        "error_p97_5",
        "nrmse",
        "out_of_range_rate",
        "failure_rate",
    ])
    .map_err(csv_err)?;
    for s in summary {
        w.write_record([
            s.sampler.name().to_string(),
            s.rate.to_string(),
            s.size.to_string(),
            s.measure.name().to_string(),
            s.variant.name().to_string(),
            s.replications.to_string(),
            number(s.mean_estimate),
            number(s.mean_truth),
            number(s.mean_error),
            number(s.sd_error),
            number(s.error_p2_5),
            number(s.error_p97_5),
            s.nrmse.map_or_else(|| "undefined".to_string(), number),
            number(s.out_of_range_rate),
            number(s.failure_rate),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes `rows.csv` and `summary.csv` into `dir`, creating it if needed.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let rows_path = dir.join("rows.csv");
    let summary_path = dir.join("summary.csv");
    write_rows_csv(&result.rows, BufWriter::new(File::create(&rows_path)?))?;
    write_summary_csv(&summarize(result), BufWriter::new(File::create(&summary_path)?))?;
    Ok((rows_path, summary_path))
}
