//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported operation takes plain numbers and returns a JSON string, so the
//! page needs no bundler or generated type definitions. The `*_json` functions
//! hold the logic and are what the native tests exercise.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use groupwalk::experiments::{run_experiment, ExperimentConfig, GraphSource, Measure, SamplerKind, Variant, WalkSettings};
use groupwalk::quantify::{adjust_proportions, variance_inflation_nodes};
use groupwalk::rng::stream;
use groupwalk::{ground_truth, ConfusionMatrix, Graph, Group, HomophilyBa, PropVector};

const MAX_NODES: usize = 20_000;

fn params(nodes: usize, links: usize, minority: f64, preference: f64) -> Result<HomophilyBa, String> {
    if nodes > MAX_NODES {
        return Err(format!("the demo caps graphs at {MAX_NODES} nodes"));
    }
    let p = HomophilyBa {
        nodes,
        links_per_node: links,
        minority_fraction: minority,
        ingroup_preference: preference,
    };
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

/// Degree counts per group on log2-spaced buckets `[1,2), [2,4), ...`.
fn degree_histogram(g: &Graph) -> Value {
    let max = (0..g.node_count()).map(|v| g.degree(v)).max().unwrap_or(1);
    let buckets = (usize::BITS - max.leading_zeros()) as usize;
    let mut counts = vec![[0usize; 2]; buckets];
    for v in 0..g.node_count() {
        let b = usize::BITS as usize - 1 - g.degree(v).leading_zeros() as usize;
        counts[b][g.label(v).index()] += 1;
    }
    let lower: Vec<usize> = (0..buckets).map(|b| 1 << b).collect();
    json!({
        "lower": lower,
        "a": counts.iter().map(|c| c[0]).collect::<Vec<_>>(),
        "b": counts.iter().map(|c| c[1]).collect::<Vec<_>>(),
    })
}

pub fn generate_json(nodes: usize, links: usize, minority: f64, preference: f64, seed: u64) -> Result<String, String> {
    let g = params(nodes, links, minority, preference)?
        // same stream the experiment runner uses for a fixed graph
        .generate(&mut stream(seed, &[1, 0]))
        .map_err(|e| e.to_string())?;
    let t = ground_truth(&g, 0.2).map_err(|e| e.to_string())?;
    Ok(json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "mean_degree": g.mean_degree(),
        "max_degree": (0..g.node_count()).map(|v| g.degree(v)).max(),
        "truth": t,
        "ingroup_share_b": t.ingroup_share(Group::B),
        "degree_histogram": degree_histogram(&g),
    })
    .to_string())
}

pub fn correct_json(flip_a: f64, flip_b: f64, measured_b: f64) -> Result<String, String> {
    let c = ConfusionMatrix::from_row_major([1.0 - flip_a, flip_b, flip_a, 1.0 - flip_b]).map_err(|e| e.to_string())?;
    let p = adjust_proportions(&PropVector::from_minority(measured_b), &c).map_err(|e| e.to_string())?;
    let inflation = variance_inflation_nodes(&c).map_err(|e| e.to_string())?;
    let curve: Vec<[f64; 2]> = (0..49)
        .map(|i| {
            let r = i as f64 * 0.01;
            [r, 1.0 / (1.0 - 2.0 * r).powi(2)]
        })
        .collect();
    Ok(json!({
        "corrected_b": p.b,
        "out_of_range": !p.in_range(),
        "det": c.det(),
        "variance_inflation": inflation,
        "symmetric_curve": curve,
    })
    .to_string())
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_json(
    nodes: usize,
    links: usize,
    minority: f64,
    preference: f64,
    rate: f64,
    steps: usize,
    replications: usize,
    seed: u64,
) -> Result<String, String> {
    if replications == 0 || replications > 1000 {
        return Err("replications must lie in 1..=1000".into());
    }
    let cfg = ExperimentConfig {
        graph: GraphSource::Generate(params(nodes, links, minority, preference)?),
        fixed_graph: true,
        samplers: vec![SamplerKind::Rwrw],
        rates: vec![rate],
        sample_sizes: vec![steps],
        replications,
        top_quantile: 0.2,
        seed,
        output: None,
        walk: WalkSettings::default(),
        snowball_seeds: 10,
        resample_factor: 10,
        labeled_nodes: None,
    };
    let result = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let series = |measure: Measure, variant: Variant| -> Vec<Option<f64>> {
        result
            .cell(SamplerKind::Rwrw, rate, steps, measure, variant)
            .iter()
            .map(|r| r.estimate.is_finite().then_some(r.estimate))
            .collect()
    };
    let truth = |measure: Measure| result.cell(SamplerKind::Rwrw, rate, steps, measure, Variant::NoNoise).first().map(|r| r.truth);
    Ok(json!({
        "proportion": {
            "truth": truth(Measure::Proportion),
            "uncorrected": series(Measure::Proportion, Variant::Uncorrected),
            "corrected": series(Measure::Proportion, Variant::Corrected),
        },
        "homophily": {
            "truth": truth(Measure::Homophily),
            "uncorrected": series(Measure::Homophily, Variant::Uncorrected),
            "corrected": series(Measure::Homophily, Variant::Corrected),
        },
    })
    .to_string())
}

/// Generates a graph and returns its size, degree histogram and exact measures.
#[wasm_bindgen]
pub fn generate(nodes: usize, links: usize, minority: f64, preference: f64, seed: u32) -> Result<String, JsError> {
    generate_json(nodes, links, minority, preference, u64::from(seed)).map_err(|e| JsError::new(&e))
}

/// Corrects a measured minority share given the two flip probabilities.
#[wasm_bindgen]
pub fn correct(flip_a: f64, flip_b: f64, measured_b: f64) -> Result<String, JsError> {
    correct_json(flip_a, flip_b, measured_b).map_err(|e| JsError::new(&e))
}

/// Replicated walks on one generated graph; returns per-replication estimates.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    nodes: usize,
    links: usize,
    minority: f64,
    preference: f64,
    rate: f64,
    steps: usize,
    replications: usize,
    seed: u32,
) -> Result<String, JsError> {
    simulate_json(nodes, links, minority, preference, rate, steps, replications, u64::from(seed)).map_err(|e| JsError::new(&e))
}
