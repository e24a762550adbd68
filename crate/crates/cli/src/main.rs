use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use groupwalk::experiments::{summarize, write_outputs, write_summary_csv, ExperimentConfig};
use groupwalk::graph::{load_graph_files, write_edge_list, write_labels};
use groupwalk::noise::apply_noise;
use groupwalk::quantify::{
    adjust_edge_proportions, adjust_proportions, coleman_homophily, ingroup_share, variance_inflation_nodes,
};
use groupwalk::rng::stream;
use groupwalk::samplers::{estimate_edge_vector, read_records, rwrw_proportions, rwrw_walk, write_records, LabelField, SeedMode, WalkSample};
use groupwalk::{ground_truth, ConfusionMatrix, EdgeVector, Graph, Group, HomophilyBa, PropVector};

/// Sample labeled graphs, correct for classifier noise and run replicated simulations.
#[derive(Parser)]
#[command(name = "groupwalk", version)]
struct Cli {
    /// JSON configuration (generator parameters for `generate`, a full grid for `experiment`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the seed in an experiment config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for replicated runs (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a homophilous preferential-attachment graph and write `edges.tsv` and `labels.tsv`.
    Generate(GeneratorArgs),
    /// Run one re-weighted random walk and write its per-step records.
    Walk(WalkArgs),
    /// Correct measured proportions for a known confusion matrix.
    Correct(CorrectArgs),
    /// Run a replicated simulation grid from `--config`.
    Experiment,
    /// Print the exact measures of a graph as JSON.
    Truth(TruthArgs),
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    #[arg(long, default_value_t = 10_000)]
    nodes: usize,
    /// Links added per arriving node.
    #[arg(long, default_value_t = 4)]
    links: usize,
    /// Expected share of group B.
    #[arg(long, default_value_t = 0.2)]
    minority: f64,
    /// Weight on same-group attachment, 0.5 for none.
    #[arg(long, default_value_t = 0.8)]
    preference: f64,
}

impl GeneratorArgs {
    fn params(&self) -> HomophilyBa {
        HomophilyBa {
            nodes: self.nodes,
            links_per_node: self.links,
            minority_fraction: self.minority,
            ingroup_preference: self.preference,
        }
    }
}

/// Where a graph comes from: files on disk, or the generator flags.
#[derive(Args)]
struct GraphArgs {
    /// Edge list, one whitespace-separated pair per line.
    #[arg(long, requires = "labels")]
    edges: Option<PathBuf>,
    /// Label file, `id<TAB>A|B|NA` per line.
    #[arg(long, requires = "edges")]
    labels: Option<PathBuf>,
    /// Treat the edge list as directed and keep only reciprocated pairs.
    #[arg(long)]
    directed: bool,
    #[command(flatten)]
    generator: GeneratorArgs,
}

impl GraphArgs {
    fn load(&self, seed: u64) -> anyhow::Result<Graph> {
        match (&self.edges, &self.labels) {
            (Some(e), Some(l)) => load_graph_files(e, l, self.directed)
                .with_context(|| format!("loading {} and {}", e.display(), l.display())),
            _ => Ok(self.generator.params().generate(&mut stream(seed, &GRAPH_KEY))?),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedArg {
    Degree,
    Uniform,
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 3000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    burn_in: usize,
    /// Starting node: drawn proportional to degree, or uniformly (pair with `--burn-in`).
    #[arg(long, value_enum, default_value_t = SeedArg::Degree)]
    start: SeedArg,
    #[command(flatten)]
    noise: NoiseArgs,
}

#[derive(Args)]
struct NoiseArgs {
    /// Symmetric misclassification rate.
    #[arg(long, conflicts_with = "confusion")]
    rate: Option<f64>,
    /// Confusion matrix in row-major order `P(a|a),P(a|b),P(b|a),P(b|b)`.
    #[arg(long, value_delimiter = ',')]
    confusion: Option<Vec<f64>>,
}

impl NoiseArgs {
    fn matrix(&self) -> anyhow::Result<Option<ConfusionMatrix>> {
        Ok(match (&self.rate, &self.confusion) {
            (Some(r), _) => Some(ConfusionMatrix::symmetric(*r)?),
            (None, Some(v)) => match v[..] {
                [aa, ab, ba, bb] => Some(ConfusionMatrix::from_row_major([aa, ab, ba, bb])?),
                _ => bail!("--confusion takes 4 comma-separated values, got {}", v.len()),
            },
            (None, None) => None,
        })
    }
}

#[derive(Args)]
struct CorrectArgs {
    #[command(flatten)]
    noise: NoiseArgs,
    /// Measured share of group B.
    #[arg(long)]
    proportion: Option<f64>,
    /// Measured edge-type shares `aa,ab,bb`.
    #[arg(long, value_delimiter = ',')]
    edge_shares: Option<Vec<f64>>,
    /// Walk records (as written by `walk`); measured values are taken from their noisy labels.
    #[arg(long, conflicts_with_all = ["proportion", "edge_shares"])]
    records: Option<PathBuf>,
}

#[derive(Args)]
struct TruthArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 0.2)]
    top_quantile: f64,
}

// the graph key matches the experiment runner's fixed-graph stream, so
// `generate --seed s` reproduces the graph of a `fixed_graph` run with seed s
const GRAPH_KEY: [u64; 2] = [1, 0];
const NOISE_KEY: u64 = 2;
const WALK_KEY: u64 = 3;

fn read_generator_config(path: &Path) -> anyhow::Result<HomophilyBa> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn generate(cli: &Cli, args: &GeneratorArgs) -> anyhow::Result<()> {
    let params = match &cli.config {
        Some(path) => read_generator_config(path)?,
        None => args.params(),
    };
    let Some(dir) = &cli.out else {
        bail!("generate needs --out DIR");
    };
    let graph = params.generate(&mut stream(cli.seed.unwrap_or(0), &GRAPH_KEY))?;
    fs::create_dir_all(dir)?;
    write_edge_list(&graph, BufWriter::new(File::create(dir.join("edges.tsv"))?))?;
    write_labels(&graph, BufWriter::new(File::create(dir.join("labels.tsv"))?))?;
    print_json(&json!({
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "mean_degree": graph.mean_degree(),
        "minority_nodes": graph.group_count(Group::B),
        "directory": dir,
    }))
}

fn walk(cli: &Cli, args: &WalkArgs) -> anyhow::Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let graph = args.graph.load(seed)?;
    let noisy = args
        .noise
        .matrix()?
        .map(|c| apply_noise(graph.labels(), &c, &mut stream(seed, &[NOISE_KEY])));
    let mode = match args.start {
        SeedArg::Degree => SeedMode::DegreeProportional,
        SeedArg::Uniform => SeedMode::UniformWithBurnin,
    };
    let sample = rwrw_walk(&graph, args.steps, mode, args.burn_in, noisy.as_deref(), &mut stream(seed, &[WALK_KEY]))?;
    match &cli.out {
        Some(path) => {
            write_records(&sample.steps, BufWriter::new(File::create(path)?))?;
            let noisy_b = rwrw_proportions(&sample, LabelField::Noisy).ok().map(|p| p.b);
            print_json(&json!({
                "steps": sample.steps.len(),
                "records": path,
                "estimate_b_true_labels": rwrw_proportions(&sample, LabelField::True)?.b,
                "estimate_b_noisy_labels": noisy_b,
            }))
        }
        None => Ok(write_records(&sample.steps, io::stdout().lock())?),
    }
}

fn correct(args: &CorrectArgs) -> anyhow::Result<()> {
    let Some(c) = args.noise.matrix()? else {
        bail!("correct needs --rate or --confusion");
    };
    let (proportion, edges) = match &args.records {
        Some(path) => {
            let steps = read_records(BufReader::new(File::open(path)?))?;
            let sample = WalkSample {
                steps,
                seed_mode: SeedMode::DegreeProportional,
                burn_in: 0,
            };
            let p = rwrw_proportions(&sample, LabelField::Noisy)?.b;
            (Some(p), estimate_edge_vector(&sample, LabelField::Noisy).ok())
        }
        None => {
            let edges = match args.edge_shares.as_deref() {
                Some(&[aa, ab, bb]) => Some(EdgeVector::new(aa, ab, bb)),
                Some(v) => bail!("--edge-shares takes 3 comma-separated values, got {}", v.len()),
                None => None,
            };
            (args.proportion, edges)
        }
    };
    if proportion.is_none() && edges.is_none() {
        bail!("nothing to correct: pass --proportion, --edge-shares or --records");
    }

    let mut report = json!({
        "confusion": c.row_major(),
        "det": c.det(),
        "variance_inflation": variance_inflation_nodes(&c)?,
    });
    let corrected_p = match proportion {
        Some(m) => {
            let p = adjust_proportions(&PropVector::from_minority(m), &c)?;
            report["proportion_b"] = json!({"measured": m, "corrected": p.b, "out_of_range": !p.in_range()});
            Some(p)
        }
        None => None,
    };
    if let Some(t) = edges {
        let s = adjust_edge_proportions(&t, &c)?;
        report["edge_shares"] = json!({
            "measured": t.to_array(),
            "corrected": s.to_array(),
            "out_of_range": !s.in_range(),
        });
        if let Some(p) = corrected_p {
            let share = ingroup_share(&s, Group::B)?;
            let h = coleman_homophily(share, p.b)?;
            report["homophily_b"] = json!({"ingroup_share": share, "value": h.value, "out_of_range": h.out_of_range});
        }
    }
    print_json(&report)
}

fn experiment(cli: &Cli) -> anyhow::Result<()> {
    let Some(path) = &cli.config else {
        bail!("experiment needs --config FILE");
    };
    let mut cfg = ExperimentConfig::from_json_file(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    let result = groupwalk::experiments::run_experiment(&cfg)?;
    match &cfg.output {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let (rows, summary) = write_outputs(&result, dir)?;
            eprintln!("wrote {} rows to {} and {}", result.rows.len(), rows.display(), summary.display());
            Ok(())
        }
        None => Ok(write_summary_csv(&summarize(&result), io::stdout().lock())?),
    }
}

fn truth(cli: &Cli, args: &TruthArgs) -> anyhow::Result<()> {
    let graph = args.graph.load(cli.seed.unwrap_or(0))?;
    let t = ground_truth(&graph, args.top_quantile)?;
    let mut report = json!({
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "mean_degree": graph.mean_degree(),
        "truth": t,
        "ingroup_share": [t.ingroup_share(Group::A), t.ingroup_share(Group::B)],
    });
    if let Some(path) = &cli.out {
        serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), &report)?;
        report = json!({"written": path});
    }
    print_json(&report)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Generate(args) => generate(cli, args),
        Command::Walk(args) => walk(cli, args),
        Command::Correct(args) => correct(args),
        Command::Experiment => experiment(cli),
        Command::Truth(args) => truth(cli, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match err.downcast_ref::<groupwalk::Error>() {
                Some(e) => eprintln!("error [{}]: {err:#}", e.code()),
                None => eprintln!("error: {err:#}"),
            }
            ExitCode::FAILURE
        }
    }
}
