use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mcpart::io::{self, format_g6, RunRecord, WeightSpec};
use mcpart::multilevel::{LpMode, PartitionConfig};
use mcpart::rebalance::{FallbackRating, Strategy};
use mcpart_cli::bench::{self, BenchConfig};
use mcpart_cli::profile::{self, AlgorithmRuns};
use mcpart_cli::{commands, ExitStatus, RebalanceRequest};

#[derive(Parser)]
#[command(name = "mcpart", version, about = "Multi-constraint hypergraph partitioner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a hypergraph with the multilevel pipeline.
    Partition(PartitionArgs),
    /// Recompute connectivity and balance of a partition from scratch.
    Evaluate(EvaluateArgs),
    /// Run only the rebalancer on an existing partition.
    Rebalance(RebalanceArgs),
    /// Sweep instances, block counts and seeds into a run-record CSV.
    Bench(BenchArgs),
    /// Build a performance-profile table from run-record CSVs.
    ProfileData(ProfileArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RebalancerKind {
    L1u,
    Baseline,
}

impl From<RebalancerKind> for Strategy {
    fn from(k: RebalancerKind) -> Self {
        match k {
            RebalancerKind::L1u => Strategy::L1u,
            RebalancerKind::Baseline => Strategy::Baseline,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Number of blocks.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.03)]
    epsilon: f64,
    #[arg(long, env = "MCPART_SEED", default_value_t = 0)]
    seed: u64,
    /// input | unit | degree | file:PATH | rand:d:lo:hi[:seed], comma-separated.
    #[arg(long, default_value = "input")]
    weights: WeightSpec,
    /// Heavy-vertex threshold of the imbalance bound.
    #[arg(long, default_value_t = mcpart::objective::DEFAULT_WEIGHT_THRESHOLD)]
    t: f64,
}

#[derive(Args)]
struct PipelineOptions {
    #[arg(long, default_value = "r1a1b3")]
    fallback_rating: FallbackRating,
    #[arg(long)]
    no_fallback: bool,
    #[arg(long, value_enum, default_value = "l1u")]
    rebalancer: RebalancerKind,
    #[arg(long, default_value = "unconstrained")]
    lp_mode: LpMode,
}

impl PipelineOptions {
    fn config(&self, common: &Common) -> PartitionConfig {
        let mut c = PartitionConfig::new(common.k, common.epsilon, common.seed);
        c.rebalance.threshold = common.t;
        c.rebalance.fallback_enabled = !self.no_fallback;
        c.rebalance.fallback_rating = self.fallback_rating;
        c.rebalance.strategy = self.rebalancer.into();
        c.refinement.lp_mode = self.lp_mode;
        c
    }
}

#[derive(Args)]
struct PartitionArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    pipeline: PipelineOptions,
    /// Partition file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run-record CSV to append to.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value = "default")]
    algorithm: String,
}

#[derive(Args)]
struct EvaluateArgs {
    input: PathBuf,
    partition: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RebalanceArgs {
    input: PathBuf,
    partition: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Per-dimension bound u, replacing the default.
    #[arg(long, value_delimiter = ',')]
    u_override: Option<Vec<f64>>,
    #[arg(long)]
    no_fallback: bool,
    #[arg(long, default_value = "r1a1b3")]
    fallback_rating: FallbackRating,
    /// Keep running greedy rounds until balanced or stalled.
    #[arg(long)]
    unbounded_rounds: bool,
    #[arg(long, value_enum, default_value = "l1u")]
    rebalancer: RebalancerKind,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Block counts.
    #[arg(long = "ks", value_delimiter = ',', default_value = "2,5,8,11,16,27,32")]
    ks: Vec<usize>,
    #[arg(long, default_value_t = 0.03)]
    epsilon: f64,
    /// First seed; runs use seed, seed + 1, ...
    #[arg(long, env = "MCPART_SEED", default_value_t = 0)]
    seed: u64,
    /// Seeds per (instance, k).
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value = "input")]
    weights: WeightSpec,
    #[arg(long, default_value_t = mcpart::objective::DEFAULT_WEIGHT_THRESHOLD)]
    t: f64,
    #[command(flatten)]
    pipeline: PipelineOptions,
    /// Skip (instance, k) pairs with a vertex above this fraction of the
    /// average block weight.
    #[arg(long, default_value_t = bench::DEFAULT_EXCLUSION)]
    exclusion: f64,
    #[arg(long, default_value = "default")]
    algorithm: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// NAME=PATH pairs, one run-record CSV per algorithm.
    #[arg(required = true)]
    runs: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn weights_line(w: &[f64]) -> String {
    w.iter().map(|&x| format_g6(x)).collect::<Vec<_>>().join(" ")
}

fn instance_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn run_partition(args: PartitionArgs) -> anyhow::Result<ExitStatus> {
    let hg = commands::load_instance(&args.input, &args.common.weights)?;
    let config = args.pipeline.config(&args.common);
    let (assignment, report) = commands::partition(&hg, &config)?;
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    let t = report.timings;
    println!("connectivity {}", report.connectivity);
    println!("max_block_weights {}", weights_line(&report.max_block_weights));
    println!("balanced {}", report.balanced);
    println!(
        "time total {} coarsen {} initial {} refine {} rebalance {}",
        format_g6(t.total.as_secs_f64()),
        format_g6(t.coarsen.as_secs_f64()),
        format_g6(t.initial.as_secs_f64()),
        format_g6(t.refine.as_secs_f64()),
        format_g6(t.rebalance.as_secs_f64()),
    );
    println!(
        "rebalance calls {} greedy_rounds {} fallback_calls {}",
        report.rebalance.calls, report.rebalance.greedy_rounds, report.rebalance.fallback_calls
    );
    if let Some(out) = &args.out {
        io::write_partition(&assignment, out).with_context(|| format!("writing {}", out.display()))?;
    }
    if let Some(csv) = &args.csv {
        let record = RunRecord {
            instance: instance_name(&args.input),
            algorithm: args.algorithm.clone(),
            k: config.k,
            seed: config.seed,
            epsilon: config.epsilon,
            d: hg.dims(),
            connectivity: report.connectivity,
            max_block_weights: report.max_block_weights.clone(),
            balanced: report.balanced,
            time_total: t.total.as_secs_f64(),
            time_coarsen: t.coarsen.as_secs_f64(),
            time_initial: t.initial.as_secs_f64(),
            time_refine: t.refine.as_secs_f64(),
            time_rebalance: t.rebalance.as_secs_f64(),
            rebalance_calls: report.rebalance.calls,
            greedy_rounds: report.rebalance.greedy_rounds,
            fallback_calls: report.rebalance.fallback_calls,
            excluded: false,
        };
        io::append_run_record(csv, &record).with_context(|| format!("writing {}", csv.display()))?;
    }
    Ok(ExitStatus::from_balanced(report.balanced))
}

fn run_evaluate(args: EvaluateArgs) -> anyhow::Result<ExitStatus> {
    let c = &args.common;
    let hg = commands::load_instance(&args.input, &c.weights)?;
    let assignment = io::read_partition(&args.partition, hg.num_vertices(), c.k)
        .with_context(|| format!("reading {}", args.partition.display()))?;
    let r = commands::evaluate(&hg, c.k, &assignment, c.epsilon, c.t)?;
    println!("connectivity {}", r.connectivity);
    println!("max_block_weights {}", weights_line(&r.max_block_weights));
    for (b, w) in r.block_weights.iter().enumerate() {
        println!("block {b} {}", weights_line(w));
    }
    if let Some(l1u) = r.l1u {
        println!("l1u {}", format_g6(l1u));
    }
    println!("balanced {}", r.balanced);
    Ok(ExitStatus::from_balanced(r.balanced))
}

fn run_rebalance(args: RebalanceArgs) -> anyhow::Result<ExitStatus> {
    let c = &args.common;
    let hg = commands::load_instance(&args.input, &c.weights)?;
    let assignment = io::read_partition(&args.partition, hg.num_vertices(), c.k)
        .with_context(|| format!("reading {}", args.partition.display()))?;
    let mut request = RebalanceRequest::new(c.epsilon);
    request.t = c.t;
    request.u_override = args.u_override.clone();
    request.fallback = !args.no_fallback;
    request.fallback_rating = args.fallback_rating;
    request.unbounded_rounds = args.unbounded_rounds;
    request.strategy = args.rebalancer.into();
    let r = commands::rebalance(&hg, c.k, &assignment, &request)?;
    println!("status {:?}", r.status);
    println!("moves {}", r.moves);
    println!("changed {}", r.changed);
    println!("rounds {} fallback_calls {}", r.outcome.rounds, r.outcome.fallback_calls);
    println!("l1u {} -> {}", format_g6(r.l1u_before), format_g6(r.l1u_after));
    println!("connectivity {} -> {}", r.connectivity_before, r.connectivity_after);
    println!("max_block_weights {}", weights_line(&r.max_block_weights));
    if let Some(out) = &args.out {
        io::write_partition(&r.assignment, out).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(ExitStatus::from_balanced(r.status == mcpart::rebalance::RebalanceStatus::Balanced))
}

fn run_bench(args: BenchArgs) -> anyhow::Result<ExitStatus> {
    if args.ks.iter().any(|&k| k < 2) {
        bail!("every k must be at least 2");
    }
    let mut instances = Vec::new();
    for path in &args.instances {
        instances.push((instance_name(path), commands::load_instance(path, &args.weights)?));
    }
    let common = Common {
        k: 2,
        epsilon: args.epsilon,
        seed: args.seed,
        weights: args.weights.clone(),
        t: args.t,
    };
    let config = BenchConfig {
        ks: args.ks.clone(),
        seeds: args.seeds,
        base_seed: args.seed,
        partition: args.pipeline.config(&common),
        exclusion_threshold: args.exclusion,
        algorithm: args.algorithm.clone(),
    };
    let summary = bench::bench(&instances, &config, args.csv.as_deref())?;
    println!("instance,k,excluded,runs,balanced_runs,mean_connectivity,mean_time");
    for p in &summary.pairs {
        println!(
            "{},{},{},{},{},{},{}",
            p.instance,
            p.k,
            u8::from(p.excluded),
            p.runs,
            p.balanced_runs,
            format_g6(p.mean_connectivity),
            format_g6(p.mean_time)
        );
    }
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), format_g6);
    println!("geomean_connectivity {}", opt(summary.geometric_mean_connectivity()));
    println!("geomean_time {}", opt(summary.geometric_mean_time()));
    println!("balanced_pairs {}", format_g6(summary.balanced_pair_fraction()));
    println!("balanced_runs {}", format_g6(summary.balanced_run_fraction()));
    Ok(ExitStatus::Feasible)
}

fn run_profile(args: ProfileArgs) -> anyhow::Result<ExitStatus> {
    let mut algorithms = Vec::new();
    for spec in &args.runs {
        let Some((name, path)) = spec.split_once('=') else {
            bail!("expected NAME=PATH, got `{spec}`");
        };
        let records = io::read_run_records(path).with_context(|| format!("reading {path}"))?;
        algorithms.push(AlgorithmRuns {
            name: name.to_string(),
            records,
        });
    }
    let taus = args.tau.clone().unwrap_or_else(|| profile::DEFAULT_TAUS.to_vec());
    let points = profile::profile_data(&algorithms, &taus);
    match &args.out {
        Some(out) => profile::write_profile(&points, out)?,
        None => {
            println!("algorithm,tau,fraction,infeasible_fraction");
            for p in &points {
                println!(
                    "{},{},{},{}",
                    p.algorithm,
                    format_g6(p.tau),
                    format_g6(p.fraction),
                    format_g6(p.infeasible_fraction)
                );
            }
        }
    }
    Ok(ExitStatus::Feasible)
}

fn validate(common: &Common) -> anyhow::Result<()> {
    if common.k < 2 {
        bail!("--k must be at least 2");
    }
    if !(common.epsilon > 0.0) {
        bail!("--epsilon must be positive");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage errors exit with 1, not clap's 2, which means "infeasible" here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::InputError as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Partition(a) => validate(&a.common).and_then(|_| run_partition(a)),
        Command::Evaluate(a) => validate(&a.common).and_then(|_| run_evaluate(a)),
        Command::Rebalance(a) => validate(&a.common).and_then(|_| run_rebalance(a)),
        Command::Bench(a) => run_bench(a),
        Command::ProfileData(a) => run_profile(a),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ExitStatus::InputError as u8)
        }
    }
}
