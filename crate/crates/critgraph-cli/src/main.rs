use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Simulation toolkit for critical random graphs and their scaling limits.
#[derive(Parser, Debug)]
#[command(name = "critgraph", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random graph and write it as an edge list plus a JSON sidecar.
    Gen(GenArgs),
    /// Percolate a graph or degree sequence and report its components.
    Percolate(PercolateArgs),
    /// Run an exploration walk on a configuration model and write the walk.
    Explore(ExploreArgs),
    /// Component, degree and susceptibility statistics of an edge list.
    Stats(StatsArgs),
    /// Simulate a limit process and extract its excursions.
    Limits(LimitsArgs),
    /// Simulate a coalescent or the dynamic graph construction.
    Coalescent(CoalescentArgs),
    /// Compute the hub kernel matrix and sample the limit graph.
    Limitgraph(LimitGraphArgs),
    /// Run a replicated experiment from a TOML or JSON spec.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    /// Configuration multigraph.
    Cm,
    /// Erased configuration model.
    Ecm,
    /// Uniform simple graph by rejection.
    Uniform,
    /// Generalized random graph.
    Grg,
    ChungLu,
    NorrosReittu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum RegimeArg {
    TauGt4,
    #[value(name = "tau_34")]
    Tau34,
    #[value(name = "tau_23_cm")]
    Tau23Cm,
    #[value(name = "tau_23_single")]
    Tau23Single,
}

/// Degree or weight sequence source shared by the graph commands.
#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Graph model.
    #[arg(long, value_enum, default_value = "cm")]
    model: ModelKind,
    /// Power-law exponent of the degree (or weight) sequence.
    #[arg(long)]
    tau: Option<f64>,
    /// Number of vertices.
    #[arg(long)]
    n: Option<usize>,
    /// Scale constant of the power-law sequence.
    #[arg(long, default_value_t = 1.0)]
    cf: f64,
    /// Window parameter (degree inflation for generators, window position for percolation).
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Degree file (one degree per line) used instead of the power-law sequence.
    #[arg(long)]
    degrees: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SeedArgs {
    /// Master seed; drawn from system entropy and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Output edge list; the sidecar is written next to it with a `.json` suffix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PercolateMode {
    /// Bond percolation on a realized graph.
    Direct,
    /// Half-edge explosion followed by a configuration model.
    Janson,
    /// Binomial half-edge retention followed by a configuration model.
    Fountoulakis,
    /// Erase multi-edges and loops, then percolate.
    EraseThenPercolate,
    /// Percolate the multigraph, then erase.
    PercolateThenErase,
}

#[derive(Args, Debug)]
struct PercolateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value = "direct")]
    mode: PercolateMode,
    /// Retention probability; overrides --regime.
    #[arg(long)]
    p: Option<f64>,
    /// Critical window used to set p from --lambda.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Input edge list (direct mode only).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output edge list of the percolated graph.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExploreMode {
    /// Depth-first vertex exploration.
    Dfs,
    /// Unit-edge exploration.
    Unit,
}

#[derive(Args, Debug)]
struct ExploreArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value = "dfs")]
    mode: ExploreMode,
    /// Output CSV of the walk (step, value, event).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Input edge list.
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    seed: SeedArgs,
    /// Also compute susceptibilities and the maximum component diameter.
    #[arg(long)]
    susceptibility: bool,
    /// Output CSV of all components.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LimitMode {
    /// Brownian motion with parabolic drift.
    Parabolic,
    /// Thinned Levy process.
    Levy,
    /// Process with infinitely many hub jumps.
    Isj,
}

#[derive(Args, Debug)]
struct LimitsArgs {
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value = "parabolic")]
    mode: LimitMode,
    /// Drift parameter.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Degree exponent setting the jump sizes theta_i = cf i^(-1/(tau-1)) (levy and isj).
    #[arg(long, default_value_t = 3.5)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    cf: f64,
    /// Number of explicit jumps (levy and isj).
    #[arg(long = "K", default_value_t = 200)]
    k: usize,
    /// Mean parameter.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Variance parameter (parabolic).
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Add a Brownian term for the truncated small jumps (levy).
    #[arg(long)]
    brownian_tail: bool,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Horizon.
    #[arg(long = "T", default_value_t = 10.0)]
    t: f64,
    /// Output CSV of the path; excursions go to the same stem with `.excursions.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CoalescentMode {
    /// Multiplicative coalescent on hub masses.
    Mc,
    /// Dynamic half-edge pairing construction.
    Dynamic,
    /// Kept-alive modified process.
    Modified,
}

#[derive(Args, Debug)]
struct CoalescentArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value = "mc")]
    mode: CoalescentMode,
    /// Number of hub masses (mc mode).
    #[arg(long = "K", default_value_t = 50)]
    k: usize,
    /// Horizon.
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    /// Output CSV of events.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Grg,
    Ecm,
}

#[derive(Args, Debug)]
struct LimitGraphArgs {
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value = "grg")]
    kernel: KernelArg,
    #[arg(long, default_value_t = 2.5)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    cf: f64,
    /// Mean weight; defaults to cf/(1 - alpha), the mean of the hub sequence.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    lambda: f64,
    /// Number of hubs.
    #[arg(long = "K", default_value_t = 100)]
    k: usize,
    /// Number of sampled limit graphs for the weight medians.
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    /// Output CSV of the kernel matrix.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Experiment spec (.toml or .json).
    #[arg(long)]
    spec: PathBuf,
    /// Override the spec's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the spec's replicate count.
    #[arg(long)]
    replicates: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<critgraph::Error> for Failure {
    fn from(e: critgraph::Error) -> Self {
        match e {
            critgraph::Error::InvalidParameter(m) => Failure::Usage(m),
            other => Failure::Runtime(other.into()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {}", m.replace('\n', " "));
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
