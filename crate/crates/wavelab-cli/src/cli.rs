//! Argument surface of the `wavelab` binary.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "wavelab",
    version,
    about = "Space-time Petrov-Galerkin experiments for the modal oscillator \
             and the wave equation",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Modal oscillator studies: u'' + mu u = f on (0, T), zero initial data.
    #[command(subcommand)]
    Ode(OdeCommand),
    /// Wave equation studies on the cylinder (0, L) x (0, T).
    #[command(subcommand)]
    Wave(WaveCommand),
    /// Report utilities.
    #[command(subcommand)]
    Report(ReportCommand),
}

/// Flags shared by every experiment.
#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// JSON experiment configuration; inline flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory for tables and summaries (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Record the pinned seed in the summary so reruns are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
    /// Seed for random sweeps.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum OdeCommand {
    /// Solve one modal problem and tabulate the trajectory.
    Solve(OdeSolveArgs),
    /// Dual norms of one load, or the closed-form battery without --rhs.
    Dualnorm(OdeDualnormArgs),
    /// Discrete inf-sup constants across mesh sizes.
    Infsup(OdeInfsupArgs),
    /// Load dual norm against the graph norm of the discrete solution.
    Isometry(OdeIsometryArgs),
    /// Random sweeps: norm equivalence, Friedrichs, stability, extension.
    Equivalence(OdeEquivalenceArgs),
    /// Refinement study against the Duhamel oracle.
    Convergence(OdeConvergenceArgs),
}

#[derive(Debug, Args)]
pub struct OdeSolveArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Modal parameter mu > 0.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Temporal elements.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Right-hand side, e.g. const:1.0 or pointmass:w=2.0.
    #[arg(long)]
    pub rhs: Option<String>,
    /// Fail (exit 2) if the L2 error against the oracle exceeds this bound.
    #[arg(long, value_name = "TOL")]
    pub check_oracle: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichDual {
    /// Dual norm over test functions on (0, T) vanishing at T.
    Test,
    /// Dual norm of the zero-extended functional on (-T, T).
    Extended,
}

#[derive(Debug, Args)]
pub struct OdeDualnormArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Temporal elements.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Load to measure; without it the closed-form battery runs.
    #[arg(long)]
    pub rhs: Option<String>,
    /// Test-mesh refinement for the test-space dual norm.
    #[arg(long, value_name = "R")]
    pub refine: Option<usize>,
    /// Which dual norm to report for --rhs.
    #[arg(long, value_enum)]
    pub which: Option<WhichDual>,
}

#[derive(Debug, Args)]
pub struct OdeInfsupArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Modal parameter mu > 0.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Mesh sizes, comma separated, strictly increasing.
    #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
    pub sizes: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct OdeIsometryArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Modal parameter mu > 0.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Temporal elements.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Load, e.g. const:1.0 or pointmass:w=3.141592653589793.
    #[arg(long)]
    pub rhs: Option<String>,
    /// Test-mesh refinement; 1 makes the ratio exact by construction.
    #[arg(long, value_name = "R")]
    pub refine: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OdeEquivalenceArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Single modal parameter; without it the sweep runs mu in {1, pi^2, 100}.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Temporal elements of the random ansatz functions.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Test-mesh refinement for the equivalence graph norms.
    #[arg(long, value_name = "R")]
    pub refine: Option<usize>,
    /// Random functions per mu (stability sweeps use half as many).
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OdeConvergenceArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Modal parameter mu > 0.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Density load with a Duhamel oracle, or a point mass.
    #[arg(long)]
    pub rhs: Option<String>,
    /// Mesh sizes, comma separated, strictly increasing.
    #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
    pub sizes: Option<Vec<usize>>,
}

#[derive(Debug, Subcommand)]
pub enum WaveCommand {
    /// Solve one wave problem and tabulate the space-time field.
    Solve(WaveSolveArgs),
    /// Discrete inf-sup constants on square grids across sizes.
    InfsupDecay(WaveInfsupDecayArgs),
    /// Resonant-mode growth table r_k ~ sqrt(mu_k).
    Theorem1(WaveTheorem1Args),
    /// Random sweeps: stability, Friedrichs, and extension bounds.
    StabilitySweep(WaveStabilitySweepArgs),
    /// Fixed-ratio refinement diagnostic (stable at q<=1, unstable at q>1).
    CflDemo(WaveCflDemoArgs),
    /// The worked example u = sin(pi x) sin(pi t) on the unit cylinder.
    ExampleSine(WaveExampleSineArgs),
}

#[derive(Debug, Args)]
pub struct WaveSolveArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Spatial length L > 0.
    #[arg(long = "L", value_name = "L")]
    pub length: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Temporal elements.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Spatial elements.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Wave load: modal:k=1;const=1.0, initvel:k=1;amp=3.14, griddensity:path=f.csv.
    #[arg(long)]
    pub rhs: Option<String>,
}

#[derive(Debug, Args)]
pub struct WaveInfsupDecayArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Spatial length L > 0.
    #[arg(long = "L", value_name = "L")]
    pub length: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Square grid sizes (n_t = n_x = n), comma separated.
    #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
    pub sizes: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct WaveTheorem1Args {
    #[command(flatten)]
    pub io: IoArgs,
    /// Spatial length L > 0.
    #[arg(long = "L", value_name = "L")]
    pub length: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Temporal elements; defaults to the rule for the largest mode.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Mode indices, comma separated, strictly increasing.
    #[arg(long, value_delimiter = ',', value_name = "K,K,...")]
    pub modes: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct WaveStabilitySweepArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Spatial length L > 0.
    #[arg(long = "L", value_name = "L")]
    pub length: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Temporal elements.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Spatial elements.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Random density cases (Friedrichs/extension sweeps use 2x as many).
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WaveCflDemoArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Spatial length L > 0.
    #[arg(long = "L", value_name = "L")]
    pub length: Option<f64>,
    /// Final time T > 0.
    #[arg(long = "T", value_name = "T")]
    pub t_final: Option<f64>,
    /// Single grid ratio q = h_t / h_x; without it both q=1 and q=2 run.
    #[arg(long, value_name = "Q")]
    pub ratio: Option<f64>,
    /// Temporal element counts per level, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
    pub levels: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct WaveExampleSineArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Temporal elements.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Spatial elements.
    #[arg(long)]
    pub nx: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Merge experiment summaries into one JSON document.
    Merge(ReportMergeArgs),
}

#[derive(Debug, Args)]
pub struct ReportMergeArgs {
    /// Output directory for merged.json (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Summary files to merge, in order.
    #[arg(required = true, value_name = "SUMMARY.JSON")]
    pub inputs: Vec<PathBuf>,
}
