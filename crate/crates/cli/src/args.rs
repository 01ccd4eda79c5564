use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gsa_core::KernelKind;

pub const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  2  usage error (bad flag, value, or config file)
  3  numeric divergence (non-finite force, fitness, or dynamics)
  4  I/O failure";

/// Gravitational search optimization with selectable force kernels.
#[derive(Debug, Clone, Parser)]
#[command(name = "gsa", version, after_help = EXIT_CODES_HELP)]
pub struct CliInvocation {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run one optimization and write its per-iteration trace CSV.
    #[command(after_help = EXIT_CODES_HELP)]
    Run(RunArgs),
    /// Fit the log-log distance exponent of a kernel's force magnitude.
    #[command(after_help = EXIT_CODES_HELP)]
    Probe(ProbeArgs),
    /// Compare the original, linear and square kernels on all four functions.
    #[command(after_help = EXIT_CODES_HELP)]
    Compare(CompareArgs),
    /// Measure pairwise force evaluation throughput.
    #[command(after_help = EXIT_CODES_HELP)]
    Bench(BenchArgs),
}

pub(crate) fn parse_kernel(s: &str) -> Result<KernelKind, String> {
    s.parse::<KernelKind>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Default, Args)]
pub struct KernelArgs {
    /// Force kernel: original | linear | square | power:<q> [default: original]
    #[arg(long, value_name = "KERNEL", value_parser = parse_kernel)]
    pub kernel: Option<KernelKind>,
    /// Softening constant added to the force denominator [default: 1e-12]
    #[arg(long, value_name = "REAL")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SearchArgs {
    /// Initial gravitational constant [default: 100]
    #[arg(long, value_name = "REAL")]
    pub g0: Option<f64>,
    /// Decay rate of the gravitational constant [default: 20]
    #[arg(long, value_name = "REAL")]
    pub alpha: Option<f64>,
    /// Number of agents [default: 50]
    #[arg(long, value_name = "INT")]
    pub pop: Option<usize>,
    /// Search-space dimensionality [default: 30]
    #[arg(long, value_name = "INT")]
    pub dims: Option<usize>,
    /// Iteration budget [default: 1000]
    #[arg(long, value_name = "INT")]
    pub iters: Option<usize>,
    /// RNG seed [default: 42]
    #[arg(long, value_name = "UINT64")]
    pub seed: Option<u64>,
    /// Use unit force weights and velocity coefficients [default: off]
    #[arg(long)]
    pub deterministic: bool,
    /// JSON config file; flags override its values [default: none]
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Objective: sphere | rastrigin | rosenbrock | ackley [default: sphere]
    #[arg(long, value_name = "NAME")]
    pub function: Option<String>,
    /// Trace CSV path; same as --trace [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Trace CSV path [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Probe CSV path [default: stdout]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// JSON config file; may set kernel and probe_distances [default: none]
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Softening constant added to the force denominator [default: 1e-12]
    #[arg(long, value_name = "REAL")]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Repetitions per kernel and function [default: 25]
    #[arg(long, value_name = "INT")]
    pub reps: Option<usize>,
    /// Output directory for results.csv and summary.csv [default: .]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write 0 in the wall_seconds column [default: off]
    #[arg(long)]
    pub no_timing: bool,
    /// Run grid cells one after another instead of in parallel [default: off]
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Search-space dimensionality [default: 30]
    #[arg(long, value_name = "INT")]
    pub dims: Option<usize>,
    /// Number of agents; each sweep evaluates pop*(pop-1) pairs [default: 50]
    #[arg(long, value_name = "INT")]
    pub pop: Option<usize>,
    /// Number of sweeps over all pairs [default: 200]
    #[arg(long, value_name = "INT")]
    pub iters: Option<usize>,
    /// RNG seed for agent placement [default: 42]
    #[arg(long, value_name = "UINT64")]
    pub seed: Option<u64>,
}

pub const DEFAULT_BENCH_SWEEPS: usize = 200;

/// Parses a full argument vector, program name first.
pub fn parse_args<I, T>(argv: I) -> Result<CliInvocation, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    CliInvocation::try_parse_from(argv)
}
