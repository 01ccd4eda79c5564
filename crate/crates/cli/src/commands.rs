use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gsa_core::experiments::{write_probe_csv, write_results_csv, write_summary_csv, write_trace_csv};
use gsa_core::kernels::default_probe_grid;
use gsa_core::rng::SwarmRng;
use gsa_core::{
    probe_exponent, run, run_grid, summarize, AgentState, Execution, ExperimentPlan, KernelSpec, ObjectiveName,
    ObjectiveSpec, Summary,
};

use crate::args::{BenchArgs, Command, CompareArgs, CliInvocation, KernelArgs, ProbeArgs, RunArgs, DEFAULT_BENCH_SWEEPS};
use crate::config::{parse_objective, resolve_kernel, resolve_repetitions, resolve_search, FileConfig};
use crate::error::CliError;

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Probe geometry: unit masses and unit gravitational constant.
const PROBE_G: f64 = 1.0;
const PROBE_MASS: f64 = 1.0;

pub fn execute(invocation: CliInvocation) -> Result<(), CliError> {
    match invocation.command {
        Command::Run(args) => run_command(&args),
        Command::Probe(args) => probe_command(&args),
        Command::Compare(args) => compare_command(&args),
        Command::Bench(args) => bench_command(&args),
    }
}

/// Writes `bytes` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn run_command(args: &RunArgs) -> Result<(), CliError> {
    let file = FileConfig::load_optional(args.search.config.as_deref())?;
    let kernel = resolve_kernel(&file, &args.kernel)?;
    let name = match args.function.as_deref().or(file.function.as_deref()) {
        Some(name) => parse_objective(name)?,
        None => ObjectiveName::Sphere,
    };
    let (config, objective) = resolve_search(&file, &args.search, name, kernel)?;
    let trace = run(&config, &objective)?;
    let mut buf = Vec::new();
    write_trace_csv(&trace, &config, &mut buf)?;
    emit(args.trace.as_deref().or(args.out.as_deref()), &buf)
}

fn probe_command(args: &ProbeArgs) -> Result<(), CliError> {
    let file = FileConfig::load_optional(args.config.as_deref())?;
    let kernel = resolve_kernel(&file, &args.kernel)?;
    let grid = file.probe_distances.clone().unwrap_or_else(default_probe_grid);
    let report = probe_exponent(&kernel, PROBE_G, PROBE_MASS, PROBE_MASS, &grid)?;
    let mut buf = Vec::new();
    write_probe_csv(&report, &mut buf)?;
    emit(args.out.as_deref(), &buf)
}

/// The three kernels compared by `compare`, sharing one epsilon.
pub fn comparison_kernels(epsilon: f64) -> Result<Vec<KernelSpec>, CliError> {
    [KernelSpec::original(), KernelSpec::inverse_linear(), KernelSpec::inverse_square()]
        .into_iter()
        .map(|k| k.with_epsilon(epsilon).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn compare_command(args: &CompareArgs) -> Result<(), CliError> {
    let file = FileConfig::load_optional(args.search.config.as_deref())?;
    let kernel_flags = KernelArgs {
        kernel: None,
        epsilon: args.epsilon,
    };
    let epsilon = resolve_kernel(&file, &kernel_flags)?.epsilon();
    let kernels = comparison_kernels(epsilon)?;
    let (base_config, spec) = resolve_search(&file, &args.search, ObjectiveName::Sphere, kernels[0])?;
    let plan = ExperimentPlan {
        base_seed: base_config.seed,
        base_config,
        kernels,
        objectives: ObjectiveName::ALL
            .iter()
            .map(|&n| ObjectiveSpec::new(n, spec.dims))
            .collect::<Result<_, _>>()?,
        repetitions: resolve_repetitions(&file, args.reps)?,
    };
    let execution = if args.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let rows = run_grid(&plan, execution)?;
    let summary = summarize(&rows)?;

    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut results = Vec::new();
    write_results_csv(&rows, &mut results, !args.no_timing)?;
    let mut summary_csv = Vec::new();
    write_summary_csv(&summary, &mut summary_csv)?;
    emit(Some(&dir.join(RESULTS_FILE)), &results)?;
    emit(Some(&dir.join(SUMMARY_FILE)), &summary_csv)?;
    emit(None, comparison_report(&summary).as_bytes())
}

/// Human-readable medians per objective plus original-vs-square wins.
pub fn comparison_report(summary: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<11} {:>14} {:>14} {:>14}   original vs square (wins/wins/ties)", "objective", "original", "linear", "square");
    for name in ObjectiveName::ALL {
        let objective = name.as_str();
        let median = |k: &str| {
            summary
                .row(k, objective)
                .map(|r| format!("{:.6e}", r.median))
                .unwrap_or_else(|| "-".into())
        };
        let wins = summary
            .head_to_head(objective, "original", "square")
            .map(|w| format!("{}/{}/{}", w.wins_a, w.wins_b, w.ties))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{objective:<11} {:>14} {:>14} {:>14}   {wins}",
            median("original"),
            median("linear"),
            median("square")
        );
    }
    out
}

fn bench_command(args: &BenchArgs) -> Result<(), CliError> {
    let kernel = resolve_kernel(&FileConfig::default(), &args.kernel)?;
    let dims = args.dims.unwrap_or(gsa_core::types::DEFAULT_DIMS);
    let pop = args.pop.unwrap_or(gsa_core::types::DEFAULT_POPULATION);
    let sweeps = args.iters.unwrap_or(DEFAULT_BENCH_SWEEPS);
    if dims == 0 || pop < 2 || sweeps == 0 {
        return Err(CliError::Usage("bench needs dims ≥ 1, pop ≥ 2 and iters ≥ 1".into()));
    }
    let mut rng = SwarmRng::seed_from_u64(args.seed.unwrap_or(gsa_core::types::DEFAULT_SEED));
    let agents = (0..pop)
        .map(|_| {
            let p = (0..dims).map(|_| rng.uniform_in(-100.0, 100.0)).collect();
            AgentState::at(p, rng.uniform() + 1e-3)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let started = Instant::now();
    let mut checksum = 0.0;
    for _ in 0..sweeps {
        for (i, ai) in agents.iter().enumerate() {
            for (j, aj) in agents.iter().enumerate() {
                if i != j {
                    checksum += gsa_core::pairwise_force(&kernel, 1.0, ai, aj)?.components[0];
                }
            }
        }
    }
    let seconds = started.elapsed().as_secs_f64();
    let pairs = sweeps * pop * (pop - 1);
    std::hint::black_box(checksum);
    let line = format!(
        "kernel={} dims={dims} pairs={pairs} seconds={seconds:.6} pairs_per_second={:.0}\n",
        kernel.name(),
        pairs as f64 / seconds.max(f64::MIN_POSITIVE)
    );
    emit(None, line.as_bytes())
}
