//! Seeded run grids, their statistics, and the CSV formats they are written in.
//!
//! Each grid cell `(kernel, objective, repetition)` runs with
//! `seed = base_seed ^ fnv1a64(kernel ‖ 0x00 ‖ objective ‖ 0x00 ‖ rep_le64)`,
//! so any row can be rerun from the plan alone.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{self, MASS_SOFTENING};
use crate::error::{GsaError, Result};
use crate::objectives::ObjectiveSpec;
use crate::rng::RNG_ALGORITHM;
use crate::types::{GsaConfig, KernelSpec, ProbeReport, RunTrace};

pub const DEFAULT_REPETITIONS: usize = 25;

/// Kernels × objectives × repetitions on top of a shared base configuration.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    /// Everything except kernel, dims, bounds and seed, which vary per cell.
    pub base_config: GsaConfig,
    pub kernels: Vec<KernelSpec>,
    pub objectives: Vec<ObjectiveSpec>,
    pub repetitions: usize,
    pub base_seed: u64,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(GsaError::InvalidConfig("repetitions ≥ 1 required".into()));
        }
        if self.kernels.is_empty() {
            return Err(GsaError::InvalidConfig("plan needs at least one kernel".into()));
        }
        if self.objectives.is_empty() {
            return Err(GsaError::InvalidConfig("plan needs at least one objective".into()));
        }
        for objective in &self.objectives {
            self.cell_config(&self.kernels[0], objective, 0).validate()?;
        }
        Ok(())
    }

    /// Configuration actually run for one grid cell.
    pub fn cell_config(&self, kernel: &KernelSpec, objective: &ObjectiveSpec, repetition: usize) -> GsaConfig {
        let mut config = self.base_config.clone();
        config.kernel = *kernel;
        config.dims = objective.dims;
        config.lower_bound = vec![objective.default_lower(); objective.dims];
        config.upper_bound = vec![objective.default_upper(); objective.dims];
        config.seed = derive_seed(self.base_seed, &kernel.name(), objective.name.as_str(), repetition);
        config
    }

    /// Cells in row order: objective, then kernel, then repetition.
    fn cells(&self) -> Vec<(&KernelSpec, &ObjectiveSpec, usize)> {
        let mut cells = Vec::with_capacity(self.kernels.len() * self.objectives.len() * self.repetitions);
        for objective in &self.objectives {
            for kernel in &self.kernels {
                for rep in 0..self.repetitions {
                    cells.push((kernel, objective, rep));
                }
            }
        }
        cells
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

pub fn derive_seed(base_seed: u64, kernel: &str, objective: &str, repetition: usize) -> u64 {
    let mut bytes = Vec::with_capacity(kernel.len() + objective.len() + 10);
    bytes.extend_from_slice(kernel.as_bytes());
    bytes.push(0);
    bytes.extend_from_slice(objective.as_bytes());
    bytes.push(0);
    bytes.extend_from_slice(&(repetition as u64).to_le_bytes());
    base_seed ^ fnv1a64(&bytes)
}

/// One completed run in a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub kernel: String,
    pub objective: String,
    pub repetition: usize,
    pub seed: u64,
    pub final_best: f64,
    pub iters: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

/// Runs every cell of the plan. Row order does not depend on `execution`.
pub fn run_grid(plan: &ExperimentPlan, execution: Execution) -> Result<Vec<ResultRow>> {
    plan.validate()?;
    let run_cell = |&(kernel, objective, rep): &(&KernelSpec, &ObjectiveSpec, usize)| {
        let config = plan.cell_config(kernel, objective, rep);
        let started = Instant::now();
        let trace = engine::run(&config, objective).map_err(|e| GsaError::RunFailed {
            kernel: kernel.name(),
            objective: objective.name.to_string(),
            seed: config.seed,
            source: Box::new(e),
        })?;
        Ok(ResultRow {
            kernel: kernel.name(),
            objective: objective.name.to_string(),
            repetition: rep,
            seed: config.seed,
            final_best: trace.final_best(),
            iters: trace.per_iteration.len(),
            wall_seconds: started.elapsed().as_secs_f64(),
        })
    };
    let cells = plan.cells();
    match execution {
        Execution::Serial => cells.iter().map(run_cell).collect(),
        Execution::Parallel => cells.par_iter().map(run_cell).collect(),
    }
}

/// Statistics of final best values for one (kernel, objective) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub kernel: String,
    pub objective: String,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Head-to-head record of two kernels on one objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinCount {
    pub objective: String,
    pub kernel_a: String,
    pub kernel_b: String,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub wins: Vec<WinCount>,
}

impl Summary {
    pub fn row(&self, kernel: &str, objective: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.kernel == kernel && r.objective == objective)
    }

    /// Win record of `a` against `b`, oriented so that `wins_a` belongs to `a`.
    pub fn head_to_head(&self, objective: &str, a: &str, b: &str) -> Option<WinCount> {
        let w = self.wins.iter().find(|w| {
            w.objective == objective
                && ((w.kernel_a == a && w.kernel_b == b) || (w.kernel_a == b && w.kernel_b == a))
        })?;
        if w.kernel_a == a {
            return Some(w.clone());
        }
        Some(WinCount {
            objective: w.objective.clone(),
            kernel_a: a.into(),
            kernel_b: b.into(),
            wins_a: w.wins_b,
            wins_b: w.wins_a,
            ties: w.ties,
        })
    }
}

/// Median, mean, sample standard deviation, min and max per
/// (kernel, objective), plus pairwise win counts between kernels.
///
/// Groups are ordered by (objective, kernel) name, and values are sorted
/// before reduction, so the output does not depend on row order.
pub fn summarize(rows: &[ResultRow]) -> Result<Summary> {
    if rows.is_empty() {
        return Err(GsaError::InvalidInput("cannot summarize zero rows".into()));
    }
    let mut groups: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    // objective -> repetition -> kernel -> value
    let mut cells: BTreeMap<&str, BTreeMap<usize, BTreeMap<&str, f64>>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.objective.as_str(), row.kernel.as_str()))
            .or_default()
            .push(row.final_best);
        cells
            .entry(row.objective.as_str())
            .or_default()
            .entry(row.repetition)
            .or_default()
            .insert(row.kernel.as_str(), row.final_best);
    }

    let summary_rows = groups
        .into_iter()
        .map(|((objective, kernel), mut values)| {
            values.sort_by(f64::total_cmp);
            let n = values.len();
            let mean = values.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            let median = if n % 2 == 1 {
                values[n / 2]
            } else {
                0.5 * (values[n / 2 - 1] + values[n / 2])
            };
            SummaryRow {
                kernel: kernel.into(),
                objective: objective.into(),
                median,
                mean,
                std,
                min: values[0],
                max: values[n - 1],
            }
        })
        .collect();

    let mut wins = Vec::new();
    for (objective, reps) in &cells {
        let mut kernels: Vec<&str> = reps.values().flat_map(|k| k.keys().copied()).collect();
        kernels.sort_unstable();
        kernels.dedup();
        for (ia, a) in kernels.iter().enumerate() {
            for b in &kernels[ia + 1..] {
                let mut count = WinCount {
                    objective: (*objective).into(),
                    kernel_a: (*a).into(),
                    kernel_b: (*b).into(),
                    wins_a: 0,
                    wins_b: 0,
                    ties: 0,
                };
                for by_kernel in reps.values() {
                    if let (Some(va), Some(vb)) = (by_kernel.get(a), by_kernel.get(b)) {
                        if va < vb {
                            count.wins_a += 1;
                        } else if vb < va {
                            count.wins_b += 1;
                        } else {
                            count.ties += 1;
                        }
                    }
                }
                wins.push(count);
            }
        }
    }

    Ok(Summary {
        rows: summary_rows,
        wins,
    })
}

/// `kernel,objective,repetition,seed,final_best,iters,wall_seconds`.
/// With `timing` off every `wall_seconds` is written as 0.
pub fn write_results_csv<W: Write>(rows: &[ResultRow], writer: W, timing: bool) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        if timing {
            csv.serialize(row)?;
        } else {
            csv.serialize(ResultRow {
                wall_seconds: 0.0,
                ..row.clone()
            })?;
        }
    }
    // Header-only output for an empty grid.
    if rows.is_empty() {
        csv.write_record(["kernel", "objective", "repetition", "seed", "final_best", "iters", "wall_seconds"])?;
    }
    csv.flush()?;
    Ok(())
}

/// `kernel,objective,median,mean,std,min,max`, followed by one
/// `# wins ...` comment line per kernel pair and objective.
pub fn write_summary_csv<W: Write>(summary: &Summary, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in &summary.rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    let mut out = csv.into_inner().map_err(|e| GsaError::Io(e.into_error()))?;
    for w in &summary.wins {
        writeln!(
            out,
            "# wins objective={} a={} b={} a_wins={} b_wins={} ties={}",
            w.objective, w.kernel_a, w.kernel_b, w.wins_a, w.wins_b, w.ties
        )?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TraceCsvRow {
    iter: usize,
    best_so_far: f64,
    population_best: f64,
    population_mean: f64,
}

/// Comment header with the run's parameters, then
/// `iter,best_so_far,population_best,population_mean`.
pub fn write_trace_csv<W: Write>(trace: &RunTrace, config: &GsaConfig, mut writer: W) -> Result<()> {
    writeln!(
        writer,
        "# rng={} seed={} kernel={} epsilon={:e} g0={} alpha={} population={} dims={} max_iters={} kbest_initial_fraction={} deterministic_weights={} mass_softening={:e}",
        RNG_ALGORITHM,
        config.seed,
        config.kernel.name(),
        config.kernel.epsilon(),
        config.g0,
        config.alpha,
        config.population,
        config.dims,
        config.max_iters,
        config.kbest_initial_fraction,
        config.deterministic_weights,
        MASS_SOFTENING,
    )?;
    let mut csv = csv::Writer::from_writer(writer);
    for r in &trace.per_iteration {
        csv.serialize(TraceCsvRow {
            iter: r.iter,
            best_so_far: r.best_so_far,
            population_best: r.population_best,
            population_mean: r.population_mean,
        })?;
    }
    csv.flush()?;
    Ok(())
}

/// `r,magnitude` rows then `# slope=<v> intercept=<v> max_residual=<v>`.
pub fn write_probe_csv<W: Write>(report: &ProbeReport, mut writer: W) -> Result<()> {
    writeln!(writer, "r,magnitude")?;
    for (r, m) in &report.samples {
        writeln!(writer, "{r:e},{m:e}")?;
    }
    writeln!(
        writer,
        "# slope={:e} intercept={:e} max_residual={:e}",
        report.fitted_slope, report.fitted_intercept, report.max_residual
    )?;
    writer.flush()?;
    Ok(())
}

/// Reads the footer of a probe CSV back into `(slope, intercept, max_residual)`.
pub fn parse_probe_footer(text: &str) -> Option<(f64, f64, f64)> {
    let line = text.lines().rev().find(|l| l.starts_with("# slope="))?;
    let mut values = line.trim_start_matches("# ").split_whitespace().map(|kv| {
        kv.split_once('=').and_then(|(_, v)| v.parse::<f64>().ok())
    });
    Some((values.next()??, values.next()??, values.next()??))
}
