//! JSON config files and the defaults → file → flags layering.

use std::path::Path;

use gsa_core::experiments::DEFAULT_REPETITIONS;
use gsa_core::types::DEFAULT_EPSILON;
use gsa_core::{GsaConfig, KernelKind, KernelSpec, ObjectiveName, ObjectiveSpec};
use serde::Deserialize;

use crate::args::{KernelArgs, SearchArgs};
use crate::error::CliError;

/// Kernel section of a config file: `{"kind": "power:1.5", "epsilon": 0}`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileKernel {
    pub kind: Option<String>,
    pub epsilon: Option<f64>,
}

/// Mirrors the run configuration field names; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub population: Option<usize>,
    pub dims: Option<usize>,
    pub lower_bound: Option<Vec<f64>>,
    pub upper_bound: Option<Vec<f64>>,
    pub kernel: Option<FileKernel>,
    pub g0: Option<f64>,
    pub alpha: Option<f64>,
    pub max_iters: Option<usize>,
    pub kbest_initial_fraction: Option<f64>,
    pub deterministic_weights: Option<bool>,
    pub seed: Option<u64>,
    pub record_positions: Option<bool>,
    /// Objective for `run`.
    pub function: Option<String>,
    /// Repetitions for `compare`.
    pub repetitions: Option<usize>,
    /// Distance grid for `probe`.
    pub probe_distances: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        path.map(Self::load).transpose().map(Option::unwrap_or_default)
    }
}

pub(crate) fn parse_objective(name: &str) -> Result<ObjectiveName, CliError> {
    name.parse::<ObjectiveName>().map_err(|e| CliError::Usage(e.to_string()))
}

pub(crate) fn resolve_kernel(file: &FileConfig, flags: &KernelArgs) -> Result<KernelSpec, CliError> {
    let file_kernel = file.kernel.clone().unwrap_or_default();
    let kind = match (flags.kernel, file_kernel.kind.as_deref()) {
        (Some(kind), _) => kind,
        (None, Some(s)) => s.parse::<KernelKind>().map_err(|e| CliError::Usage(e.to_string()))?,
        (None, None) => KernelKind::GsaOriginal,
    };
    let epsilon = flags.epsilon.or(file_kernel.epsilon).unwrap_or(DEFAULT_EPSILON);
    KernelSpec::new(kind, epsilon).map_err(|e| CliError::Usage(e.to_string()))
}

/// Builds the run configuration for `objective`, whose default box is used
/// unless the file gives explicit bounds.
pub(crate) fn resolve_search(
    file: &FileConfig,
    flags: &SearchArgs,
    objective: ObjectiveName,
    kernel: KernelSpec,
) -> Result<(GsaConfig, ObjectiveSpec), CliError> {
    let dims = flags.dims.or(file.dims).unwrap_or(gsa_core::types::DEFAULT_DIMS);
    let spec = ObjectiveSpec::new(objective, dims).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut config = spec.default_config();
    if let Some(lo) = &file.lower_bound {
        config.lower_bound = lo.clone();
    }
    if let Some(hi) = &file.upper_bound {
        config.upper_bound = hi.clone();
    }
    config.kernel = kernel;
    config.population = flags.pop.or(file.population).unwrap_or(config.population);
    config.g0 = flags.g0.or(file.g0).unwrap_or(config.g0);
    config.alpha = flags.alpha.or(file.alpha).unwrap_or(config.alpha);
    config.max_iters = flags.iters.or(file.max_iters).unwrap_or(config.max_iters);
    config.seed = flags.seed.or(file.seed).unwrap_or(config.seed);
    config.kbest_initial_fraction = file
        .kbest_initial_fraction
        .unwrap_or(config.kbest_initial_fraction);
    config.deterministic_weights = flags.deterministic || file.deterministic_weights.unwrap_or(false);
    config.record_positions = file.record_positions.unwrap_or(false);
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((config, spec))
}

pub(crate) fn resolve_repetitions(file: &FileConfig, flag: Option<usize>) -> Result<usize, CliError> {
    match flag.or(file.repetitions).unwrap_or(DEFAULT_REPETITIONS) {
        0 => Err(CliError::Usage("--reps must be ≥ 1".into())),
        n => Ok(n),
    }
}
