//! Domain types shared by the kernels, the engine and the experiment harness.
//!
//! Every type here validates on construction and is immutable afterwards
//! from the outside; the engine mutates agents only through crate-private
//! access.

use std::fmt;
use std::str::FromStr;

use crate::error::{GsaError, Result};

/// Softening constant used when none is given.
pub const DEFAULT_EPSILON: f64 = 1e-12;
/// Initial gravitational constant.
pub const DEFAULT_G0: f64 = 100.0;
/// Exponential decay rate of the gravitational constant.
pub const DEFAULT_ALPHA: f64 = 20.0;
pub const DEFAULT_POPULATION: usize = 50;
pub const DEFAULT_DIMS: usize = 30;
pub const DEFAULT_MAX_ITERS: usize = 1000;
pub const DEFAULT_KBEST_FRACTION: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 42;

fn ensure_finite(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(idx) => Err(GsaError::InvalidInput(format!(
            "{name}[{idx}] is not finite ({})",
            values[idx]
        ))),
        None => Ok(()),
    }
}

/// One point-mass agent: a candidate solution together with its dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub(crate) position: Vec<f64>,
    pub(crate) velocity: Vec<f64>,
    pub(crate) fitness: f64,
    pub(crate) mass: f64,
}

impl AgentState {
    pub fn new(position: Vec<f64>, velocity: Vec<f64>, fitness: f64, mass: f64) -> Result<Self> {
        if position.is_empty() {
            return Err(GsaError::InvalidInput("agent position must be non-empty".into()));
        }
        if position.len() != velocity.len() {
            return Err(GsaError::DimensionMismatch {
                expected: position.len(),
                found: velocity.len(),
            });
        }
        ensure_finite("position", &position)?;
        ensure_finite("velocity", &velocity)?;
        if !fitness.is_finite() {
            return Err(GsaError::InvalidInput(format!("fitness is not finite ({fitness})")));
        }
        if !mass.is_finite() || mass < 0.0 {
            return Err(GsaError::InvalidInput(format!(
                "mass must be finite and >= 0, got {mass}"
            )));
        }
        Ok(Self {
            position,
            velocity,
            fitness,
            mass,
        })
    }

    /// A stationary agent with unit mass and zero fitness. Handy for kernel work.
    pub fn at(position: Vec<f64>, mass: f64) -> Result<Self> {
        let velocity = vec![0.0; position.len()];
        Self::new(position, velocity, 0.0, mass)
    }

    pub fn position(&self) -> &[f64] {
        &self.position
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn dims(&self) -> usize {
        self.position.len()
    }
}

/// Force law family. The named kinds are aliases for fixed exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// Distance-independent magnitude: denominator `R + eps`.
    GsaOriginal,
    /// Magnitude proportional to `1/R`: denominator `R^2 + eps`.
    InverseLinear,
    /// Magnitude proportional to `1/R^2`: denominator `R^3 + eps`.
    InverseSquare,
    /// Magnitude proportional to `1/R^q`: denominator `R^(q+1) + eps`.
    PowerLaw(f64),
}

impl KernelKind {
    /// Distance exponent `q` of the magnitude law.
    pub fn exponent(&self) -> f64 {
        match *self {
            KernelKind::GsaOriginal => 0.0,
            KernelKind::InverseLinear => 1.0,
            KernelKind::InverseSquare => 2.0,
            KernelKind::PowerLaw(q) => q,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::GsaOriginal => f.write_str("original"),
            KernelKind::InverseLinear => f.write_str("linear"),
            KernelKind::InverseSquare => f.write_str("square"),
            KernelKind::PowerLaw(q) => write!(f, "power:{q}"),
        }
    }
}

impl FromStr for KernelKind {
    type Err = GsaError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let kind = match lower.as_str() {
            "original" => KernelKind::GsaOriginal,
            "linear" => KernelKind::InverseLinear,
            "square" => KernelKind::InverseSquare,
            other => {
                let q = other
                    .strip_prefix("power:")
                    .and_then(|q| q.parse::<f64>().ok())
                    .ok_or_else(|| {
                        GsaError::InvalidInput(format!(
                            "unknown kernel '{s}'; valid kernels: original, linear, square, power:<q>"
                        ))
                    })?;
                KernelKind::PowerLaw(q)
            }
        };
        if let KernelKind::PowerLaw(q) = kind {
            if !q.is_finite() || q < 0.0 {
                return Err(GsaError::InvalidInput(format!(
                    "power-law exponent must be finite and >= 0, got {q}"
                )));
            }
        }
        Ok(kind)
    }
}

/// A force law plus its softening constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    kind: KernelKind,
    epsilon: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(GsaError::InvalidInput(format!(
                "epsilon must be finite and >= 0, got {epsilon}"
            )));
        }
        if let KernelKind::PowerLaw(q) = kind {
            if !q.is_finite() || q < 0.0 {
                return Err(GsaError::InvalidInput(format!(
                    "power-law exponent must be finite and >= 0, got {q}"
                )));
            }
        }
        Ok(Self { kind, epsilon })
    }

    pub fn original() -> Self {
        Self {
            kind: KernelKind::GsaOriginal,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn inverse_linear() -> Self {
        Self {
            kind: KernelKind::InverseLinear,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn inverse_square() -> Self {
        Self {
            kind: KernelKind::InverseSquare,
            epsilon: DEFAULT_EPSILON,
        }
    }

    /// Same law, different softening.
    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(self.kind, epsilon)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn exponent(&self) -> f64 {
        self.kind.exponent()
    }

    /// Short name used in CSV output and seed derivation.
    pub fn name(&self) -> String {
        self.kind.to_string()
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::original()
    }
}

/// Complete configuration of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct GsaConfig {
    pub population: usize,
    pub dims: usize,
    pub lower_bound: Vec<f64>,
    pub upper_bound: Vec<f64>,
    pub kernel: KernelSpec,
    pub g0: f64,
    pub alpha: f64,
    pub max_iters: usize,
    pub kbest_initial_fraction: f64,
    pub deterministic_weights: bool,
    pub seed: u64,
    /// Store every agent position after every step in the trace.
    pub record_positions: bool,
}

impl GsaConfig {
    /// Defaults everywhere, searching the hypercube `[lower, upper]^dims`.
    pub fn for_box(dims: usize, lower: f64, upper: f64) -> Self {
        Self {
            population: DEFAULT_POPULATION,
            dims,
            lower_bound: vec![lower; dims],
            upper_bound: vec![upper; dims],
            kernel: KernelSpec::default(),
            g0: DEFAULT_G0,
            alpha: DEFAULT_ALPHA,
            max_iters: DEFAULT_MAX_ITERS,
            kbest_initial_fraction: DEFAULT_KBEST_FRACTION,
            deterministic_weights: false,
            seed: DEFAULT_SEED,
            record_positions: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_config(self)
    }
}

/// Checks every configuration invariant and names the first one violated.
pub fn validate_config(config: &GsaConfig) -> Result<()> {
    let fail = |msg: String| Err(GsaError::InvalidConfig(msg));
    if config.population < 2 {
        return fail(format!("population ≥ 2 required (got {})", config.population));
    }
    if config.dims < 1 {
        return fail("dims ≥ 1 required".into());
    }
    if config.lower_bound.len() != config.dims || config.upper_bound.len() != config.dims {
        return fail(format!(
            "bounds must have length dims={} (lower {}, upper {})",
            config.dims,
            config.lower_bound.len(),
            config.upper_bound.len()
        ));
    }
    for (d, (&lo, &hi)) in config
        .lower_bound
        .iter()
        .zip(&config.upper_bound)
        .enumerate()
    {
        if !lo.is_finite() || !hi.is_finite() {
            return fail(format!("bounds must be finite (dimension {d})"));
        }
        if !(lo < hi) {
            return fail(format!("empty box: lower {lo} >= upper {hi} in dimension {d}"));
        }
    }
    // Re-check in case the kernel was built by struct update in this crate.
    KernelSpec::new(config.kernel.kind, config.kernel.epsilon)
        .map_err(|e| GsaError::InvalidConfig(e.to_string()))?;
    if !config.g0.is_finite() || config.g0 <= 0.0 {
        return fail(format!("g0 must be finite and > 0 (got {})", config.g0));
    }
    if !config.alpha.is_finite() || config.alpha < 0.0 {
        return fail(format!("alpha must be finite and ≥ 0 (got {})", config.alpha));
    }
    if config.max_iters < 1 {
        return fail("max_iters ≥ 1 required".into());
    }
    let frac = config.kbest_initial_fraction;
    if !frac.is_finite() || frac <= 0.0 || frac > 1.0 {
        return fail(format!("kbest_initial_fraction must lie in (0, 1] (got {frac})"));
    }
    Ok(())
}

/// Scalars recorded after each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub best_so_far: f64,
    pub population_best: f64,
    pub population_mean: f64,
}

/// Result of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub per_iteration: Vec<IterationRecord>,
    pub final_best_position: Vec<f64>,
    /// Best fitness of the freshly initialised population.
    pub initial_population_best: f64,
    /// Agent positions after each step, when `record_positions` was set.
    pub positions: Option<Vec<Vec<Vec<f64>>>>,
}

impl RunTrace {
    pub fn final_best(&self) -> f64 {
        self.per_iteration
            .last()
            .map(|r| r.best_so_far)
            .unwrap_or(self.initial_population_best)
    }
}

/// Sampled force magnitudes against distance and their log-log fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub samples: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
    pub max_residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> GsaConfig {
        let mut c = GsaConfig::for_box(1, -1.0, 1.0);
        c.population = 2;
        c
    }

    #[test]
    fn minimal_config_is_valid() {
        assert!(validate_config(&minimal()).is_ok());
    }

    #[test]
    fn population_of_one_rejected() {
        let mut c = minimal();
        c.population = 1;
        let err = validate_config(&c).unwrap_err().to_string();
        assert!(err.contains("population ≥ 2 required"), "{err}");
    }

    #[test]
    fn degenerate_box_rejected() {
        let mut c = minimal();
        c.lower_bound = vec![0.0];
        c.upper_bound = vec![0.0];
        let err = validate_config(&c).unwrap_err().to_string();
        assert!(err.contains("empty box"), "{err}");
    }

    #[test]
    fn non_finite_scalars_rejected() {
        let mut c = minimal();
        c.g0 = f64::NAN;
        assert!(validate_config(&c).is_err());
        let mut c = minimal();
        c.alpha = f64::INFINITY;
        assert!(validate_config(&c).is_err());
        let mut c = minimal();
        c.upper_bound = vec![f64::INFINITY];
        assert!(validate_config(&c).is_err());
        let mut c = minimal();
        c.kbest_initial_fraction = 0.0;
        assert!(validate_config(&c).is_err());
    }

    #[test]
    fn agent_rejects_bad_fields() {
        assert!(AgentState::new(vec![], vec![], 0.0, 1.0).is_err());
        assert!(AgentState::new(vec![0.0], vec![0.0, 1.0], 0.0, 1.0).is_err());
        assert!(AgentState::new(vec![f64::NAN], vec![0.0], 0.0, 1.0).is_err());
        assert!(AgentState::new(vec![0.0], vec![f64::INFINITY], 0.0, 1.0).is_err());
        assert!(AgentState::new(vec![0.0], vec![0.0], f64::NAN, 1.0).is_err());
        assert!(AgentState::new(vec![0.0], vec![0.0], 0.0, -1.0).is_err());
        assert!(AgentState::new(vec![0.0], vec![0.0], 0.0, f64::INFINITY).is_err());
        assert!(AgentState::new(vec![0.0], vec![0.0], 0.0, 0.0).is_ok());
    }

    #[test]
    fn kernel_rejects_bad_fields() {
        assert!(KernelSpec::new(KernelKind::GsaOriginal, -1e-3).is_err());
        assert!(KernelSpec::new(KernelKind::GsaOriginal, f64::NAN).is_err());
        assert!(KernelSpec::new(KernelKind::PowerLaw(-0.5), 0.0).is_err());
        assert!(KernelSpec::new(KernelKind::PowerLaw(f64::INFINITY), 0.0).is_err());
        assert!(KernelSpec::new(KernelKind::PowerLaw(1.5), 0.0).is_ok());
    }

    #[test]
    fn kernel_names_parse_back() {
        for kind in [
            KernelKind::GsaOriginal,
            KernelKind::InverseLinear,
            KernelKind::InverseSquare,
            KernelKind::PowerLaw(1.5),
        ] {
            assert_eq!(kind.to_string().parse::<KernelKind>().unwrap(), kind);
        }
        assert_eq!("Power:2".parse::<KernelKind>().unwrap(), KernelKind::PowerLaw(2.0));
        assert!("cubic".parse::<KernelKind>().is_err());
        assert!("power:-1".parse::<KernelKind>().is_err());
        assert!("power:".parse::<KernelKind>().is_err());
    }

    #[test]
    fn alias_exponents() {
        assert_eq!(KernelKind::GsaOriginal.exponent(), 0.0);
        assert_eq!(KernelKind::InverseLinear.exponent(), 1.0);
        assert_eq!(KernelKind::InverseSquare.exponent(), 2.0);
    }
}
