//! Benchmark objectives with known global minima.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use crate::engine::Objective;
use crate::error::{GsaError, Result};
use crate::types::GsaConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectiveName {
    Sphere,
    Rastrigin,
    Rosenbrock,
    Ackley,
}

impl ObjectiveName {
    pub const ALL: [ObjectiveName; 4] = [
        ObjectiveName::Sphere,
        ObjectiveName::Rastrigin,
        ObjectiveName::Rosenbrock,
        ObjectiveName::Ackley,
    ];

    /// Half-width of the conventional symmetric search box.
    pub fn default_half_width(self) -> f64 {
        match self {
            ObjectiveName::Sphere => 100.0,
            ObjectiveName::Rastrigin => 5.12,
            ObjectiveName::Rosenbrock => 30.0,
            ObjectiveName::Ackley => 32.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveName::Sphere => "sphere",
            ObjectiveName::Rastrigin => "rastrigin",
            ObjectiveName::Rosenbrock => "rosenbrock",
            ObjectiveName::Ackley => "ackley",
        }
    }
}

impl fmt::Display for ObjectiveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveName {
    type Err = GsaError;

    fn from_str(s: &str) -> Result<Self> {
        ObjectiveName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                GsaError::InvalidInput(format!(
                    "unknown function '{s}'; valid functions: sphere, rastrigin, rosenbrock, ackley"
                ))
            })
    }
}

/// A benchmark function at a fixed dimensionality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveSpec {
    pub name: ObjectiveName,
    pub dims: usize,
}

impl ObjectiveSpec {
    pub fn new(name: ObjectiveName, dims: usize) -> Result<Self> {
        if dims == 0 {
            return Err(GsaError::InvalidInput("objective dims must be ≥ 1".into()));
        }
        Ok(Self { name, dims })
    }

    pub fn default_lower(&self) -> f64 {
        -self.name.default_half_width()
    }

    pub fn default_upper(&self) -> f64 {
        self.name.default_half_width()
    }

    /// Default run configuration over this function's conventional box.
    pub fn default_config(&self) -> GsaConfig {
        GsaConfig::for_box(self.dims, self.default_lower(), self.default_upper())
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims {
            return Err(GsaError::DimensionMismatch {
                expected: self.dims,
                found: x.len(),
            });
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(GsaError::InvalidInput(format!("non-finite coordinate {v}")));
        }
        Ok(raw_value(self.name, x))
    }
}

impl Objective for ObjectiveSpec {
    fn value(&self, x: &[f64]) -> f64 {
        raw_value(self.name, x)
    }
}

fn raw_value(name: ObjectiveName, x: &[f64]) -> f64 {
    match name {
        ObjectiveName::Sphere => x.iter().map(|v| v * v).sum(),
        ObjectiveName::Rastrigin => x
            .iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
            .sum(),
        ObjectiveName::Rosenbrock => x
            .windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum(),
        ObjectiveName::Ackley => {
            let n = x.len() as f64;
            let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
            let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
            -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
        }
    }
}
