//! Gravitational search optimization with interchangeable pairwise force laws.
//!
//! The original GSA force `G·m_i·m_j/(R+ε)·(x_j − x_i)` has a magnitude that
//! does not depend on the distance between agents. This crate implements it
//! alongside corrected inverse-linear and inverse-square laws (and a general
//! power law), a log-log probe that measures a kernel's distance exponent,
//! the full optimization loop, four benchmark objectives, and a seeded
//! experiment harness.
//!
//! ```
//! use gsa_core::{probe_exponent, default_probe_grid, KernelKind, KernelSpec};
//!
//! let original = KernelSpec::new(KernelKind::GsaOriginal, 0.0).unwrap();
//! let report = probe_exponent(&original, 1.0, 1.0, 1.0, &default_probe_grid()).unwrap();
//! assert!(report.fitted_slope.abs() < 1e-9);
//! ```

pub mod engine;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod objectives;
pub mod rng;
pub mod types;

pub use engine::{compute_masses, g_schedule, kbest_size, run, run_with, Objective, SwarmState};
pub use error::{GsaError, Result};
pub use experiments::{run_grid, summarize, Execution, ExperimentPlan, ResultRow, Summary};
pub use kernels::{
    default_probe_grid, distance, force_magnitude, pairwise_force, probe_exponent, ForceLaw, ForceVector,
};
pub use objectives::{ObjectiveName, ObjectiveSpec};
pub use types::{
    validate_config, AgentState, GsaConfig, IterationRecord, KernelKind, KernelSpec, ProbeReport, RunTrace,
};
