//! Fixtures shared by the criterion benches.

use gsa_core::rng::SwarmRng;
use gsa_core::{AgentState, GsaConfig, KernelSpec};

/// Two agents at unit distance-scale in `dims` dimensions with unit masses.
pub fn agent_pair(dims: usize, seed: u64) -> (AgentState, AgentState) {
    let mut rng = SwarmRng::seed_from_u64(seed);
    let mut point = || (0..dims).map(|_| rng.uniform_in(-1.0, 1.0)).collect::<Vec<_>>();
    let (a, b) = (point(), point());
    (
        AgentState::at(a, 1.0).expect("finite fixture"),
        AgentState::at(b, 1.0).expect("finite fixture"),
    )
}

/// Run configuration on a symmetric box with a fixed seed.
pub fn swarm_config(kernel: KernelSpec, population: usize, dims: usize, iters: usize) -> GsaConfig {
    let mut config = GsaConfig::for_box(dims, -100.0, 100.0);
    config.kernel = kernel;
    config.population = population;
    config.max_iters = iters;
    config
}

/// The three named kernels with the default epsilon.
pub fn named_kernels() -> [KernelSpec; 3] {
    [KernelSpec::original(), KernelSpec::inverse_linear(), KernelSpec::inverse_square()]
}
