//! The optimization loop.
//!
//! One step, at iteration `t`:
//!
//! 1. `Kbest` = the `kbest_size(t)` fittest agents (ties by lower index).
//! 2. For each agent `i` in index order, draw one weight per attractor
//!    `j ∈ Kbest \ {i}` (ascending `j`) and sum `w_j * f_ij`.
//! 3. For each agent `i`, for each dimension `d` ascending, draw `u`, then
//!    `v ← u·v + F/(m + δ)` and `x ← clamp(x + v)`; a clamped component has
//!    its velocity zeroed.
//! 4. Re-evaluate fitness, recompute masses, advance `G` and the iteration.
//!
//! With `deterministic_weights` every weight and every `u` is 1 and nothing
//! is drawn from the generator after initialisation.

use crate::error::{GsaError, Result};
use crate::kernels::{accumulate_pair, ForceLaw, ForceVector};
use crate::rng::SwarmRng;
use crate::types::{validate_config, AgentState, GsaConfig, IterationRecord, KernelSpec, RunTrace};

/// Softening added to the mass in the acceleration denominator.
pub const MASS_SOFTENING: f64 = 1e-12;

/// Anything that scores a point; lower is better.
pub trait Objective: Sync {
    fn value(&self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Masses from fitnesses under minimisation.
///
/// `raw_i = (worst - f_i) / (worst - best)`, then normalised to sum to one.
/// Equal fitnesses give uniform masses.
pub fn compute_masses(fitnesses: &[f64]) -> Result<Vec<f64>> {
    if fitnesses.len() < 2 {
        return Err(GsaError::InvalidInput(format!(
            "need at least 2 fitness values, got {}",
            fitnesses.len()
        )));
    }
    if let Some(f) = fitnesses.iter().find(|f| !f.is_finite()) {
        return Err(GsaError::InvalidInput(format!("non-finite fitness {f}")));
    }
    let best = fitnesses.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = fitnesses.len();
    if best == worst {
        return Ok(vec![1.0 / n as f64; n]);
    }
    // Halving keeps the span finite when the fitnesses straddle ±f64::MAX.
    let (scale, span) = match worst - best {
        s if s.is_finite() => (1.0, s),
        _ => (0.5, worst * 0.5 - best * 0.5),
    };
    let raw: Vec<f64> = fitnesses
        .iter()
        .map(|&f| (worst * scale - f * scale) / span)
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|r| r / total).collect())
}

/// `g0 · exp(−alpha · t / T)`.
pub fn g_schedule(g0: f64, alpha: f64, t: usize, max_iters: usize) -> f64 {
    g0 * (-alpha * t as f64 / max_iters as f64).exp()
}

/// Number of attracting agents at iteration `t`.
///
/// Decreases linearly from `ceil(fraction · n)` at `t = 0` to 1 at
/// `t = T − 1`, rounding half up. The interpolation is done in integers so
/// that exact halves round consistently.
pub fn kbest_size(t: usize, max_iters: usize, population: usize, initial_fraction: f64) -> usize {
    if population == 0 {
        return 0;
    }
    // The small offset keeps products like 0.3 * 50 = 15.000000000000002 at 15.
    let start = ((initial_fraction * population as f64 - 1e-9).ceil() as usize).clamp(1, population);
    if max_iters <= 1 || t + 1 >= max_iters {
        return 1;
    }
    let span = (max_iters - 1) as u128;
    let t = t as u128;
    let start = start as u128;
    // value = start − (start − 1)·t/span = numer/span
    let numer = start * span - (start - 1) * t;
    let rounded = (2 * numer + span) / (2 * span);
    (rounded as usize).clamp(1, population)
}

/// Indices sorted by ascending fitness, ties broken by ascending index.
fn rank_by_fitness(agents: &[AgentState]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..agents.len()).collect();
    order.sort_by(|&a, &b| agents[a].fitness.total_cmp(&agents[b].fitness).then(a.cmp(&b)));
    order
}

fn evaluate<O: Objective + ?Sized>(objective: &O, x: &[f64]) -> Result<f64> {
    let value = objective.value(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(GsaError::NonFiniteFitness {
            value,
            position: x.to_vec(),
        })
    }
}

/// The full mutable state of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    agents: Vec<AgentState>,
    iteration: usize,
    g_current: f64,
    best_so_far_fitness: f64,
    best_so_far_position: Vec<f64>,
    rng: SwarmRng,
}

impl SwarmState {
    /// Uniformly samples the population inside the box and scores it.
    pub fn initialize<O: Objective + ?Sized>(config: &GsaConfig, objective: &O) -> Result<Self> {
        validate_config(config)?;
        let mut rng = SwarmRng::seed_from_u64(config.seed);
        let mut agents = Vec::with_capacity(config.population);
        for _ in 0..config.population {
            let position: Vec<f64> = config
                .lower_bound
                .iter()
                .zip(&config.upper_bound)
                .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
                .collect();
            let fitness = evaluate(objective, &position)?;
            agents.push(AgentState {
                velocity: vec![0.0; position.len()],
                position,
                fitness,
                mass: 0.0,
            });
        }
        Self::assemble(agents, config, rng, true)
    }

    /// Wraps caller-supplied agents, keeping their fitnesses and masses.
    pub fn from_agents(agents: Vec<AgentState>, config: &GsaConfig) -> Result<Self> {
        validate_config(config)?;
        if agents.len() != config.population {
            return Err(GsaError::InvalidInput(format!(
                "expected {} agents, got {}",
                config.population,
                agents.len()
            )));
        }
        if let Some(a) = agents.iter().find(|a| a.dims() != config.dims) {
            return Err(GsaError::DimensionMismatch {
                expected: config.dims,
                found: a.dims(),
            });
        }
        let rng = SwarmRng::seed_from_u64(config.seed);
        Self::assemble(agents, config, rng, false)
    }

    fn assemble(
        mut agents: Vec<AgentState>,
        config: &GsaConfig,
        rng: SwarmRng,
        assign_masses: bool,
    ) -> Result<Self> {
        if assign_masses {
            let fits: Vec<f64> = agents.iter().map(|a| a.fitness).collect();
            for (a, m) in agents.iter_mut().zip(compute_masses(&fits)?) {
                a.mass = m;
            }
        }
        let best = rank_by_fitness(&agents)[0];
        Ok(Self {
            best_so_far_fitness: agents[best].fitness,
            best_so_far_position: agents[best].position.clone(),
            agents,
            iteration: 0,
            g_current: config.g0,
            rng,
        })
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn g_current(&self) -> f64 {
        self.g_current
    }

    pub fn best_so_far_fitness(&self) -> f64 {
        self.best_so_far_fitness
    }

    pub fn best_so_far_position(&self) -> &[f64] {
        &self.best_so_far_position
    }

    /// Overrides the current gravitational constant.
    pub fn set_g_current(&mut self, g: f64) -> Result<()> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(GsaError::InvalidInput(format!("G must be finite and > 0, got {g}")));
        }
        self.g_current = g;
        Ok(())
    }

    pub fn population_best(&self) -> f64 {
        self.agents.iter().map(|a| a.fitness).fold(f64::INFINITY, f64::min)
    }

    pub fn population_mean(&self) -> f64 {
        self.agents.iter().map(|a| a.fitness).sum::<f64>() / self.agents.len() as f64
    }

    /// Members of Kbest at the current iteration, in ascending index order.
    pub fn kbest_members(&self, config: &GsaConfig) -> Vec<usize> {
        let k = kbest_size(
            self.iteration,
            config.max_iters,
            self.agents.len(),
            config.kbest_initial_fraction,
        );
        let mut members = rank_by_fitness(&self.agents);
        members.truncate(k);
        members.sort_unstable();
        members
    }

    /// Total force on agent `i`, drawing its weights from the run's generator.
    pub fn total_force(&mut self, i: usize, kernel: &KernelSpec, config: &GsaConfig) -> Result<ForceVector> {
        if i >= self.agents.len() {
            return Err(GsaError::InvalidInput(format!(
                "agent index {i} out of range for population {}",
                self.agents.len()
            )));
        }
        let members = self.kbest_members(config);
        let mut out = ForceVector::zeros(config.dims);
        self.accumulate_total_force(kernel, i, &members, config.deterministic_weights, &mut out.components)?;
        Ok(out)
    }

    fn accumulate_total_force<L: ForceLaw + ?Sized>(
        &mut self,
        law: &L,
        i: usize,
        members: &[usize],
        deterministic: bool,
        out: &mut [f64],
    ) -> Result<()> {
        let g = self.g_current;
        for &j in members {
            if j == i {
                continue;
            }
            let w = if deterministic { 1.0 } else { self.rng.uniform() };
            let (ai, aj) = (&self.agents[i], &self.agents[j]);
            accumulate_pair(law, g, &ai.position, ai.mass, &aj.position, aj.mass, w, out)?;
        }
        Ok(())
    }

    /// Advances one iteration using the configured kernel.
    pub fn step<O: Objective + ?Sized>(&mut self, config: &GsaConfig, objective: &O) -> Result<IterationRecord> {
        let kernel = config.kernel;
        self.step_with(&kernel, config, objective)
    }

    /// Advances one iteration using an arbitrary force law.
    pub fn step_with<L, O>(&mut self, law: &L, config: &GsaConfig, objective: &O) -> Result<IterationRecord>
    where
        L: ForceLaw + ?Sized,
        O: Objective + ?Sized,
    {
        if self.iteration >= config.max_iters {
            return Err(GsaError::InvalidInput(format!(
                "iteration {} already reached max_iters {}",
                self.iteration, config.max_iters
            )));
        }
        let n = self.agents.len();
        let dims = config.dims;
        let deterministic = config.deterministic_weights;
        let members = self.kbest_members(config);

        let mut forces = vec![0.0; n * dims];
        for (i, force) in forces.chunks_exact_mut(dims).enumerate() {
            self.accumulate_total_force(law, i, &members, deterministic, force)?;
        }

        for (i, force) in forces.chunks_exact(dims).enumerate() {
            let inv_mass = 1.0 / (self.agents[i].mass + MASS_SOFTENING);
            for d in 0..dims {
                let u = if deterministic { 1.0 } else { self.rng.uniform() };
                let agent = &mut self.agents[i];
                let v = u * agent.velocity[d] + force[d] * inv_mass;
                let x = agent.position[d] + v;
                if !v.is_finite() || !x.is_finite() {
                    return Err(GsaError::Diverged);
                }
                let (lo, hi) = (config.lower_bound[d], config.upper_bound[d]);
                if x < lo || x > hi {
                    agent.position[d] = x.clamp(lo, hi);
                    agent.velocity[d] = 0.0;
                } else {
                    agent.position[d] = x;
                    agent.velocity[d] = v;
                }
            }
        }

        for agent in &mut self.agents {
            agent.fitness = evaluate(objective, &agent.position)?;
        }
        let fits: Vec<f64> = self.agents.iter().map(|a| a.fitness).collect();
        for (a, m) in self.agents.iter_mut().zip(compute_masses(&fits)?) {
            a.mass = m;
        }

        self.iteration += 1;
        self.g_current = g_schedule(config.g0, config.alpha, self.iteration, config.max_iters);

        let best = rank_by_fitness(&self.agents)[0];
        if self.agents[best].fitness < self.best_so_far_fitness {
            self.best_so_far_fitness = self.agents[best].fitness;
            self.best_so_far_position.clone_from(&self.agents[best].position);
        }

        Ok(IterationRecord {
            iter: self.iteration,
            best_so_far: self.best_so_far_fitness,
            population_best: self.agents[best].fitness,
            population_mean: self.population_mean(),
        })
    }

    fn positions(&self) -> Vec<Vec<f64>> {
        self.agents.iter().map(|a| a.position.clone()).collect()
    }
}

/// Initialises and performs exactly `max_iters` steps.
pub fn run<O: Objective + ?Sized>(config: &GsaConfig, objective: &O) -> Result<RunTrace> {
    let kernel = config.kernel;
    run_with(&kernel, config, objective)
}

/// As [`run`] with an arbitrary force law in place of `config.kernel`.
pub fn run_with<L, O>(law: &L, config: &GsaConfig, objective: &O) -> Result<RunTrace>
where
    L: ForceLaw + ?Sized,
    O: Objective + ?Sized,
{
    let mut state = SwarmState::initialize(config, objective)?;
    let initial_population_best = state.population_best();
    let mut per_iteration = Vec::with_capacity(config.max_iters);
    let mut positions = config.record_positions.then(|| Vec::with_capacity(config.max_iters));
    for _ in 0..config.max_iters {
        per_iteration.push(state.step_with(law, config, objective)?);
        if let Some(p) = positions.as_mut() {
            p.push(state.positions());
        }
    }
    Ok(RunTrace {
        per_iteration,
        final_best_position: state.best_so_far_position,
        initial_population_best,
        positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn masses_all_equal() {
        let m = compute_masses(&[3.0, 3.0, 3.0]).unwrap();
        for v in m {
            assert_relative_eq!(v, 1.0 / 3.0);
        }
    }

    #[test]
    fn masses_min_max_example() {
        let m = compute_masses(&[1.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(m[0], 0.6, max_relative = 1e-15);
        assert_relative_eq!(m[1], 0.4, max_relative = 1e-15);
        assert_eq!(m[2], 0.0);
    }

    #[test]
    fn masses_invariant_under_positive_affine_maps() {
        let fits = [0.3, -1.7, 5.2, 2.0, 2.0];
        let base = compute_masses(&fits).unwrap();
        for (a, b) in [(2.0, 1.0), (0.01, -30.0), (1e3, 7.0)] {
            let mapped: Vec<f64> = fits.iter().map(|f| a * f + b).collect();
            for (x, y) in compute_masses(&mapped).unwrap().iter().zip(&base) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn masses_reject_bad_input() {
        assert!(compute_masses(&[1.0]).is_err());
        assert!(compute_masses(&[1.0, f64::NAN]).is_err());
        assert!(compute_masses(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn masses_survive_extreme_spans() {
        let m = compute_masses(&[-f64::MAX, 0.0, f64::MAX]).unwrap();
        assert!(m.iter().all(|v| v.is_finite()));
        assert_relative_eq!(m.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
        assert_eq!(m[2], 0.0);
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(g_schedule(100.0, 20.0, 0, 1000), 100.0);
        assert_relative_eq!(g_schedule(100.0, 20.0, 1000, 1000), 100.0 * (-20f64).exp(), max_relative = 1e-15);
        for t in 0..10 {
            assert_eq!(g_schedule(7.0, 0.0, t, 10), 7.0);
        }
    }

    #[test]
    fn kbest_examples() {
        assert_eq!(kbest_size(0, 1000, 50, 1.0), 50);
        assert_eq!(kbest_size(999, 1000, 50, 1.0), 1);
        // midpoint of [0, T-1]: 50 - 49 * 0.5 = 25.5 -> 26
        assert_eq!(kbest_size(500, 1001, 50, 1.0), 26);
        assert_eq!(kbest_size(0, 1000, 50, 0.3), 15);
        assert_eq!(kbest_size(0, 1, 50, 1.0), 1);
    }

    #[test]
    fn kbest_matches_float_oracle_off_ties() {
        for &(n, frac, big_t) in &[(50usize, 1.0, 1000usize), (7, 0.5, 13), (30, 0.8, 200)] {
            let start = (frac * n as f64 - 1e-9).ceil();
            for t in 0..big_t {
                let expected = if t + 1 >= big_t {
                    1.0
                } else {
                    (start + (1.0 - start) * t as f64 / (big_t - 1) as f64 + 0.5).floor()
                };
                assert_eq!(kbest_size(t, big_t, n, frac), expected as usize, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn kbest_is_monotone_and_bounded() {
        let mut prev = usize::MAX;
        for t in 0..100 {
            let k = kbest_size(t, 100, 20, 1.0);
            assert!((1..=20).contains(&k));
            assert!(k <= prev);
            prev = k;
        }
    }

    #[test]
    fn initialize_is_deterministic_and_bounded() {
        let mut config = GsaConfig::for_box(30, -100.0, 100.0);
        config.seed = 9;
        let a = SwarmState::initialize(&config, &sphere).unwrap();
        let b = SwarmState::initialize(&config, &sphere).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.agents().len(), 50);
        for agent in a.agents() {
            assert!(agent.position().iter().all(|x| (-100.0..=100.0).contains(x)));
            assert!(agent.velocity().iter().all(|&v| v == 0.0));
        }
        assert_relative_eq!(a.agents().iter().map(|a| a.mass()).sum::<f64>(), 1.0, max_relative = 1e-12);
        assert_eq!(a.iteration(), 0);
        assert_eq!(a.g_current(), config.g0);
    }

    #[test]
    fn initialize_reports_non_finite_objective() {
        let config = GsaConfig::for_box(2, -1.0, 1.0);
        let err = SwarmState::initialize(&config, &|_: &[f64]| f64::NAN).unwrap_err();
        assert!(matches!(err, GsaError::NonFiniteFitness { ref position, .. } if position.len() == 2));
    }

    #[test]
    fn two_agents_total_force_is_pairwise() {
        let mut config = GsaConfig::for_box(2, -10.0, 10.0);
        config.population = 2;
        config.deterministic_weights = true;
        let agents = vec![
            AgentState::new(vec![1.0, -2.0], vec![0.0; 2], 1.0, 0.7).unwrap(),
            AgentState::new(vec![-3.0, 4.0], vec![0.0; 2], 2.0, 0.3).unwrap(),
        ];
        let mut state = SwarmState::from_agents(agents.clone(), &config).unwrap();
        let total = state.total_force(0, &config.kernel, &config).unwrap();
        let pair = crate::kernels::pairwise_force(&config.kernel, config.g0, &agents[0], &agents[1]).unwrap();
        assert_eq!(total, pair);
    }

    #[test]
    fn step_rejects_exhausted_budget() {
        let mut config = GsaConfig::for_box(2, -1.0, 1.0);
        config.population = 3;
        config.max_iters = 1;
        let mut state = SwarmState::initialize(&config, &sphere).unwrap();
        state.step(&config, &sphere).unwrap();
        assert!(state.step(&config, &sphere).is_err());
    }

    #[test]
    fn step_reports_divergence() {
        let mut config = GsaConfig::for_box(1, -f64::MAX, f64::MAX);
        config.population = 2;
        config.deterministic_weights = true;
        let big = f64::MAX * 0.9;
        let agents = vec![
            AgentState::new(vec![big], vec![big], 0.0, 0.5).unwrap(),
            AgentState::new(vec![0.0], vec![0.0], 0.0, 0.5).unwrap(),
        ];
        let mut state = SwarmState::from_agents(agents, &config).unwrap();
        let err = state.step(&config, &|_: &[f64]| 0.0).unwrap_err();
        assert!(matches!(err, GsaError::Diverged), "{err}");
    }

    #[test]
    fn run_length_matches_budget() {
        let mut config = GsaConfig::for_box(2, -5.0, 5.0);
        config.population = 5;
        config.max_iters = 1;
        assert_eq!(run(&config, &sphere).unwrap().per_iteration.len(), 1);
        config.max_iters = 17;
        let trace = run(&config, &sphere).unwrap();
        assert_eq!(trace.per_iteration.len(), 17);
        assert!(trace.positions.is_none());
        assert_eq!(trace.per_iteration.last().unwrap().iter, 17);
    }
}
