//! Pairwise force laws and the log-log exponent probe.
//!
//! Every kernel computes `f_ij = G * m_i * m_j / (R^(q+1) + eps) * (x_j - x_i)`.
//! With `q = 0` this is the original GSA expression, whose magnitude
//! `G * m_i * m_j * R / (R + eps)` does not depend on `R` once `eps = 0`.
//! `q = 1` and `q = 2` normalise the displacement into a unit vector and give
//! inverse-linear and inverse-square magnitudes respectively.

use crate::error::{GsaError, Result};
use crate::types::{AgentState, KernelSpec, ProbeReport};

/// Force on agent `i` exerted by agent `j`, one component per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceVector {
    pub components: Vec<f64>,
}

impl ForceVector {
    pub fn zeros(dims: usize) -> Self {
        Self {
            components: vec![0.0; dims],
        }
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dims(&self) -> usize {
        self.components.len()
    }
}

/// A scalar force law: the factor multiplying the displacement `x_j - x_i`.
///
/// The engine is generic over this trait so that force laws can be swapped
/// without touching the control flow.
pub trait ForceLaw: Sync {
    /// `distance` is strictly positive; coincident agents never reach here.
    fn coefficient(&self, g: f64, mass_product: f64, distance: f64) -> f64;
}

/// `R^(q+1)` with exact multiplication for small integral exponents.
#[inline]
fn denominator_power(distance: f64, q: f64) -> f64 {
    if q == 0.0 {
        distance
    } else if q.fract() == 0.0 && q <= 16.0 {
        distance.powi(q as i32 + 1)
    } else {
        distance.powf(q + 1.0)
    }
}

impl ForceLaw for KernelSpec {
    #[inline]
    fn coefficient(&self, g: f64, mass_product: f64, distance: f64) -> f64 {
        g * mass_product / (denominator_power(distance, self.exponent()) + self.epsilon())
    }
}

/// Euclidean distance between two points.
pub fn distance(x_i: &[f64], x_j: &[f64]) -> Result<f64> {
    if x_i.len() != x_j.len() {
        return Err(GsaError::DimensionMismatch {
            expected: x_i.len(),
            found: x_j.len(),
        });
    }
    Ok(squared_distance(x_i, x_j).sqrt())
}

#[inline]
pub(crate) fn squared_distance(x_i: &[f64], x_j: &[f64]) -> f64 {
    x_i.iter()
        .zip(x_j)
        .map(|(a, b)| {
            let d = b - a;
            d * d
        })
        .sum()
}

/// Adds `weight * f_ij` into `out`. Returns `ForceOverflow` if any
/// resulting component stops being finite.
///
/// Identical positions contribute nothing, for every law and every epsilon.
pub(crate) fn accumulate_pair<L: ForceLaw + ?Sized>(
    law: &L,
    g: f64,
    x_i: &[f64],
    m_i: f64,
    x_j: &[f64],
    m_j: f64,
    weight: f64,
    out: &mut [f64],
) -> Result<()> {
    let r = squared_distance(x_i, x_j).sqrt();
    if r == 0.0 {
        return Ok(());
    }
    // m_i * m_j is commutative in IEEE arithmetic, which keeps f_ij = -f_ji exact.
    let coef = law.coefficient(g, m_i * m_j, r);
    if !coef.is_finite() {
        return Err(GsaError::ForceOverflow);
    }
    let scale = weight * coef;
    for ((o, a), b) in out.iter_mut().zip(x_i).zip(x_j) {
        *o += scale * (b - a);
        if !o.is_finite() {
            return Err(GsaError::ForceOverflow);
        }
    }
    Ok(())
}

/// Force exerted on `agent_i` by `agent_j` under `kernel` with constant `g`.
pub fn pairwise_force(
    kernel: &KernelSpec,
    g: f64,
    agent_i: &AgentState,
    agent_j: &AgentState,
) -> Result<ForceVector> {
    pairwise_force_with(kernel, g, agent_i, agent_j)
}

/// As [`pairwise_force`] for an arbitrary [`ForceLaw`].
pub fn pairwise_force_with<L: ForceLaw + ?Sized>(
    law: &L,
    g: f64,
    agent_i: &AgentState,
    agent_j: &AgentState,
) -> Result<ForceVector> {
    if agent_i.dims() != agent_j.dims() {
        return Err(GsaError::DimensionMismatch {
            expected: agent_i.dims(),
            found: agent_j.dims(),
        });
    }
    let mut force = ForceVector::zeros(agent_i.dims());
    accumulate_pair(
        law,
        g,
        agent_i.position(),
        agent_i.mass(),
        agent_j.position(),
        agent_j.mass(),
        1.0,
        &mut force.components,
    )?;
    Ok(force)
}

/// Euclidean norm of [`pairwise_force`].
pub fn force_magnitude(
    kernel: &KernelSpec,
    g: f64,
    agent_i: &AgentState,
    agent_j: &AgentState,
) -> Result<f64> {
    pairwise_force(kernel, g, agent_i, agent_j).map(|f| f.norm())
}

/// 25 distances log-spaced over `[1e-3, 1e6]`.
pub fn default_probe_grid() -> Vec<f64> {
    log_spaced(1e-3, 1e6, 25)
}

/// `count` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
            .collect(),
    }
}

/// Measures the kernel's effective distance exponent.
///
/// Agent `i` sits at the origin and agent `j` at `(r, 0)` for each `r`; the
/// magnitudes are fitted by ordinary least squares as
/// `ln|f| = intercept + slope * ln r`.
pub fn probe_exponent(
    kernel: &KernelSpec,
    g: f64,
    m_i: f64,
    m_j: f64,
    r_values: &[f64],
) -> Result<ProbeReport> {
    if !(m_i > 0.0 && m_i.is_finite() && m_j > 0.0 && m_j.is_finite()) {
        return Err(GsaError::InvalidInput(format!(
            "probe masses must be finite and > 0 (got {m_i}, {m_j})"
        )));
    }
    if !(g > 0.0 && g.is_finite()) {
        return Err(GsaError::InvalidInput(format!("probe G must be finite and > 0 (got {g})")));
    }
    if let Some(&r) = r_values.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(GsaError::InvalidInput(format!(
            "probe distances must be finite and > 0 (got {r})"
        )));
    }
    let distinct = r_values.iter().any(|&r| r != r_values[0]);
    if r_values.len() < 2 || !distinct {
        return Err(GsaError::InvalidInput(
            "probe needs at least 2 distinct distances".into(),
        ));
    }

    let origin = AgentState::at(vec![0.0, 0.0], m_i)?;
    let mut samples = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let other = AgentState::at(vec![r, 0.0], m_j)?;
        let magnitude = force_magnitude(kernel, g, &origin, &other)?;
        if !(magnitude > 0.0) || !magnitude.is_finite() {
            return Err(GsaError::InvalidInput(format!(
                "force magnitude {magnitude} at r={r} cannot be log-fitted"
            )));
        }
        samples.push((r, magnitude));
    }

    let points: Vec<(f64, f64)> = samples.iter().map(|&(r, m)| (r.ln(), m.ln())).collect();
    let (slope, intercept) = least_squares_line(&points);
    let max_residual = points
        .iter()
        .map(|&(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);

    Ok(ProbeReport {
        samples,
        fitted_slope: slope,
        fitted_intercept: intercept,
        max_residual,
    })
}

/// Unweighted OLS fit `y = intercept + slope * x`; returns `(slope, intercept)`.
fn least_squares_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        let dx = x - mean_x;
        (sxy + dx * (y - mean_y), sxx + dx * dx)
    });
    let slope = sxy / sxx;
    (slope, mean_y - slope * mean_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::KernelKind;
    use approx::assert_relative_eq;

    fn kernel(kind: KernelKind, eps: f64) -> KernelSpec {
        KernelSpec::new(kind, eps).unwrap()
    }

    fn agent(p: &[f64], m: f64) -> AgentState {
        AgentState::at(p.to_vec(), m).unwrap()
    }

    const ALL_KINDS: [KernelKind; 4] = [
        KernelKind::GsaOriginal,
        KernelKind::InverseLinear,
        KernelKind::InverseSquare,
        KernelKind::PowerLaw(1.5),
    ];

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert!(distance(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn zero_mass_gives_zero_force() {
        for kind in ALL_KINDS {
            let f = pairwise_force(&kernel(kind, 0.0), 2.0, &agent(&[1.0, 2.0], 0.0), &agent(&[-3.0, 7.0], 4.0))
                .unwrap();
            assert!(f.components.iter().all(|&c| c == 0.0));
        }
    }

    #[test]
    fn original_kernel_example() {
        let f = pairwise_force(
            &kernel(KernelKind::GsaOriginal, 0.0),
            2.0,
            &agent(&[0.0, 0.0], 3.0),
            &agent(&[3.0, 4.0], 4.0),
        )
        .unwrap();
        assert_relative_eq!(f.components[0], 14.4, max_relative = 1e-15);
        assert_relative_eq!(f.components[1], 19.2, max_relative = 1e-15);
        assert_relative_eq!(f.norm(), 24.0, max_relative = 1e-15);

        let far = force_magnitude(
            &kernel(KernelKind::GsaOriginal, 0.0),
            2.0,
            &agent(&[0.0, 0.0], 3.0),
            &agent(&[30.0, 40.0], 4.0),
        )
        .unwrap();
        assert_relative_eq!(far, 24.0, max_relative = 1e-15);
    }

    #[test]
    fn inverse_square_example() {
        let f = pairwise_force(
            &kernel(KernelKind::InverseSquare, 0.0),
            2.0,
            &agent(&[0.0, 0.0], 3.0),
            &agent(&[3.0, 4.0], 4.0),
        )
        .unwrap();
        assert_relative_eq!(f.components[0], 0.576, max_relative = 1e-15);
        assert_relative_eq!(f.components[1], 0.768, max_relative = 1e-15);
        assert_relative_eq!(f.norm(), 0.96, max_relative = 1e-15);
    }

    #[test]
    fn magnitude_examples() {
        let one = force_magnitude(
            &kernel(KernelKind::GsaOriginal, 0.0),
            1.0,
            &agent(&[0.0], 1.0),
            &agent(&[1e6], 1.0),
        )
        .unwrap();
        assert_relative_eq!(one, 1.0, max_relative = 1e-15);

        let lin = force_magnitude(
            &kernel(KernelKind::InverseLinear, 0.0),
            1.0,
            &agent(&[0.0, 0.0], 1.0),
            &agent(&[0.0, 4.0], 1.0),
        )
        .unwrap();
        assert_relative_eq!(lin, 0.25, max_relative = 1e-15);
    }

    #[test]
    fn coincident_agents_feel_nothing() {
        for kind in ALL_KINDS {
            for eps in [0.0, 1e-12, 1.0] {
                let a = agent(&[1.5, -2.0], 1.0);
                let f = pairwise_force(&kernel(kind, eps), 1.0, &a, &a.clone()).unwrap();
                assert_eq!(f.norm(), 0.0);
            }
        }
    }

    #[test]
    fn unit_distance_makes_all_kernels_agree() {
        let ai = agent(&[0.0, 0.0, 0.0], 2.0);
        let aj = agent(&[0.6, 0.0, 0.8], 5.0);
        let reference = pairwise_force(&kernel(KernelKind::GsaOriginal, 0.0), 3.0, &ai, &aj).unwrap();
        for kind in ALL_KINDS {
            let f = pairwise_force(&kernel(kind, 0.0), 3.0, &ai, &aj).unwrap();
            for (a, b) in f.components.iter().zip(&reference.components) {
                assert_relative_eq!(a, b, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let r = pairwise_force(&KernelSpec::original(), 1.0, &agent(&[0.0], 1.0), &agent(&[0.0, 1.0], 1.0));
        assert!(matches!(r, Err(GsaError::DimensionMismatch { .. })));
    }

    #[test]
    fn underflowing_denominator_reports_overflow() {
        let r = pairwise_force(
            &kernel(KernelKind::InverseSquare, 0.0),
            1.0,
            &agent(&[0.0], 1.0),
            &agent(&[1e-120], 1.0),
        );
        assert!(matches!(r, Err(GsaError::ForceOverflow)));
        assert!(pairwise_force(&KernelSpec::inverse_square(), 1.0, &agent(&[0.0], 1.0), &agent(&[1e-120], 1.0)).is_ok());
    }

    #[test]
    fn epsilon_continuity() {
        let ai = agent(&[0.1, -0.2], 1.3);
        let aj = agent(&[0.4, 0.2], 0.7);
        for kind in ALL_KINDS {
            let exact = pairwise_force(&kernel(kind, 0.0), 1.0, &ai, &aj).unwrap();
            let errs: Vec<f64> = [1e-6, 1e-9, 1e-12]
                .iter()
                .map(|&eps| {
                    let f = pairwise_force(&kernel(kind, eps), 1.0, &ai, &aj).unwrap();
                    f.components
                        .iter()
                        .zip(&exact.components)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            assert!(errs[0] > errs[1] && errs[1] >= errs[2], "{kind:?}: {errs:?}");
            assert!(errs[2] < 1e-10);
        }
    }

    #[test]
    fn magnitude_is_rotation_invariant_in_2d() {
        for kind in ALL_KINDS {
            let k = kernel(kind, 0.0);
            let base = force_magnitude(&k, 1.0, &agent(&[0.0, 0.0], 1.0), &agent(&[2.5, 0.0], 1.0)).unwrap();
            for step in 0..12 {
                let theta = step as f64 * std::f64::consts::PI / 6.0;
                let p = [2.5 * theta.cos(), 2.5 * theta.sin()];
                let m = force_magnitude(&k, 1.0, &agent(&[0.0, 0.0], 1.0), &agent(&p, 1.0)).unwrap();
                assert_relative_eq!(m, base, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn probe_slopes() {
        let grid = [1e-3, 1.0, 1e3, 1e6];
        for (kind, expected) in [
            (KernelKind::GsaOriginal, 0.0),
            (KernelKind::InverseLinear, -1.0),
            (KernelKind::InverseSquare, -2.0),
            (KernelKind::PowerLaw(1.5), -1.5),
        ] {
            let report = probe_exponent(&kernel(kind, 0.0), 1.0, 1.0, 1.0, &grid).unwrap();
            assert!((report.fitted_slope - expected).abs() < 1e-9, "{kind:?}: {}", report.fitted_slope);
            assert!(report.max_residual < 1e-9);
            assert_eq!(report.samples.len(), 4);
        }
    }

    #[test]
    fn probe_intercept_is_log_of_mass_product() {
        let report =
            probe_exponent(&kernel(KernelKind::PowerLaw(1.5), 0.0), 2.0, 3.0, 4.0, &default_probe_grid()).unwrap();
        assert_relative_eq!(report.fitted_intercept, 24f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn probe_rejects_bad_grids() {
        let k = KernelSpec::original();
        assert!(probe_exponent(&k, 1.0, 1.0, 1.0, &[1.0]).is_err());
        assert!(probe_exponent(&k, 1.0, 1.0, 1.0, &[2.0, 2.0]).is_err());
        assert!(probe_exponent(&k, 1.0, 1.0, 1.0, &[0.0, 1.0]).is_err());
        assert!(probe_exponent(&k, 1.0, 1.0, 1.0, &[-1.0, 1.0]).is_err());
        assert!(probe_exponent(&k, 1.0, 0.0, 1.0, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn default_grid_spans_nine_decades() {
        let g = default_probe_grid();
        assert_eq!(g.len(), 25);
        assert_relative_eq!(g[0], 1e-3, max_relative = 1e-14);
        assert_relative_eq!(g[24], 1e6, max_relative = 1e-14);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
