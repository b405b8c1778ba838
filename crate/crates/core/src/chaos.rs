//! Sensitivity diagnostics: finite-time Lyapunov exponents of the classical
//! flow and divergence of λ = 0 wavefunctions in the metric distance
//! `d(ψ₁, ψ₂) = 1 − |⟨ψ₁|ψ₂⟩|²`.
//!
//! At λ = 0 the wavefunction rides the classical trajectory, so two
//! Gaussian wavefunctions of width σ (per degree of freedom) centered at
//! `(Q₁, P₁)` and `(Q₂, P₂)` are at distance
//!
//! ```text
//! d = 1 − exp(−Σ_j [ΔQ_j²/(4σ²) + σ² ΔP_j²/ħ²])
//! ```
//!
//! independent of their phases. For small separations `d ∝ |Δz|²`, so its
//! logarithmic growth rate is twice the Lyapunov exponent.

use crate::classical::{ClassicalTrajectory, Rk4};
use crate::closed_form::propagate_closed_form;
use crate::error::{Error, Result};
use crate::grid::GridState;
use crate::hamiltonian::{DrivenHamiltonian, PhasePoint};
use crate::propagator::{propagate_from, PropagationConfig, Scheme, SplitOrder};
use crate::quantize::GeneratorMode;

/// Largest phase-space norm before a trajectory counts as escaped.
pub const ESCAPE_NORM: f64 = 1e8;

/// Distance saturation cut used by [`divergence_rate_fit`].
pub const SATURATION_CUT: f64 = 0.9;

/// Two-trajectory Benettin estimate of the largest Lyapunov exponent.
///
/// Both trajectories advance by fixed RK4 steps of `dt` from `t = 0`; every
/// `renorm_every` steps the separation is measured, its log-growth
/// accumulated, and the perturbed trajectory pulled back to distance
/// `delta0` along the current separation direction. The initial
/// separation points along the diagonal of phase space. Returns the
/// accumulated log-growth divided by the elapsed time.
pub fn ftle_benettin(h: &DrivenHamiltonian, z0: &PhasePoint, t_total: f64, dt: f64, renorm_every: usize, delta0: f64) -> Result<f64> {
    if z0.n_dof() != h.n_dof() {
        return Err(Error::DimensionMismatch {
            expected: h.n_dof(),
            found: z0.n_dof(),
        });
    }
    if !(dt > 0.0 && t_total > 0.0 && delta0 > 0.0) || renorm_every == 0 {
        return Err(Error::InvalidParameter(
            "dt, total time, delta0 and renorm_every must be positive".into(),
        ));
    }
    let n_steps = (t_total / dt).round() as usize;
    let n_renorm = n_steps / renorm_every;
    if n_renorm < 50 {
        return Err(Error::InvalidParameter(format!(
            "only {n_renorm} renormalizations fit in the run; need at least 50"
        )));
    }
    let dim = 2 * h.n_dof();
    let mut a = z0.to_state_vec();
    let dir = 1.0 / (dim as f64).sqrt();
    let mut b: Vec<f64> = a.iter().map(|x| x + delta0 * dir).collect();
    let mut stepper = Rk4::new(dim);
    let mut log_sum = 0.0;
    let mut t = 0.0;
    for r in 0..n_renorm {
        for s in 0..renorm_every {
            let i = r * renorm_every + s;
            t = i as f64 * dt;
            stepper.step(h, t, dt, &mut a);
            stepper.step(h, t, dt, &mut b);
        }
        t = ((r + 1) * renorm_every) as f64 * dt;
        let norm_a = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm_a.is_finite() || norm_a > ESCAPE_NORM || b.iter().any(|x| !x.is_finite()) {
            return Err(Error::Escape { time: t });
        }
        let sep = a.iter().zip(&b).map(|(x, y)| (y - x).powi(2)).sum::<f64>().sqrt();
        if !(sep > 0.0) {
            return Err(Error::NumericalFailure {
                module: "chaos-diagnostics",
                time: t,
            });
        }
        log_sum += (sep / delta0).ln();
        let s = delta0 / sep;
        for (x, y) in a.iter().zip(b.iter_mut()) {
            *y = x + (*y - x) * s;
        }
    }
    Ok(log_sum / t)
}

/// Wavefunction shape for [`wavefunction_divergence`].
#[derive(Clone, Copy, Debug)]
pub enum Envelope<'a> {
    /// Gaussian of position spread σ in every degree of freedom; distances
    /// are evaluated analytically from the two trajectories.
    Gaussian { sigma: f64 },
    /// Any centered grid envelope (one degree of freedom).
    Grid(&'a GridState),
}

/// How the two wavefunctions are evolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DivergenceEngine {
    /// Exact λ = 0 solutions from the classical flow, `substeps` RK4 steps
    /// per output interval.
    ClosedForm { substeps: usize },
    /// Grid propagation of the λ = 0 equation with `steps_per_sample`
    /// split-step steps per output interval (grid envelope, one degree of
    /// freedom, separable Hamiltonian).
    PdeLambda0 { steps_per_sample: usize },
}

/// Displaced-Gaussian metric distance for trajectories `a`, `b`.
pub fn gaussian_distance(a: &PhasePoint, b: &PhasePoint, sigma: f64, hbar: f64) -> f64 {
    let s2 = sigma * sigma;
    let expo: f64 = a
        .q
        .iter()
        .zip(&b.q)
        .map(|(x, y)| (x - y).powi(2) / (4.0 * s2))
        .chain(a.p.iter().zip(&b.p).map(|(x, y)| s2 * (x - y).powi(2) / (hbar * hbar)))
        .sum();
    -(-expo).exp_m1()
}

/// Metric distance between the wavefunctions started from `z0` and
/// `z0 + dz` with a common envelope, sampled on the uniform `t_grid`.
pub fn wavefunction_divergence(
    h: &DrivenHamiltonian,
    envelope: Envelope<'_>,
    z0: &PhasePoint,
    dz: &PhasePoint,
    t_grid: &[f64],
    hbar: f64,
    engine: DivergenceEngine,
) -> Result<Vec<f64>> {
    if dz.n_dof() != z0.n_dof() {
        return Err(Error::DimensionMismatch {
            expected: z0.n_dof(),
            found: dz.n_dof(),
        });
    }
    let z1 = z0.offset(dz);
    match (engine, envelope) {
        (DivergenceEngine::ClosedForm { substeps }, Envelope::Gaussian { sigma }) => {
            if !(sigma > 0.0) {
                return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
            }
            let a = propagate_closed_form(h, None, z0, t_grid, substeps, hbar)?.trajectory;
            let b = propagate_closed_form(h, None, &z1, t_grid, substeps, hbar)?.trajectory;
            Ok(pairwise(&a, &b, |x, y| gaussian_distance(x, y, sigma, hbar)))
        }
        (DivergenceEngine::ClosedForm { substeps }, Envelope::Grid(env)) => {
            let a = propagate_closed_form(h, Some(env), z0, t_grid, substeps, hbar)?.states;
            let b = propagate_closed_form(h, Some(env), &z1, t_grid, substeps, hbar)?.states;
            a.iter().zip(&b).map(|(x, y)| x.metric_distance(y)).collect()
        }
        (DivergenceEngine::PdeLambda0 { steps_per_sample }, Envelope::Grid(env)) => {
            if h.n_dof() != 1 || !h.is_separable() {
                return Err(Error::InvalidParameter(
                    "the PDE engine needs a separable one-degree-of-freedom Hamiltonian".into(),
                ));
            }
            if steps_per_sample == 0 || t_grid.len() < 2 {
                return Err(Error::InvalidParameter("need positive steps per sample and two or more samples".into()));
            }
            let dt = (t_grid[1] - t_grid[0]) / steps_per_sample as f64;
            let config = PropagationConfig {
                lambda: 0.0,
                mode: GeneratorMode::Interpolating,
                dt,
                scheme: Scheme::SplitStep,
                splitting: SplitOrder::Strang,
                snapshot_stride: steps_per_sample,
                record_stride: steps_per_sample,
                ..Default::default()
            };
            // Start states from the closed form at t_grid[0].
            let start = &t_grid[..1];
            let s_a = propagate_closed_form(h, Some(env), z0, start, 1, hbar)?.states.remove(0);
            let s_b = propagate_closed_form(h, Some(env), &z1, start, 1, hbar)?.states.remove(0);
            let t_end = t_grid[t_grid.len() - 1];
            let ra = propagate_from(h, &s_a, t_grid[0], t_end, &config, hbar)?;
            let rb = propagate_from(h, &s_b, t_grid[0], t_end, &config, hbar)?;
            if ra.snapshots.len() != t_grid.len() {
                return Err(Error::NonUniformSampling);
            }
            ra.snapshots
                .iter()
                .zip(&rb.snapshots)
                .map(|((_, x), (_, y))| x.metric_distance(y))
                .collect()
        }
        (DivergenceEngine::PdeLambda0 { .. }, Envelope::Gaussian { .. }) => Err(Error::InvalidParameter(
            "the PDE engine needs a grid envelope".into(),
        )),
    }
}

fn pairwise(a: &ClassicalTrajectory, b: &ClassicalTrajectory, f: impl Fn(&PhasePoint, &PhasePoint) -> f64) -> Vec<f64> {
    a.points.iter().zip(&b.points).map(|(x, y)| f(x, y)).collect()
}

/// Least-squares slope of `ln d` against t over samples with
/// `t_start ≤ t ≤ t_end` and `0 < d < 0.9`.
pub fn divergence_rate_fit(d: &[f64], t: &[f64], window: (f64, f64)) -> Result<f64> {
    if d.len() != t.len() {
        return Err(Error::InvalidParameter(format!("{} distances for {} times", d.len(), t.len())));
    }
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(d)
        .filter(|(&ti, &di)| ti >= window.0 && ti <= window.1 && di > 0.0 && di < SATURATION_CUT)
        .map(|(&ti, &di)| (ti, di.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::EmptyWindow);
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::EmptyWindow);
    }
    Ok(sxy / sxx)
}

/// First sample time at which `d` reaches `level`, if any.
pub fn first_crossing(d: &[f64], t: &[f64], level: f64) -> Option<f64> {
    d.iter().zip(t).find(|(&di, _)| di >= level).map(|(_, &ti)| ti)
}
