//! Loop integrals on closed classical orbits.
//!
//! On a closed loop Γ the geometric phase `(1/ħ)∮½(p dq − q dp)` equals
//! `(1/ħ)∮p dq`, the first Poincaré integral invariant; the Bohr–Sommerfeld
//! reading asks that it be a multiple of 2π.
//!
//! Loop integrals are taken in time, `∮p dq = ∫ Σ p_j q̇_j dt`, with
//! velocities from Hamilton's equations. Whole sample intervals use
//! composite Simpson quadrature; the fractional interval up to the
//! interpolated closure time uses the cubic through four neighbouring
//! samples, so the result is fourth order in the sample spacing.

use crate::classical::ClassicalTrajectory;
use crate::closed_form::{geometric_integrand, PhaseRecord};
use crate::error::{Error, Result};
use crate::hamiltonian::PhasePoint;
use crate::quad::{cumulative_simpson, lagrange4_partial, uniform_spacing};

/// Default closure tolerance, relative to the trajectory diameter.
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;

/// A closed stretch of a sampled trajectory: from sample `start` to the
/// closure time `t_end + fraction·(t_{end+1} − t_end)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Loop {
    pub start: usize,
    pub end: usize,
    pub fraction: f64,
    /// Elapsed time around the loop.
    pub period: f64,
    /// Phase-space distance between the start point and the closure point.
    pub gap: f64,
}

impl Loop {
    /// A loop ending exactly on sample `end`.
    pub fn between_samples(traj: &ClassicalTrajectory, start: usize, end: usize) -> Result<Loop> {
        let lp = Loop {
            start,
            end,
            fraction: 0.0,
            period: 0.0,
            gap: 0.0,
        };
        lp.validate(traj)?;
        let z_end = &traj.points[end];
        Ok(Loop {
            period: traj.times[end] - traj.times[start],
            gap: z_end.distance(&traj.points[start]),
            ..lp
        })
    }

    fn validate(&self, traj: &ClassicalTrajectory) -> Result<()> {
        let n = traj.len();
        if self.start > self.end || self.end >= n {
            return Err(Error::InvalidLoop(format!(
                "indices {}..{} outside a trajectory of {n} samples",
                self.start, self.end
            )));
        }
        if !(0.0..1.0).contains(&self.fraction) {
            return Err(Error::InvalidLoop(format!("fraction {} not in [0, 1)", self.fraction)));
        }
        if self.fraction > 0.0 && self.end + 1 >= n {
            return Err(Error::InvalidLoop("closure lies past the last sample".into()));
        }
        if traj.rates.len() != n || traj.times.len() != n {
            return Err(Error::InvalidLoop("trajectory arrays have inconsistent lengths".into()));
        }
        Ok(())
    }
}

/// Cubic Hermite interpolation of the trajectory inside interval `k` at
/// fraction `s`.
fn hermite_point(traj: &ClassicalTrajectory, k: usize, s: f64) -> PhasePoint {
    let h = traj.times[k + 1] - traj.times[k];
    let (s2, s3) = (s * s, s * s * s);
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let (a, b) = (&traj.points[k], &traj.points[k + 1]);
    let (ra, rb) = (&traj.rates[k], &traj.rates[k + 1]);
    let mix = |x0: f64, x1: f64, v0: f64, v1: f64| h00 * x0 + h10 * h * v0 + h01 * x1 + h11 * h * v1;
    PhasePoint {
        q: (0..a.q.len()).map(|j| mix(a.q[j], b.q[j], ra.q[j], rb.q[j])).collect(),
        p: (0..a.p.len()).map(|j| mix(a.p[j], b.p[j], ra.p[j], rb.p[j])).collect(),
    }
}

/// Golden-section minimization of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Finds the first return of the trajectory to its initial point.
///
/// The search starts once the orbit has moved more than `100·tol` diameters
/// away from the start; the first local minimum of the distance to the
/// start is then refined on the cubic Hermite interpolant (positions and
/// Hamilton velocities), and accepted if the closest approach is below
/// `tol` times the trajectory diameter.
pub fn detect_closure(traj: &ClassicalTrajectory, tol: f64) -> Result<Option<Loop>> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("closure tolerance must be positive, got {tol}")));
    }
    let n = traj.len();
    if n < 3 {
        return Ok(None);
    }
    let diameter = traj.diameter();
    if !(diameter > 0.0) {
        return Ok(None);
    }
    let z0 = &traj.points[0];
    let d: Vec<f64> = traj.points.iter().map(|z| z.distance(z0)).collect();
    let floor = (100.0 * tol * diameter).min(0.5 * diameter);
    let Some(left) = d.iter().position(|&x| x > floor) else {
        return Ok(None);
    };
    for i in left.max(1)..n - 1 {
        if !(d[i] <= d[i - 1] && d[i] <= d[i + 1]) {
            continue;
        }
        // Minimum lies in interval i−1 or i.
        let dist2 = |k: usize, s: f64| {
            let z = hermite_point(traj, k, s);
            z.distance(z0).powi(2)
        };
        let (s_a, g_a) = golden_min(|s| dist2(i - 1, s), 0.0, 1.0);
        let (s_b, g_b) = golden_min(|s| dist2(i, s), 0.0, 1.0);
        let (k, s, g2) = if g_a <= g_b { (i - 1, s_a, g_a) } else { (i, s_b, g_b) };
        // Normalize so that the closure lies in interval `end` with fraction in [0, 1).
        let (end, fraction) = if s >= 1.0 { (k + 1, 0.0) } else { (k, s) };
        if fraction > 0.0 && end + 1 >= n {
            return Ok(None);
        }
        let gap = g2.sqrt();
        if gap > tol * diameter {
            continue;
        }
        let t_end = traj.times[end] + fraction * if fraction > 0.0 { traj.times[end + 1] - traj.times[end] } else { 0.0 };
        return Ok(Some(Loop {
            start: 0,
            end,
            fraction,
            period: t_end - traj.times[0],
            gap,
        }));
    }
    Ok(None)
}

/// `∫ f dt` over the loop for a per-sample series `f`.
fn loop_integral(traj: &ClassicalTrajectory, lp: &Loop, f: &[f64]) -> Result<f64> {
    lp.validate(traj)?;
    if lp.start == lp.end && lp.fraction == 0.0 {
        return Ok(0.0);
    }
    let last = if lp.fraction > 0.0 { lp.end + 1 } else { lp.end };
    let h = uniform_spacing(&traj.times[lp.start..=last])?;
    let cum = cumulative_simpson(&f[lp.start..=lp.end], h);
    let mut total = cum[cum.len() - 1];
    if lp.fraction > 0.0 {
        total += partial_interval(f, lp.end, lp.fraction, h);
    }
    Ok(total)
}

/// `∫_{t_k}^{t_k + s·h} f` from the cubic through four samples around
/// interval k (linear when fewer than four samples exist).
fn partial_interval(f: &[f64], k: usize, s: f64, h: f64) -> f64 {
    let n = f.len();
    if n < 4 {
        let v = f[k] + s * (f[k + 1] - f[k]);
        return 0.5 * s * h * (f[k] + v);
    }
    // Stencil j0..j0+3 containing k and k+1, centered where possible.
    let j0 = k.saturating_sub(1).min(n - 4);
    let stencil = [f[j0], f[j0 + 1], f[j0 + 2], f[j0 + 3]];
    let off = (k - j0) as f64;
    lagrange4_partial(stencil, h, off + s) - lagrange4_partial(stencil, h, off)
}

/// Value of a sampled series at the loop's closure time, by cubic
/// Lagrange interpolation.
fn value_at_closure(series: &[f64], lp: &Loop) -> f64 {
    let k = lp.end;
    if lp.fraction == 0.0 {
        return series[k];
    }
    let n = series.len();
    if n < 4 {
        return series[k] + lp.fraction * (series[k + 1] - series[k]);
    }
    let j0 = k.saturating_sub(1).min(n - 4);
    let x = (k - j0) as f64 + lp.fraction;
    let mut v = 0.0;
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (x - b as f64) / (a as f64 - b as f64);
            }
        }
        v += w * series[j0 + a];
    }
    v
}

/// `∮ Σ_j p_j dq_j` around the loop. Traversing the loop backwards in time
/// flips the sign.
pub fn loop_action(traj: &ClassicalTrajectory, lp: &Loop) -> Result<f64> {
    let f: Vec<f64> = traj
        .points
        .iter()
        .zip(&traj.rates)
        .map(|(z, r)| z.p.iter().zip(&r.q).map(|(p, dq)| p * dq).sum())
        .collect();
    loop_integral(traj, lp, &f)
}

/// `(1/ħ) ∮ ½ Σ_j (p_j dq_j − q_j dp_j)` around the loop.
pub fn symmetric_loop_action(traj: &ClassicalTrajectory, lp: &Loop, hbar: f64) -> Result<f64> {
    let f: Vec<f64> = traj
        .points
        .iter()
        .zip(&traj.rates)
        .map(|(z, r)| geometric_integrand(z, r))
        .collect();
    Ok(loop_integral(traj, lp, &f)? / hbar)
}

/// `∮ H dt` around the loop, from the energies stored in the trajectory.
pub fn loop_energy_integral(traj: &ClassicalTrajectory, lp: &Loop) -> Result<f64> {
    loop_integral(traj, lp, &traj.energies)
}

/// Geometric phase `γ(Γ) = (1/ħ) ∮ p dq`.
pub fn geometric_phase_on_loop(traj: &ClassicalTrajectory, lp: &Loop, hbar: f64) -> Result<f64> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    Ok(loop_action(traj, lp)? / hbar)
}

/// Increments of a phase record's series between the loop start and its
/// closure: `(total, dynamical, geometric)`.
pub fn record_increment_over_loop(record: &PhaseRecord, lp: &Loop) -> Result<(f64, f64, f64)> {
    let n = record.len();
    if lp.end >= n || (lp.fraction > 0.0 && lp.end + 1 >= n) || lp.start > lp.end {
        return Err(Error::InvalidLoop("loop does not fit the phase record".into()));
    }
    let inc = |s: &[f64]| value_at_closure(s, lp) - s[lp.start];
    Ok((inc(&record.total), inc(&record.dynamical), inc(&record.geometric)))
}

/// Cross-check of the loop identities against a phase record on the same
/// samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopPhaseCheck {
    /// `(1/ħ)∮p dq`.
    pub gamma: f64,
    /// Geometric increment of the record over the loop.
    pub record_geometric: f64,
    /// Total increment of the record over the loop.
    pub record_total: f64,
    /// `(∮p dq − ∮H dt)/ħ`.
    pub action_minus_energy: f64,
}

impl LoopPhaseCheck {
    /// `|γ − record geometric increment|`.
    pub fn geometric_discrepancy(&self) -> f64 {
        (self.gamma - self.record_geometric).abs()
    }

    /// `|record total increment − (∮p dq − ∮H dt)/ħ|`.
    pub fn total_discrepancy(&self) -> f64 {
        (self.record_total - self.action_minus_energy).abs()
    }
}

pub fn check_loop_phases(traj: &ClassicalTrajectory, lp: &Loop, record: &PhaseRecord, hbar: f64) -> Result<LoopPhaseCheck> {
    if record.times.len() != traj.len() || record.times.iter().zip(&traj.times).any(|(a, b)| a != b) {
        return Err(Error::InvalidLoop("phase record is not sampled on the trajectory's times".into()));
    }
    let gamma = geometric_phase_on_loop(traj, lp, hbar)?;
    let (record_total, _, record_geometric) = record_increment_over_loop(record, lp)?;
    let action_minus_energy = gamma - loop_energy_integral(traj, lp)? / hbar;
    Ok(LoopPhaseCheck {
        gamma,
        record_geometric,
        record_total,
        action_minus_energy,
    })
}

/// Nearest Bohr–Sommerfeld level: `n = round(γ/2π)`, `residual = γ − 2πn`.
pub fn bohr_sommerfeld_residual(gamma: f64) -> (i64, f64) {
    let two_pi = 2.0 * std::f64::consts::PI;
    let n = (gamma / two_pi).round();
    (n as i64, gamma - two_pi * n)
}
