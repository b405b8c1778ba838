//! Integration of Hamilton's equations for the expectation-value flow.

use crate::error::{Error, Result};
use crate::hamiltonian::{DrivenHamiltonian, PhasePoint};

/// Classical integrator choice.
///
/// `Rk4Fixed` takes exactly one classic Runge–Kutta step per output
/// interval, so the caller controls the step through the sample grid; its
/// global error is O(dt⁴). `Rk45` is Dormand–Prince 5(4) with mixed
/// absolute/relative tolerance `tol`, landing exactly on every sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrator {
    Rk4Fixed,
    Rk45 { tol: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Rk45 { tol: 1e-10 }
    }
}

/// Samples of the classical flow with the rates `(dq/dt, dp/dt)` from
/// Hamilton's equations at each sample.
#[derive(Clone, Debug)]
pub struct ClassicalTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    pub rates: Vec<PhasePoint>,
    pub energies: Vec<f64>,
}

impl ClassicalTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_dof(&self) -> usize {
        self.points.first().map_or(0, PhasePoint::n_dof)
    }

    pub fn last(&self) -> Option<&PhasePoint> {
        self.points.last()
    }

    /// `max |E(t) − E(t₀)|`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energies.first().copied().unwrap_or(0.0);
        self.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    /// Diagonal of the phase-space bounding box.
    pub fn diameter(&self) -> f64 {
        let n = self.n_dof();
        if n == 0 {
            return 0.0;
        }
        let mut lo = vec![f64::INFINITY; 2 * n];
        let mut hi = vec![f64::NEG_INFINITY; 2 * n];
        for z in &self.points {
            for (i, x) in z.q.iter().chain(&z.p).enumerate() {
                lo[i] = lo[i].min(*x);
                hi[i] = hi[i].max(*x);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    /// Range of `q_dof` over the samples.
    pub fn q_range(&self, dof: usize) -> (f64, f64) {
        self.points
            .iter()
            .map(|z| z.q[dof])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    }
}

/// Integrates Hamilton's equations from `z0` at `t_grid[0]` and samples the
/// solution at every entry of `t_grid`.
///
/// The grid must be strictly monotone; a decreasing grid integrates
/// backwards in time.
pub fn integrate_classical(
    h: &DrivenHamiltonian,
    z0: &PhasePoint,
    t_grid: &[f64],
    method: Integrator,
) -> Result<ClassicalTrajectory> {
    if z0.n_dof() != h.n_dof() {
        return Err(Error::DimensionMismatch {
            expected: h.n_dof(),
            found: z0.n_dof(),
        });
    }
    if t_grid.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, found: 0 });
    }
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite { what: "time grid" });
    }
    if t_grid.len() > 1 {
        let forward = t_grid[1] > t_grid[0];
        if t_grid.windows(2).any(|w| if forward { w[1] <= w[0] } else { w[1] >= w[0] }) {
            return Err(Error::InvalidParameter("time grid must be strictly monotone".into()));
        }
    }
    if let Integrator::Rk45 { tol } = method {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter("adaptive tolerance must be positive".into()));
        }
    }

    let dim = 2 * h.n_dof();
    let mut y = z0.to_state_vec();
    let mut traj = ClassicalTrajectory {
        times: Vec::with_capacity(t_grid.len()),
        points: Vec::with_capacity(t_grid.len()),
        rates: Vec::with_capacity(t_grid.len()),
        energies: Vec::with_capacity(t_grid.len()),
    };
    let mut dy = vec![0.0; dim];
    let push = |traj: &mut ClassicalTrajectory, t: f64, y: &[f64], dy: &mut [f64]| {
        h.flow(t, y, dy);
        let n = h.n_dof();
        traj.times.push(t);
        traj.points.push(PhasePoint::from_state_vec(y));
        traj.rates.push(PhasePoint::from_state_vec(dy));
        traj.energies.push(h.evaluate_slices(&y[..n], &y[n..], t));
    };
    push(&mut traj, t_grid[0], &y, &mut dy);

    match method {
        Integrator::Rk4Fixed => {
            let mut stepper = Rk4::new(dim);
            for w in t_grid.windows(2) {
                stepper.step(h, w[0], w[1] - w[0], &mut y);
                if y.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NumericalFailure {
                        module: "classical integrator",
                        time: w[1],
                    });
                }
                push(&mut traj, w[1], &y, &mut dy);
            }
        }
        Integrator::Rk45 { tol } => {
            let mut stepper = DormandPrince::new(dim, tol);
            for w in t_grid.windows(2) {
                stepper.advance(h, w[0], w[1], &mut y)?;
                push(&mut traj, w[1], &y, &mut dy);
            }
        }
    }
    Ok(traj)
}

/// Classic four-stage Runge–Kutta on the packed phase-space state.
pub(crate) struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub(crate) fn new(dim: usize) -> Self {
        Rk4 {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
        }
    }

    pub(crate) fn step(&mut self, h: &DrivenHamiltonian, t: f64, dt: f64, y: &mut [f64]) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        h.flow(t, y, k1);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        h.flow(t + 0.5 * dt, tmp, k2);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        h.flow(t + 0.5 * dt, tmp, k3);
        for i in 0..y.len() {
            tmp[i] = y[i] + dt * k3[i];
        }
        h.flow(t + dt, tmp, k4);
        for i in 0..y.len() {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct DormandPrince {
    tol: f64,
    h: Option<f64>,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
}

impl DormandPrince {
    fn new(dim: usize, tol: f64) -> Self {
        DormandPrince {
            tol,
            h: None,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            y_new: vec![0.0; dim],
        }
    }

    /// Advances `y` from `t0` to exactly `t1`.
    fn advance(&mut self, ham: &DrivenHamiltonian, t0: f64, t1: f64, y: &mut [f64]) -> Result<()> {
        let span = t1 - t0;
        let dir = span.signum();
        let mut t = t0;
        let mut h = self.h.unwrap_or(span.abs().min(1e-2)) * dir;
        if h.abs() > span.abs() {
            h = span;
        }
        let mut steps = 0usize;
        while (t1 - t) * dir > 0.0 {
            let remaining = t1 - t;
            let last = h.abs() >= remaining.abs();
            let h_try = if last { remaining } else { h };
            let err = self.attempt(ham, t, h_try, y);
            if !err.is_finite() {
                h *= 0.1;
            } else if err <= 1.0 {
                t = if last { t1 } else { t + h_try };
                y.copy_from_slice(&self.y_new);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // Keep the natural step for the next interval, not the clipped one.
                if !last || h_try.abs() >= h.abs() * 0.5 {
                    h = h_try * factor;
                }
            } else {
                h = h_try * (0.9 * err.powf(-0.25)).clamp(0.1, 0.9);
            }
            steps += 1;
            if h.abs() < 1e-14 * t.abs().max(1.0) || steps > 50_000_000 {
                return Err(Error::StepUnderflow { time: t });
            }
        }
        self.h = Some(h.abs());
        Ok(())
    }

    /// One trial step; returns the scaled error norm and leaves the 5th
    /// order solution in `y_new`.
    fn attempt(&mut self, ham: &DrivenHamiltonian, t: f64, h: f64, y: &[f64]) -> f64 {
        let n = y.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let tmp = &mut self.tmp;
        ham.flow(t, y, k1);
        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        ham.flow(t + C2 * h, tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        ham.flow(t + C3 * h, tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        ham.flow(t + C4 * h, tmp, k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        ham.flow(t + C5 * h, tmp, k5);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        ham.flow(t + h, tmp, k6);
        for i in 0..n {
            self.y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        ham.flow(t + h, &self.y_new, k7);
        let mut acc = 0.0;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.tol * (1.0 + y[i].abs().max(self.y_new[i].abs()));
            acc += (e / scale).powi(2);
        }
        (acc / n as f64).sqrt()
    }
}

/// Uniform grid `t0, t0 + dt, …` with `n_intervals + 1` points.
pub fn uniform_grid(t0: f64, t1: f64, n_intervals: usize) -> Vec<f64> {
    let dt = (t1 - t0) / n_intervals as f64;
    (0..=n_intervals).map(|i| t0 + i as f64 * dt).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::models::*;
    use std::f64::consts::PI;

    #[test]
    fn rk4_closes_the_oscillator_orbit() {
        let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
        let grid = uniform_grid(0.0, 2.0 * PI, 1000);
        let traj = integrate_classical(&h, &PhasePoint::single(1.0, 0.0), &grid, Integrator::Rk4Fixed).unwrap();
        let z = traj.last().unwrap();
        assert!((z.q[0] - 1.0).abs() < 1e-8 && z.p[0].abs() < 1e-8, "{z:?}");
        // Mid-orbit matches (cos t, -sin t).
        let mid = &traj.points[250];
        assert!((mid.q[0] - (PI / 2.0).cos()).abs() < 1e-10);
        assert!((mid.p[0] + (PI / 2.0).sin()).abs() < 1e-10);
    }

    #[test]
    fn free_motion_is_exact() {
        let h = DrivenHamiltonian::time_independent(kinetic_plus_potential(1.0, &[]));
        for method in [Integrator::Rk4Fixed, Integrator::default()] {
            let traj = integrate_classical(&h, &PhasePoint::single(0.0, 1.0), &[0.0, 1.5, 3.0], method).unwrap();
            let z = traj.last().unwrap();
            assert!((z.q[0] - 3.0).abs() < 1e-14 && (z.p[0] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn henon_heiles_energy_drift_small() {
        let h = DrivenHamiltonian::time_independent(henon_heiles());
        // E = 1/12 with q = (0, 0), p2 = 0.
        let p1 = (2.0 / 12.0f64).sqrt();
        let z0 = PhasePoint::new(vec![0.0, 0.0], vec![p1, 0.0]).unwrap();
        let grid = uniform_grid(0.0, 100.0, 1000);
        let traj = integrate_classical(&h, &z0, &grid, Integrator::Rk45 { tol: 1e-10 }).unwrap();
        assert!((traj.energies[0] - 1.0 / 12.0).abs() < 1e-15);
        assert!(traj.energy_drift() < 1e-7, "drift {}", traj.energy_drift());
        // Self-consistency against a tighter tolerance.
        let tight = integrate_classical(&h, &z0, &grid, Integrator::Rk45 { tol: 1e-12 }).unwrap();
        assert!(traj.last().unwrap().distance(tight.last().unwrap()) < 1e-6);
    }

    #[test]
    fn rk4_reverses() {
        let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
        let z0 = PhasePoint::single(0.7, -0.2);
        let fwd = integrate_classical(&h, &z0, &uniform_grid(0.0, 2.0 * PI, 500), Integrator::Rk4Fixed).unwrap();
        let back = integrate_classical(&h, fwd.last().unwrap(), &uniform_grid(2.0 * PI, 0.0, 500), Integrator::Rk4Fixed).unwrap();
        assert!(back.last().unwrap().distance(&z0) < 1e-6);
    }

    #[test]
    fn zero_hamiltonian_is_constant() {
        let h = DrivenHamiltonian::time_independent(crate::poly::Poly::zero(1));
        let z0 = PhasePoint::single(0.3, 0.4);
        let traj = integrate_classical(&h, &z0, &uniform_grid(0.0, 5.0, 10), Integrator::default()).unwrap();
        assert!(traj.points.iter().all(|z| *z == z0));
    }

    #[test]
    fn rejects_bad_grids() {
        let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
        let z0 = PhasePoint::single(1.0, 0.0);
        assert!(integrate_classical(&h, &z0, &[0.0, 1.0, 1.0], Integrator::Rk4Fixed).is_err());
        assert!(integrate_classical(&h, &z0, &[0.0, 1.0], Integrator::Rk45 { tol: 0.0 }).is_err());
    }
}
