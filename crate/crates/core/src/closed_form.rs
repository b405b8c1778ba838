//! Exact solutions of the λ = 0 (classical) wave equation.
//!
//! For `H = Σ p_j²/2m_j + V(q, t)` the classical Schrödinger equation
//!
//! ```text
//! iħ (∂_t + ⟨p⟩/m ∂_q) ψ = [V(⟨q⟩) + V'(⟨q⟩)(q − ⟨q⟩) − ⟨p⟩²/2m] ψ
//! ```
//!
//! is solved by any centered envelope ψ₀ carried along a classical
//! trajectory:
//!
//! ```text
//! ψ(q, t) = e^{iφ(t)} e^{−i⟨p⟩⟨q⟩/2ħ} e^{i⟨p⟩q/ħ} ψ₀(q − ⟨q⟩)
//! φ(t) = (1/ħ) ∫ [½(⟨p⟩ d⟨q⟩/dt − ⟨q⟩ d⟨p⟩/dt) − H(⟨q⟩, ⟨p⟩, τ)] dτ
//! ```
//!
//! The phase splits into a geometric part (the ½(p dq − q dp) term) and a
//! dynamical part (−∫H dτ / ħ).

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;

use crate::classical::{integrate_classical, ClassicalTrajectory, Integrator};
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridState;
use crate::hamiltonian::{DrivenHamiltonian, PhasePoint};
use crate::poly::{Coordinate, PolyObservable};
use crate::quad::{cumulative_simpson, uniform_spacing};

/// Tolerance on the envelope's expectation values.
pub const CENTERING_TOL: f64 = 1e-8;

/// Phase accumulated along a trajectory, in radians.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseRecord {
    pub times: Vec<f64>,
    pub total: Vec<f64>,
    pub dynamical: Vec<f64>,
    pub geometric: Vec<f64>,
}

/// CSV header of [`PhaseRecord::write_csv`].
pub const PHASE_CSV_HEADER: &str = "t,total,dynamical,geometric";

impl PhaseRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        let mut s = String::with_capacity(80 * (self.len() + 1));
        s.push_str(PHASE_CSV_HEADER);
        s.push('\n');
        for i in 0..self.len() {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e}",
                self.times[i], self.total[i], self.dynamical[i], self.geometric[i]
            );
        }
        w.write_all(s.as_bytes())
    }

    /// Every `stride`-th sample, starting with the first.
    pub fn subsampled(&self, stride: usize) -> PhaseRecord {
        let pick = |v: &[f64]| v.iter().step_by(stride.max(1)).copied().collect();
        PhaseRecord {
            times: pick(&self.times),
            total: pick(&self.total),
            dynamical: pick(&self.dynamical),
            geometric: pick(&self.geometric),
        }
    }
}

/// The integrand `½ Σ_j (p_j q̇_j − q_j ṗ_j)` of the geometric phase.
pub(crate) fn geometric_integrand(z: &PhasePoint, rate: &PhasePoint) -> f64 {
    0.5 * z
        .q
        .iter()
        .zip(&z.p)
        .zip(rate.q.iter().zip(&rate.p))
        .map(|((q, p), (dq, dp))| p * dq - q * dp)
        .sum::<f64>()
}

/// Accumulates the phase along a uniformly sampled trajectory by composite
/// Simpson quadrature, with velocities taken from Hamilton's equations.
/// The total phase is integrated independently of its two parts.
pub fn phase_integral(traj: &ClassicalTrajectory, h: &DrivenHamiltonian, hbar: f64) -> Result<PhaseRecord> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    if traj.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, found: 0 });
    }
    if traj.n_dof() != h.n_dof() {
        return Err(Error::DimensionMismatch {
            expected: h.n_dof(),
            found: traj.n_dof(),
        });
    }
    let dt = uniform_spacing(&traj.times)?;
    let geo: Vec<f64> = traj
        .points
        .iter()
        .zip(&traj.rates)
        .map(|(z, r)| geometric_integrand(z, r))
        .collect();
    let dyn_: Vec<f64> = traj
        .points
        .iter()
        .zip(&traj.times)
        .map(|(z, &t)| -h.evaluate_slices(&z.q, &z.p, t))
        .collect();
    let tot: Vec<f64> = geo.iter().zip(&dyn_).map(|(g, d)| g + d).collect();
    let scale = |v: Vec<f64>| v.into_iter().map(|x| x / hbar).collect::<Vec<_>>();
    Ok(PhaseRecord {
        times: traj.times.clone(),
        total: scale(cumulative_simpson(&tot, dt)),
        dynamical: scale(cumulative_simpson(&dyn_, dt)),
        geometric: scale(cumulative_simpson(&geo, dt)),
    })
}

/// Masses of a Hamiltonian of the form `Σ p_j²/2m_j + V(q, t)`.
pub fn kinetic_masses(h: &DrivenHamiltonian) -> Result<Vec<f64>> {
    let n = h.n_dof();
    let mut inv2m = vec![0.0; n];
    for (m, c) in h.static_part().terms() {
        if !m.has_p() {
            continue;
        }
        let dof = (0..n).find(|&k| m.p_power(k) > 0).expect("has_p");
        if m.has_q() || m.degree() != 2 || m.p_power(dof) != 2 {
            return Err(Error::UnsupportedForm(format!(
                "closed-form solutions need kinetic energy sum p_j^2/2m_j plus V(q); found momentum term {m:?}"
            )));
        }
        inv2m[dof] += c;
    }
    for (_, shape) in h.drives() {
        if shape.terms().any(|(m, _)| m.has_p()) {
            return Err(Error::UnsupportedForm("drive terms must depend on q only".into()));
        }
    }
    inv2m
        .into_iter()
        .map(|c| {
            if c > 0.0 {
                Ok(0.5 / c)
            } else {
                Err(Error::UnsupportedForm(
                    "every degree of freedom needs a positive p^2 term".into(),
                ))
            }
        })
        .collect()
}

/// `e^{iφ} e^{−i p̄ q̄/2ħ} e^{i p̄ q/ħ} ψ₀(q − q̄)` with a spectral translation.
pub fn closed_form_state(envelope: &GridState, z: &PhasePoint, phi: f64, hbar: f64) -> Result<GridState> {
    if z.n_dof() != 1 {
        return Err(Error::UnsupportedDof { found: z.n_dof() });
    }
    if !(z.is_finite() && phi.is_finite()) {
        return Err(Error::NonFinite { what: "phase-space point or phase" });
    }
    let (q0, p0) = envelope.expectation_point(hbar);
    if q0.abs() >= CENTERING_TOL || p0.abs() >= CENTERING_TOL {
        return Err(Error::UncenteredEnvelope { q: q0, p: p0 });
    }
    let (q, p) = (z.q[0], z.p[0]);
    Ok(envelope
        .translated(q)
        .modulated(p, hbar)
        .with_phase(phi - p * q / (2.0 * hbar)))
}

/// Output of [`propagate_closed_form`]; `states` is empty unless an
/// envelope was supplied for a one-dimensional system.
#[derive(Clone, Debug)]
pub struct ClosedFormRun {
    pub states: Vec<GridState>,
    pub trajectory: ClassicalTrajectory,
    pub phases: PhaseRecord,
}

/// Integrates Hamilton's equations on `t_grid` (uniform) with `substeps`
/// fixed RK4 steps per interval, accumulates the phase on the refined grid,
/// and assembles the closed-form state at each requested time.
pub fn propagate_closed_form(
    h: &DrivenHamiltonian,
    envelope: Option<&GridState>,
    z0: &PhasePoint,
    t_grid: &[f64],
    substeps: usize,
    hbar: f64,
) -> Result<ClosedFormRun> {
    kinetic_masses(h)?;
    if substeps == 0 {
        return Err(Error::InvalidParameter("substeps must be positive".into()));
    }
    if t_grid.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, found: 0 });
    }
    uniform_spacing(t_grid)?;
    if envelope.is_some() && h.n_dof() != 1 {
        return Err(Error::UnsupportedDof { found: h.n_dof() });
    }
    let fine: Vec<f64> = if t_grid.len() == 1 {
        t_grid.to_vec()
    } else {
        let n = (t_grid.len() - 1) * substeps;
        let (t0, t1) = (t_grid[0], t_grid[t_grid.len() - 1]);
        (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect()
    };
    let fine_traj = integrate_classical(h, z0, &fine, Integrator::Rk4Fixed)?;
    let fine_phase = phase_integral(&fine_traj, h, hbar)?;
    let pick = |i: usize| i * substeps;
    let idx: Vec<usize> = (0..t_grid.len()).map(pick).collect();
    let trajectory = ClassicalTrajectory {
        times: t_grid.to_vec(),
        points: idx.iter().map(|&i| fine_traj.points[i].clone()).collect(),
        rates: idx.iter().map(|&i| fine_traj.rates[i].clone()).collect(),
        energies: idx.iter().map(|&i| fine_traj.energies[i]).collect(),
    };
    let phases = PhaseRecord {
        times: t_grid.to_vec(),
        total: idx.iter().map(|&i| fine_phase.total[i]).collect(),
        dynamical: idx.iter().map(|&i| fine_phase.dynamical[i]).collect(),
        geometric: idx.iter().map(|&i| fine_phase.geometric[i]).collect(),
    };
    let states = match envelope {
        Some(env) => trajectory
            .points
            .iter()
            .zip(&phases.total)
            .map(|(z, &phi)| closed_form_state(env, z, phi, hbar))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    Ok(ClosedFormRun {
        states,
        trajectory,
        phases,
    })
}

/// Potential `V(q, t)` of a one-dimensional kinetic-plus-potential
/// Hamiltonian, as a q-only polynomial.
fn potential_at(h: &DrivenHamiltonian, t: f64) -> PolyObservable {
    let f = h.instantaneous(t);
    let mut v = PolyObservable::zero(1);
    for (m, c) in f.terms() {
        if !m.has_p() {
            v.add_term(m.clone(), *c);
        }
    }
    v
}

/// L² norm of the classical-wave-equation residual
/// `iħ(∂_t + ⟨p⟩/m ∂_q)ψ − (V(⟨q⟩) + V'(⟨q⟩)(q − ⟨q⟩) − ⟨p⟩²/2m)ψ` at each
/// sample, with `∂_t` by second-order finite differences (centered inside,
/// one-sided at the ends), `∂_q` spectral, and expectation values measured
/// from each state.
pub fn verify_pde_residual(states: &[GridState], h: &DrivenHamiltonian, t_grid: &[f64], hbar: f64) -> Result<Vec<f64>> {
    if h.n_dof() != 1 {
        return Err(Error::UnsupportedDof { found: h.n_dof() });
    }
    if states.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            found: states.len(),
        });
    }
    if states.len() != t_grid.len() {
        return Err(Error::InvalidParameter(format!(
            "{} states for {} times",
            states.len(),
            t_grid.len()
        )));
    }
    let dt = uniform_spacing(t_grid)?;
    let mass = kinetic_masses(h)?[0];
    let spec = *states[0].spec();
    if states.iter().any(|s| *s.spec() != spec) {
        return Err(Error::GridMismatch);
    }
    let positions = spec.positions();
    let ik: Vec<Complex64> = spec.wavenumbers().iter().map(|&k| Complex64::new(0.0, k)).collect();
    let n = states.len();
    let ihbar = Complex64::new(0.0, hbar);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = |j: usize| states[j].amplitudes();
        let dpsi_dt: Vec<Complex64> = if i == 0 {
            (0..spec.n_points())
                .map(|x| (-3.0 * a(0)[x] + 4.0 * a(1)[x] - a(2)[x]) / (2.0 * dt))
                .collect()
        } else if i == n - 1 {
            (0..spec.n_points())
                .map(|x| (3.0 * a(i)[x] - 4.0 * a(i - 1)[x] + a(i - 2)[x]) / (2.0 * dt))
                .collect()
        } else {
            (0..spec.n_points())
                .map(|x| (a(i + 1)[x] - a(i - 1)[x]) / (2.0 * dt))
                .collect()
        };
        let psi = states[i].amplitudes();
        let mut dpsi_dq = psi.to_vec();
        fft::apply_multiplier(&mut dpsi_dq, &ik);
        let (qb, pb) = states[i].expectation_point(hbar);
        let v = potential_at(h, t_grid[i]);
        let v0 = v.evaluate_slices(&[qb], &[0.0]);
        let dv0 = v.partial_derivative(Coordinate::Q(0), 1).evaluate_slices(&[qb], &[0.0]);
        let sum: f64 = (0..spec.n_points())
            .map(|x| {
                let lhs = ihbar * (dpsi_dt[x] + pb / mass * dpsi_dq[x]);
                let rhs = psi[x] * (v0 + dv0 * (positions[x] - qb) - pb * pb / (2.0 * mass));
                (lhs - rhs).norm_sqr()
            })
            .sum();
        out.push((sum * spec.dq()).sqrt());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::uniform_grid;
    use crate::grid::{make_envelope, EnvelopeKind, GridSpec};
    use crate::hamiltonian::models::*;
    use std::f64::consts::PI;

    #[test]
    fn ho_period_phase_vanishes() {
        let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
        let traj = integrate_classical(&h, &PhasePoint::single(1.0, 0.0), &uniform_grid(0.0, 2.0 * PI, 2000), Integrator::Rk4Fixed)
            .unwrap();
        let rec = phase_integral(&traj, &h, 1.0).unwrap();
        assert!(rec.total.last().unwrap().abs() < 1e-8);
        // Geometric part: ∮ p dq = 2πE = π; dynamical: −E T = −π.
        assert!((rec.geometric.last().unwrap() - PI).abs() < 1e-8);
        for i in 0..rec.len() {
            assert!((rec.total[i] - rec.dynamical[i] - rec.geometric[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn free_particle_phase_is_zero() {
        let h = DrivenHamiltonian::time_independent(kinetic_plus_potential(2.0, &[]));
        let traj = integrate_classical(&h, &PhasePoint::single(0.0, 1.5), &uniform_grid(0.0, 3.0, 30), Integrator::Rk4Fixed)
            .unwrap();
        let rec = phase_integral(&traj, &h, 1.0).unwrap();
        assert!(rec.total.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn static_point_phase() {
        // V = (q − 1)^2 + 0.5 = q² − 2q + 1.5, rest at q = 1.
        let h = DrivenHamiltonian::time_independent(kinetic_plus_potential(1.0, &[1.5, -2.0, 1.0]));
        let traj = integrate_classical(&h, &PhasePoint::single(1.0, 0.0), &uniform_grid(0.0, 2.0, 20), Integrator::Rk4Fixed)
            .unwrap();
        let rec = phase_integral(&traj, &h, 0.5).unwrap();
        for (t, phi) in rec.times.iter().zip(&rec.total) {
            assert!((phi + 0.5 * t / 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn non_uniform_grid_rejected() {
        let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
        let traj = integrate_classical(&h, &PhasePoint::single(1.0, 0.0), &[0.0, 0.1, 0.3], Integrator::Rk4Fixed).unwrap();
        assert!(matches!(phase_integral(&traj, &h, 1.0), Err(Error::NonUniformSampling)));
    }

    #[test]
    fn state_construction() {
        let spec = GridSpec::centered(512, 20.0).unwrap();
        let env = make_envelope(EnvelopeKind::Gaussian { sigma: 1.0 }, &spec).unwrap();
        let same = closed_form_state(&env, &PhasePoint::single(0.0, 0.0), 0.0, 1.0).unwrap();
        assert!(same.l2_distance(&env).unwrap() < 1e-14);
        let moved = closed_form_state(&env, &PhasePoint::single(2.5, 0.0), 0.0, 1.0).unwrap();
        assert!(moved.l2_distance(&env.translated(2.5)).unwrap() < 1e-14);
        let p0 = 3.0 * spec.dk();
        let kicked = closed_form_state(&env, &PhasePoint::single(0.0, p0), 0.0, 1.0).unwrap();
        assert!((kicked.expectation_p(1.0) - p0).abs() < 1e-10);
        let off = env.translated(0.5);
        assert!(matches!(
            closed_form_state(&off, &PhasePoint::single(0.0, 0.0), 0.0, 1.0),
            Err(Error::UncenteredEnvelope { .. })
        ));
    }

    #[test]
    fn unsupported_forms() {
        let h = DrivenHamiltonian::time_independent(generalized_oscillator(1.0, 0.5, 1.0));
        assert!(matches!(kinetic_masses(&h), Err(Error::UnsupportedForm(_))));
        let hh = DrivenHamiltonian::time_independent(henon_heiles());
        assert_eq!(kinetic_masses(&hh).unwrap(), vec![1.0, 1.0]);
        assert!(propagate_closed_form(&hh, None, &PhasePoint::new(vec![0.0, 0.1], vec![0.3, 0.0]).unwrap(), &uniform_grid(0.0, 1.0, 10), 1, 1.0)
            .unwrap()
            .states
            .is_empty());
    }
}
