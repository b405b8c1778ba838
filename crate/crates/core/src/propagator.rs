//! Time stepping of the generalized Schrödinger equation
//! `iħ ∂ψ/∂t = Ĥ_q(ψ; λ) ψ` on a one-dimensional grid.
//!
//! The generator depends on the state only through `(⟨q⟩, ⟨p⟩)`. For
//! separable Hamiltonians `H = V(q, t) + K(p, t)` it is itself separable:
//! `V_eff(q) + K_eff(p)` with `V_eff(q) = Σ_k w_k V⁽ᵏ⁾(⟨q⟩)/k! (q − ⟨q⟩)^k`
//! and likewise for K, where `w_k` are the layer weights of
//! [`GeneratorMode`]. The split-step scheme exponentiates the two parts
//! exactly in position and momentum space.
//!
//! With [`Refresh::PredictorCorrector`] each step freezes the generator at
//! a midpoint expectation value `z* = ½(z_n + z_{n+1})`, found by fixed-point
//! iteration from a frozen half-step predictor. The resulting map is
//! symmetric, so stepping back with `−dt` retraces the forward step, and
//! second order in dt.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::GridState;
use crate::hamiltonian::{DriveSpec, DrivenHamiltonian, PhasePoint};
use crate::operator::OperatorPoly;
use crate::poly::{Coordinate, PolyObservable};
use crate::quantize::{deformed_generator, GeneratorMode};

const MODULE: &str = "gse-propagator";

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Spectral operator splitting; separable Hamiltonians only. Unitary.
    #[default]
    SplitStep,
    /// Classic RK4 on `dψ/dt = −(i/ħ) Ĥ_q(ψ) ψ` with the generator rebuilt at
    /// every stage. Handles cross terms; not unitary.
    Rk4MatrixFree,
}

/// How the state-dependent generator is refreshed within a step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Refresh {
    /// Generator frozen at the self-consistent midpoint expectation values.
    #[default]
    PredictorCorrector,
    /// Generator frozen at the expectation values at the start of the step
    /// (first order; kept for diagnosis).
    Frozen,
}

/// Composition order of the split-step scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SplitOrder {
    /// Half potential, full kinetic, half potential. Second order.
    #[default]
    Strang,
    /// Triple-jump composition of three Strang steps. Fourth order for
    /// linear dynamics; the expectation-value refresh keeps the nonlinear
    /// case at second order.
    Fourth,
}

/// Parameters of a propagation run.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationConfig {
    pub lambda: f64,
    pub mode: GeneratorMode,
    /// Fixed time step; may be negative to run backwards.
    pub dt: f64,
    pub scheme: Scheme,
    pub refresh: Refresh,
    pub splitting: SplitOrder,
    /// Store a snapshot every this many steps (0 disables snapshots).
    pub snapshot_stride: usize,
    /// Record observables every this many steps (the final time is always
    /// recorded).
    pub record_stride: usize,
    /// Convergence tolerance of the midpoint iteration, relative to
    /// `1 + |z*|`.
    pub corrector_tol: f64,
    pub max_corrections: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            lambda: 0.0,
            mode: GeneratorMode::default(),
            dt: 1e-3,
            scheme: Scheme::default(),
            refresh: Refresh::default(),
            splitting: SplitOrder::default(),
            snapshot_stride: 0,
            record_stride: 1,
            corrector_tol: 1e-12,
            max_corrections: 50,
        }
    }
}

impl PropagationConfig {
    pub fn new(lambda: f64, dt: f64) -> Self {
        PropagationConfig {
            lambda,
            dt,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be finite, got {}", self.lambda)));
        }
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be finite and nonzero, got {}", self.dt)));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter("record_stride must be positive".into()));
        }
        if !(self.corrector_tol > 0.0) || self.max_corrections == 0 {
            return Err(Error::InvalidParameter(
                "corrector tolerance and iteration cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Observables along a propagation, all measured on the evolved state.
#[derive(Clone, Debug, Default)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub exp_q: Vec<f64>,
    pub exp_p: Vec<f64>,
    pub norm: Vec<f64>,
    /// `H(⟨q⟩, ⟨p⟩, t)`.
    pub energy_classical: Vec<f64>,
    /// `Re ⟨ψ| Ĥ_q(ψ; λ) |ψ⟩`.
    pub energy_quantal: Vec<f64>,
    pub sigma_q: Vec<f64>,
    pub sigma_p: Vec<f64>,
    pub snapshots: Vec<(f64, GridState)>,
    /// State at the last step.
    pub final_state: Option<GridState>,
}

/// CSV header of [`TrajectoryRecord::write_csv`].
pub const TRAJECTORY_CSV_HEADER: &str = "t,exp_q,exp_p,norm,E_classical,E_quantal,sigma_q,sigma_p";

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max |x_i − x_0|` for a recorded series.
    pub fn drift(series: &[f64]) -> f64 {
        let x0 = series.first().copied().unwrap_or(0.0);
        series.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max)
    }

    /// One row per recorded time, columns as in [`TRAJECTORY_CSV_HEADER`].
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        let mut s = String::with_capacity(200 * (self.len() + 1));
        s.push_str(TRAJECTORY_CSV_HEADER);
        s.push('\n');
        for i in 0..self.len() {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.times[i],
                self.exp_q[i],
                self.exp_p[i],
                self.norm[i],
                self.energy_classical[i],
                self.energy_quantal[i],
                self.sigma_q[i],
                self.sigma_p[i]
            );
        }
        w.write_all(s.as_bytes())
    }

    fn push(&mut self, t: f64, obs: Observables) {
        self.times.push(t);
        self.exp_q.push(obs.q);
        self.exp_p.push(obs.p);
        self.norm.push(obs.norm);
        self.energy_classical.push(obs.e_classical);
        self.energy_quantal.push(obs.e_quantal);
        self.sigma_q.push(obs.sigma_q);
        self.sigma_p.push(obs.sigma_p);
    }
}

struct Observables {
    q: f64,
    p: f64,
    norm: f64,
    e_classical: f64,
    e_quantal: f64,
    sigma_q: f64,
    sigma_p: f64,
}

/// `H = V(q) + K(p)` as dense coefficient vectors (constants in V).
fn split_separable(f: &PolyObservable) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; f.degree() as usize + 1];
    let mut k = vec![0.0; f.degree() as usize + 1];
    for (m, c) in f.terms() {
        if m.has_p() {
            k[m.power(Coordinate::P(0)) as usize] += c;
        } else {
            v[m.power(Coordinate::Q(0)) as usize] += c;
        }
    }
    (v, k)
}

fn add_scaled(acc: &mut Vec<f64>, x: &[f64], s: f64) {
    if acc.len() < x.len() {
        acc.resize(x.len(), 0.0);
    }
    for (a, b) in acc.iter_mut().zip(x) {
        *a += s * b;
    }
}

/// Taylor coefficients of the dense polynomial `a` about `c`.
fn taylor_shift(a: &[f64], c: f64) -> Vec<f64> {
    let mut b = a.to_vec();
    let n = b.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            b[j] += c * b[j + 1];
        }
    }
    b
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Horner for the value and first derivative.
fn horner_d(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for c in coeffs.iter().rev() {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}

/// A separable Hamiltonian pre-split into static and driven parts.
#[derive(Clone, Debug)]
struct SeparableModel {
    v: Vec<f64>,
    k: Vec<f64>,
    drives: Vec<(DriveSpec, Vec<f64>, Vec<f64>)>,
}

impl SeparableModel {
    fn new(h: &DrivenHamiltonian) -> Result<Self> {
        if h.n_dof() != 1 {
            return Err(Error::UnsupportedDof { found: h.n_dof() });
        }
        if !h.is_separable() {
            return Err(Error::SchemeMismatch);
        }
        let (v, k) = split_separable(h.static_part());
        let drives = h
            .drives()
            .iter()
            .map(|(d, shape)| {
                let (v, k) = split_separable(shape);
                (d.clone(), v, k)
            })
            .collect();
        Ok(SeparableModel { v, k, drives })
    }

    fn at(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let mut v = self.v.clone();
        let mut k = self.k.clone();
        for (d, dv, dk) in &self.drives {
            let s = d.value(t);
            add_scaled(&mut v, dv, s);
            add_scaled(&mut k, dk, s);
        }
        (v, k)
    }
}

/// Deformed generator `V_eff(q) + K_eff(p)` in Taylor form about `(qc, pc)`.
#[derive(Clone, Debug)]
struct Effective {
    qc: f64,
    pc: f64,
    v: Vec<f64>,
    k: Vec<f64>,
}

impl Effective {
    fn new(vk: &(Vec<f64>, Vec<f64>), qc: f64, pc: f64, lambda: f64, mode: GeneratorMode) -> Self {
        let mut v = taylor_shift(&vk.0, qc);
        let mut k = taylor_shift(&vk.1, pc);
        for (i, c) in v.iter_mut().enumerate() {
            *c *= mode.layer_weight(&lambda, i as u32);
        }
        for (i, c) in k.iter_mut().enumerate() {
            *c *= mode.layer_weight(&lambda, i as u32);
        }
        // Keep all scalars on the position side.
        v[0] += std::mem::take(&mut k[0]);
        Effective { qc, pc, v, k }
    }

    fn v_at(&self, q: f64) -> f64 {
        horner(&self.v, q - self.qc)
    }

    fn k_at(&self, p: f64) -> f64 {
        horner(&self.k, p - self.pc)
    }
}

/// Expectation values of the current state plus bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Moments {
    q: f64,
    p: f64,
}

impl Moments {
    fn dist(&self, o: &Moments) -> f64 {
        (self.q - o.q).abs().max((self.p - o.p).abs())
    }

    fn mid(&self, o: &Moments) -> Moments {
        Moments {
            q: 0.5 * (self.q + o.q),
            p: 0.5 * (self.p + o.p),
        }
    }
}

/// Reusable buffers and model data for one propagation.
struct Stepper<'a> {
    h: &'a DrivenHamiltonian,
    hbar: f64,
    config: PropagationConfig,
    model: Option<SeparableModel>,
    positions: Vec<f64>,
    momenta: Vec<f64>,
    dq: f64,
    trial: Vec<Complex64>,
    kick: Vec<(Complex64, f64)>,
}

impl<'a> Stepper<'a> {
    fn new(h: &'a DrivenHamiltonian, s: &GridState, config: &PropagationConfig, hbar: f64) -> Result<Self> {
        config.validate()?;
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if h.n_dof() != 1 {
            return Err(Error::UnsupportedDof { found: h.n_dof() });
        }
        let model = match config.scheme {
            Scheme::SplitStep => Some(SeparableModel::new(h)?),
            Scheme::Rk4MatrixFree => None,
        };
        let spec = s.spec();
        let n = spec.n_points();
        Ok(Stepper {
            h,
            hbar,
            config: config.clone(),
            model,
            positions: spec.positions(),
            momenta: spec.wavenumbers().iter().map(|k| hbar * k).collect(),
            dq: spec.dq(),
            trial: vec![Complex64::new(0.0, 0.0); n],
            kick: vec![(Complex64::new(0.0, 0.0), 0.0); n],
        })
    }

    fn moments(&self, psi: &[Complex64]) -> Moments {
        let (mut n0, mut n1) = (0.0, 0.0);
        for (a, q) in psi.iter().zip(&self.positions) {
            let w = a.norm_sqr();
            n0 += w;
            n1 += w * q;
        }
        let mut t = psi.to_vec();
        fft::forward(&mut t);
        let mut m1 = 0.0;
        let mut m0 = 0.0;
        for (a, p) in t.iter().zip(&self.momenta) {
            let w = a.norm_sqr();
            m0 += w;
            m1 += w * p;
        }
        Moments { q: n1 / n0, p: m1 / m0 }
    }

    /// One Strang substep of length `tau` with the generator frozen at
    /// `eff`, from `src` into `dst`. Returns the moments of the result.
    fn strang(&self, eff: &Effective, tau: f64, src: &[Complex64], dst: &mut [Complex64], kick: &mut [(Complex64, f64)]) -> Moments {
        let hb = self.hbar;
        // The potential half-kick is the same at both ends of the step.
        for ((k, d), (s, &q)) in kick.iter_mut().zip(dst.iter_mut()).zip(src.iter().zip(&self.positions)) {
            let (v, dv) = horner_d(&eff.v, q - eff.qc);
            *k = (Complex64::from_polar(1.0, -0.5 * tau * v / hb), dv);
            *d = s * k.0;
        }
        fft::forward(dst);
        let (mut m0, mut m1) = (0.0, 0.0);
        for (d, &p) in dst.iter_mut().zip(&self.momenta) {
            *d *= Complex64::from_polar(1.0, -tau * eff.k_at(p) / hb);
            let w = d.norm_sqr();
            m0 += w;
            m1 += w * p;
        }
        let p_mid = m1 / m0;
        fft::inverse(dst);
        // The closing potential kick shifts ⟨p⟩ by −(τ/2)⟨V_eff'⟩ and leaves
        // |ψ|² untouched, so the new moments need no further transform.
        let (mut n0, mut n1, mut force) = (0.0, 0.0, 0.0);
        for ((d, k), &q) in dst.iter_mut().zip(kick.iter()).zip(&self.positions) {
            *d *= k.0;
            let w = d.norm_sqr();
            n0 += w;
            n1 += w * q;
            force += w * k.1;
        }
        Moments {
            q: n1 / n0,
            p: p_mid - 0.5 * tau * force / n0,
        }
    }

    /// One refreshed Strang substep in place.
    fn split_substep(&mut self, psi: &mut Vec<Complex64>, z: Moments, t: f64, tau: f64) -> Result<Moments> {
        let model = self.model.as_ref().expect("split-step stepper has a model");
        let vk = model.at(t + 0.5 * tau);
        let (lambda, mode) = (self.config.lambda, self.config.mode);
        let mut trial = std::mem::take(&mut self.trial);
        let mut kick = std::mem::take(&mut self.kick);
        let z_new = match self.config.refresh {
            Refresh::Frozen => {
                let eff = Effective::new(&vk, z.q, z.p, lambda, mode);
                self.strang(&eff, tau, psi, &mut trial, &mut kick)
            }
            Refresh::PredictorCorrector => {
                let eff = Effective::new(&vk, z.q, z.p, lambda, mode);
                let mut star = self.strang(&eff, 0.5 * tau, psi, &mut trial, &mut kick);
                let mut converged = false;
                let mut z_end = star;
                for _ in 0..self.config.max_corrections {
                    let eff = Effective::new(&vk, star.q, star.p, lambda, mode);
                    z_end = self.strang(&eff, tau, psi, &mut trial, &mut kick);
                    let next = z.mid(&z_end);
                    let scale = 1.0 + star.q.abs().max(star.p.abs());
                    let delta = next.dist(&star);
                    star = next;
                    if !delta.is_finite() {
                        break;
                    }
                    if delta <= self.config.corrector_tol * scale {
                        converged = true;
                        break;
                    }
                }
                if !converged && z_end.q.is_finite() && z_end.p.is_finite() {
                    log::warn!(
                        "midpoint iteration did not converge at t = {t} within {} corrections",
                        self.config.max_corrections
                    );
                }
                z_end
            }
        };
        std::mem::swap(psi, &mut trial);
        self.trial = trial;
        self.kick = kick;
        if !(z_new.q.is_finite() && z_new.p.is_finite()) {
            return Err(Error::NumericalFailure {
                module: MODULE,
                time: t + tau,
            });
        }
        Ok(z_new)
    }

    /// Right-hand side `−(i/ħ) Ĥ_q(ψ) ψ` for the matrix-free scheme.
    fn rk4_rhs(&self, spec: &crate::grid::GridSpec, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let z = self.moments(psi);
        let zbar = PhasePoint::single(z.q, z.p);
        let g = deformed_generator(self.h, &zbar, t, self.config.lambda, self.config.mode)?;
        let state = GridState::from_raw(*spec, psi.to_vec());
        let hpsi = state.apply_operator(&g, self.hbar)?;
        let f = Complex64::new(0.0, -1.0 / self.hbar);
        Ok(hpsi.into_amplitudes().into_iter().map(|x| f * x).collect())
    }

    fn rk4_step(&mut self, spec: &crate::grid::GridSpec, psi: &mut [Complex64], t: f64, dt: f64) -> Result<()> {
        let axpy = |y: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
            y.iter().zip(k).map(|(a, b)| a + b * s).collect()
        };
        let k1 = self.rk4_rhs(spec, psi, t)?;
        let k2 = self.rk4_rhs(spec, &axpy(psi, &k1, 0.5 * dt), t + 0.5 * dt)?;
        let k3 = self.rk4_rhs(spec, &axpy(psi, &k2, 0.5 * dt), t + 0.5 * dt)?;
        let k4 = self.rk4_rhs(spec, &axpy(psi, &k3, dt), t + dt)?;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        if psi.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NumericalFailure {
                module: MODULE,
                time: t + dt,
            });
        }
        Ok(())
    }

    /// Advances `psi` by one full step `dt` from `t`.
    fn step(&mut self, spec: &crate::grid::GridSpec, psi: &mut Vec<Complex64>, z: Moments, t: f64, dt: f64) -> Result<Moments> {
        match self.config.scheme {
            Scheme::Rk4MatrixFree => {
                self.rk4_step(spec, psi, t, dt)?;
                Ok(self.moments(psi))
            }
            Scheme::SplitStep => match self.config.splitting {
                SplitOrder::Strang => self.split_substep(psi, z, t, dt),
                SplitOrder::Fourth => {
                    let cbrt2 = 2f64.powf(1.0 / 3.0);
                    let w1 = 1.0 / (2.0 - cbrt2);
                    let w0 = -cbrt2 / (2.0 - cbrt2);
                    let z = self.split_substep(psi, z, t, w1 * dt)?;
                    let z = self.split_substep(psi, z, t + w1 * dt, w0 * dt)?;
                    self.split_substep(psi, z, t + (w1 + w0) * dt, w1 * dt)
                }
            },
        }
    }

    fn observe(&self, state: &GridState, t: f64) -> Result<Observables> {
        let hbar = self.hbar;
        let norm = state.norm();
        let (q, p) = state.expectation_point(hbar);
        let e_classical = self.h.evaluate(&PhasePoint::single(q, p), t)?;
        let e_quantal = match &self.model {
            Some(model) => {
                let eff = Effective::new(&model.at(t), q, p, self.config.lambda, self.config.mode);
                let ev: f64 = state
                    .amplitudes()
                    .iter()
                    .zip(&self.positions)
                    .map(|(a, &x)| a.norm_sqr() * eff.v_at(x))
                    .sum::<f64>()
                    * self.dq;
                let mut t = state.amplitudes().to_vec();
                fft::forward(&mut t);
                let scale = self.dq / t.len() as f64;
                let ek: f64 = t
                    .iter()
                    .zip(&self.momenta)
                    .map(|(a, &p)| a.norm_sqr() * eff.k_at(p))
                    .sum::<f64>()
                    * scale;
                ev + ek
            }
            None => {
                let g = deformed_generator(self.h, &PhasePoint::single(q, p), t, self.config.lambda, self.config.mode)?;
                state.expectation_operator(&g, hbar)?.re
            }
        };
        Ok(Observables {
            q,
            p,
            norm,
            e_classical,
            e_quantal,
            sigma_q: state.position_variance().max(0.0).sqrt(),
            sigma_p: state.momentum_variance(hbar).max(0.0).sqrt(),
        })
    }
}

fn step_count(t0: f64, t_final: f64, dt: f64) -> Result<usize> {
    if !(t0.is_finite() && t_final.is_finite()) {
        return Err(Error::NonFinite { what: "time interval" });
    }
    let ratio = (t_final - t0) / dt;
    let n = ratio.round();
    if n < 0.0 || (ratio - n).abs() > 1e-9 * ratio.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "interval [{t0}, {t_final}] is not a non-negative whole number of steps of {dt}"
        )));
    }
    Ok(n as usize)
}

fn check_input(s: &GridState) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::NonFinite { what: "initial state" });
    }
    if s.norm_squared() == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(())
}

/// Advances `s` by one step `config.dt` from time `t`.
pub fn step(h: &DrivenHamiltonian, s: &GridState, t: f64, config: &PropagationConfig, hbar: f64) -> Result<GridState> {
    check_input(s)?;
    let mut st = Stepper::new(h, s, config, hbar)?;
    let mut psi = s.amplitudes().to_vec();
    let z = st.moments(&psi);
    st.step(s.spec(), &mut psi, z, t, config.dt)?;
    Ok(GridState::from_raw(*s.spec(), psi))
}

/// Runs from `t0` to `t_final` (a whole number of steps of `config.dt`),
/// calling `visit(step_index, t, state_amplitudes)` after every step.
fn run(
    h: &DrivenHamiltonian,
    s0: &GridState,
    t0: f64,
    t_final: f64,
    config: &PropagationConfig,
    hbar: f64,
    mut visit: impl FnMut(&Stepper, usize, f64, &[Complex64]) -> Result<()>,
) -> Result<GridState> {
    check_input(s0)?;
    let n_steps = step_count(t0, t_final, config.dt)?;
    let mut st = Stepper::new(h, s0, config, hbar)?;
    let spec = *s0.spec();
    let mut psi = s0.amplitudes().to_vec();
    let mut z = st.moments(&psi);
    visit(&st, 0, t0, &psi)?;
    for i in 1..=n_steps {
        let t = t0 + (i - 1) as f64 * config.dt;
        z = st.step(&spec, &mut psi, z, t, config.dt)?;
        visit(&st, i, t0 + i as f64 * config.dt, &psi)?;
    }
    Ok(GridState::from_raw(spec, psi))
}

/// Final state after evolving `s0` from `t0` to `t_final`.
pub fn evolve(
    h: &DrivenHamiltonian,
    s0: &GridState,
    t0: f64,
    t_final: f64,
    config: &PropagationConfig,
    hbar: f64,
) -> Result<GridState> {
    run(h, s0, t0, t_final, config, hbar, |_, _, _, _| Ok(()))
}

/// Evolves `s0` from `t = 0` to `t_final`, recording observables every
/// `record_stride` steps and snapshots every `snapshot_stride` steps.
pub fn propagate(
    h: &DrivenHamiltonian,
    s0: &GridState,
    t_final: f64,
    config: &PropagationConfig,
    hbar: f64,
) -> Result<TrajectoryRecord> {
    propagate_from(h, s0, 0.0, t_final, config, hbar)
}

/// [`propagate`] starting at time `t0`.
pub fn propagate_from(
    h: &DrivenHamiltonian,
    s0: &GridState,
    t0: f64,
    t_final: f64,
    config: &PropagationConfig,
    hbar: f64,
) -> Result<TrajectoryRecord> {
    let n_steps = step_count(t0, t_final, config.dt)?;
    let spec = *s0.spec();
    let mut rec = TrajectoryRecord::default();
    let mut edge_warned = false;
    run(h, s0, t0, t_final, config, hbar, |st, i, t, psi| {
        let take_record = i % config.record_stride == 0 || i == n_steps;
        let take_snapshot = config.snapshot_stride > 0 && i % config.snapshot_stride == 0;
        if i == n_steps {
            rec.final_state = Some(GridState::from_raw(spec, psi.to_vec()));
        }
        if take_record || take_snapshot {
            let state = GridState::from_raw(spec, psi.to_vec());
            if take_record {
                rec.push(t, st.observe(&state, t)?);
                if !edge_warned {
                    edge_warned = !state.check_edges(MODULE);
                }
            }
            if take_snapshot {
                rec.snapshots.push((t, state));
            }
        }
        Ok(())
    })?;
    Ok(rec)
}

/// L² distance between the evolved superposition `N(α s1 + β s2)` and the
/// renormalized superposition of the separately evolved states.
#[allow(clippy::too_many_arguments)]
pub fn superposition_probe(
    h: &DrivenHamiltonian,
    s1: &GridState,
    s2: &GridState,
    alpha: Complex64,
    beta: Complex64,
    t_final: f64,
    config: &PropagationConfig,
    hbar: f64,
) -> Result<f64> {
    let combined = s1.combine(alpha, s2, beta)?.normalize()?;
    let evolved = evolve(h, &combined, 0.0, t_final, config, hbar)?;
    let e1 = evolve(h, s1, 0.0, t_final, config, hbar)?;
    let e2 = if beta == Complex64::new(0.0, 0.0) {
        e1.clone()
    } else {
        evolve(h, s2, 0.0, t_final, config, hbar)?
    };
    let linear = e1.combine(alpha, &e2, beta)?.normalize()?;
    evolved.l2_distance(&linear)
}

/// The generator the propagator uses at `(q, p, t)`, in the symbolic form
/// of [`deformed_generator`]; exposed for cross-checks.
pub fn generator_at(h: &DrivenHamiltonian, q: f64, p: f64, t: f64, config: &PropagationConfig) -> Result<OperatorPoly<f64>> {
    deformed_generator(h, &PhasePoint::single(q, p), t, config.lambda, config.mode)
}
