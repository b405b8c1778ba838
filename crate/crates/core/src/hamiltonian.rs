//! Hamiltonians on phase space, optionally driven by scalar functions of time.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly::{Coordinate, PolyObservable};

/// Physical constants shared by a model: ħ and one mass per degree of freedom.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConstants {
    hbar: f64,
    masses: Vec<f64>,
}

impl ModelConstants {
    pub fn new(hbar: f64, masses: Vec<f64>) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if masses.is_empty() {
            return Err(Error::InvalidParameter("at least one mass is required".into()));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidParameter(format!("masses must be positive, got {m}")));
        }
        Ok(ModelConstants { hbar, masses })
    }

    /// ħ = 1 and unit masses.
    pub fn natural(n_dof: usize) -> Self {
        ModelConstants {
            hbar: 1.0,
            masses: vec![1.0; n_dof],
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, dof: usize) -> f64 {
        self.masses[dof]
    }

    pub fn n_dof(&self) -> usize {
        self.masses.len()
    }
}

/// Expectation-value coordinates `(⟨q⟩, ⟨p⟩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                found: p.len(),
            });
        }
        if q.is_empty() {
            return Err(Error::InvalidParameter("phase point needs at least one degree of freedom".into()));
        }
        if q.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "phase point" });
        }
        Ok(PhasePoint { q, p })
    }

    pub fn origin(n_dof: usize) -> Self {
        PhasePoint {
            q: vec![0.0; n_dof],
            p: vec![0.0; n_dof],
        }
    }

    /// One degree of freedom.
    pub fn single(q: f64, p: f64) -> Self {
        PhasePoint { q: vec![q], p: vec![p] }
    }

    pub fn n_dof(&self) -> usize {
        self.q.len()
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.p).all(|x| x.is_finite())
    }

    /// Euclidean distance in phase space.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        self.q
            .iter()
            .zip(&other.q)
            .chain(self.p.iter().zip(&other.p))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.q.iter().chain(&self.p).map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Componentwise sum.
    pub fn offset(&self, d: &PhasePoint) -> PhasePoint {
        PhasePoint {
            q: self.q.iter().zip(&d.q).map(|(a, b)| a + b).collect(),
            p: self.p.iter().zip(&d.p).map(|(a, b)| a + b).collect(),
        }
    }

    pub(crate) fn to_state_vec(&self) -> Vec<f64> {
        self.q.iter().chain(&self.p).copied().collect()
    }

    pub(crate) fn from_state_vec(y: &[f64]) -> PhasePoint {
        let n = y.len() / 2;
        PhasePoint {
            q: y[..n].to_vec(),
            p: y[n..].to_vec(),
        }
    }
}

/// Scalar time dependence multiplying a polynomial shape.
#[derive(Clone, Debug, PartialEq)]
pub enum DriveSpec {
    Constant {
        value: f64,
    },
    Cosine {
        amplitude: f64,
        angular_frequency: f64,
        phase_offset: f64,
    },
    /// Train of unit-area Gaussian pulses at `t = n·period`, scaled by
    /// `strength`. The pulse standard deviation is `width`; a zero width
    /// falls back to `smoothing`, itself defaulting to `period / 100`.
    PeriodicKick {
        strength: f64,
        period: f64,
        width: f64,
        smoothing: Option<f64>,
    },
}

impl DriveSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            DriveSpec::Constant { value } if finite(&[value]) => Ok(()),
            DriveSpec::Cosine {
                amplitude,
                angular_frequency,
                phase_offset,
            } if finite(&[amplitude, angular_frequency, phase_offset]) => {
                if angular_frequency > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("cosine drive needs angular_frequency > 0".into()))
                }
            }
            DriveSpec::PeriodicKick {
                strength,
                period,
                width,
                smoothing,
            } if finite(&[strength, period, width]) => {
                if period <= 0.0 || width < 0.0 {
                    return Err(Error::InvalidParameter("kick needs period > 0 and width >= 0".into()));
                }
                if let Some(s) = smoothing {
                    if !(s.is_finite() && s > 0.0) {
                        return Err(Error::InvalidParameter("kick smoothing must be positive".into()));
                    }
                }
                Ok(())
            }
            _ => Err(Error::NonFinite { what: "drive parameter" }),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            DriveSpec::Constant { value } => value,
            DriveSpec::Cosine {
                amplitude,
                angular_frequency,
                phase_offset,
            } => amplitude * (angular_frequency * t + phase_offset).cos(),
            DriveSpec::PeriodicKick {
                strength,
                period,
                width,
                smoothing,
            } => {
                let sd = if width > 0.0 { width } else { smoothing.unwrap_or(period / 100.0) };
                let nearest = (t / period).round();
                // Pulses further than 10 sd away contribute below 1e-22.
                let reach = (10.0 * sd / period).ceil() as i64;
                let norm = strength / (sd * (2.0 * PI).sqrt());
                (-reach..=reach)
                    .map(|j| {
                        let centre = (nearest + j as f64) * period;
                        let x = (t - centre) / sd;
                        (-0.5 * x * x).exp()
                    })
                    .sum::<f64>()
                    * norm
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Gradient {
    dq: Vec<PolyObservable>,
    dp: Vec<PolyObservable>,
}

impl Gradient {
    fn of(f: &PolyObservable) -> Self {
        let n = f.n_dof();
        Gradient {
            dq: (0..n).map(|k| f.partial_derivative(Coordinate::Q(k), 1)).collect(),
            dp: (0..n).map(|k| f.partial_derivative(Coordinate::P(k), 1)).collect(),
        }
    }
}

/// `H(q, p, t) = static_part(q, p) + Σ drive_i(t) · shape_i(q, p)`.
#[derive(Clone, Debug)]
pub struct DrivenHamiltonian {
    static_part: PolyObservable,
    drives: Vec<(DriveSpec, PolyObservable)>,
    static_grad: Gradient,
    drive_grads: Vec<Gradient>,
}

impl DrivenHamiltonian {
    pub fn new(static_part: PolyObservable, drives: Vec<(DriveSpec, PolyObservable)>) -> Result<Self> {
        let n = static_part.n_dof();
        for (spec, shape) in &drives {
            spec.validate()?;
            if shape.n_dof() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: shape.n_dof(),
                });
            }
        }
        if static_part.terms().chain(drives.iter().flat_map(|(_, s)| s.terms())).any(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { what: "Hamiltonian coefficient" });
        }
        let static_grad = Gradient::of(&static_part);
        let drive_grads = drives.iter().map(|(_, s)| Gradient::of(s)).collect();
        Ok(DrivenHamiltonian {
            static_part,
            drives,
            static_grad,
            drive_grads,
        })
    }

    pub fn time_independent(h: PolyObservable) -> Self {
        Self::new(h, Vec::new()).expect("static Hamiltonian without drives is always valid")
    }

    pub fn static_part(&self) -> &PolyObservable {
        &self.static_part
    }

    pub fn drives(&self) -> &[(DriveSpec, PolyObservable)] {
        &self.drives
    }

    pub fn n_dof(&self) -> usize {
        self.static_part.n_dof()
    }

    pub fn is_time_independent(&self) -> bool {
        self.drives.iter().all(|(d, s)| matches!(d, DriveSpec::Constant { .. }) || s.is_zero())
    }

    pub fn is_separable(&self) -> bool {
        self.static_part.is_separable() && self.drives.iter().all(|(_, s)| s.is_separable())
    }

    /// The classical function at time `t` with drive values substituted.
    pub fn instantaneous(&self, t: f64) -> PolyObservable {
        let mut h = self.static_part.clone();
        for (spec, shape) in &self.drives {
            h = &h + &shape.scale(&spec.value(t));
        }
        h
    }

    fn check(&self, z: &PhasePoint) -> Result<()> {
        if z.n_dof() != self.n_dof() {
            return Err(Error::DimensionMismatch {
                expected: self.n_dof(),
                found: z.n_dof(),
            });
        }
        Ok(())
    }

    /// `H(z, t)`.
    pub fn evaluate(&self, z: &PhasePoint, t: f64) -> Result<f64> {
        self.check(z)?;
        Ok(self.evaluate_slices(&z.q, &z.p, t))
    }

    pub(crate) fn evaluate_slices(&self, q: &[f64], p: &[f64], t: f64) -> f64 {
        let mut e = self.static_part.evaluate_slices(q, p);
        for (spec, shape) in &self.drives {
            e += spec.value(t) * shape.evaluate_slices(q, p);
        }
        e
    }

    /// Hamilton's equations: returns `(dq/dt, dp/dt) = (∂H/∂p, -∂H/∂q)` at `(z, t)`.
    pub fn hamilton_rhs(&self, z: &PhasePoint, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(z)?;
        let n = self.n_dof();
        let mut dq = vec![0.0; n];
        let mut dp = vec![0.0; n];
        self.rates_into(&z.q, &z.p, t, &mut dq, &mut dp);
        Ok((dq, dp))
    }

    pub(crate) fn rates_into(&self, q: &[f64], p: &[f64], t: f64, dq: &mut [f64], dp: &mut [f64]) {
        let n = self.n_dof();
        let drive_values: Vec<f64> = self.drives.iter().map(|(d, _)| d.value(t)).collect();
        for k in 0..n {
            let mut hp = self.static_grad.dp[k].evaluate_slices(q, p);
            let mut hq = self.static_grad.dq[k].evaluate_slices(q, p);
            for (g, v) in self.drive_grads.iter().zip(&drive_values) {
                if *v != 0.0 {
                    hp += v * g.dp[k].evaluate_slices(q, p);
                    hq += v * g.dq[k].evaluate_slices(q, p);
                }
            }
            dq[k] = hp;
            dp[k] = -hq;
        }
    }

    /// Right-hand side on the packed state `[q_1..q_n, p_1..p_n]`.
    pub(crate) fn flow(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.n_dof();
        let (q, p) = y.split_at(n);
        let (dq, dp) = dy.split_at_mut(n);
        self.rates_into(q, p, t, dq, dp);
    }
}

/// Common model Hamiltonians used by the scenarios and test suites.
pub mod models {
    use super::*;
    use crate::poly::Poly;

    fn q(n: usize, k: usize) -> PolyObservable {
        Poly::variable(n, Coordinate::Q(k))
    }

    fn p(n: usize, k: usize) -> PolyObservable {
        Poly::variable(n, Coordinate::P(k))
    }

    /// `p²/2m + V(q)` in one degree of freedom, `V` given by dense coefficients.
    pub fn kinetic_plus_potential(mass: f64, potential: &[f64]) -> PolyObservable {
        let mut h = p(1, 0).pow(2).scale(&(0.5 / mass));
        for (e, c) in potential.iter().enumerate() {
            h = &h + &q(1, 0).pow(e as u32).scale(c);
        }
        h
    }

    /// `p²/2m + mω²q²/2`.
    pub fn harmonic_oscillator(mass: f64, omega: f64) -> PolyObservable {
        kinetic_plus_potential(mass, &[0.0, 0.0, 0.5 * mass * omega * omega])
    }

    /// `p²/2m + q⁴/4`.
    pub fn quartic_oscillator(mass: f64) -> PolyObservable {
        kinetic_plus_potential(mass, &[0.0, 0.0, 0.0, 0.0, 0.25])
    }

    /// `½(a p² + b pq + c q²)`.
    pub fn generalized_oscillator(a: f64, b: f64, c: f64) -> PolyObservable {
        let pp = p(1, 0).pow(2).scale(&a);
        let pq = (&p(1, 0) * &q(1, 0)).scale(&b);
        let qq = q(1, 0).pow(2).scale(&c);
        (&(&pp + &pq) + &qq).scale(&0.5)
    }

    /// `½(p₁²+p₂²) + ½(q₁²+q₂²) + q₁²q₂ − q₂³/3`.
    pub fn henon_heiles() -> PolyObservable {
        let kinetic = (&p(2, 0).pow(2) + &p(2, 1).pow(2)).scale(&0.5);
        let harmonic = (&q(2, 0).pow(2) + &q(2, 1).pow(2)).scale(&0.5);
        let cubic = &(&q(2, 0).pow(2) * &q(2, 1)) - &q(2, 1).pow(3).scale(&(1.0 / 3.0));
        &(&kinetic + &harmonic) + &cubic
    }

    /// Undamped Duffing oscillator `p²/2m + q⁴/4 − q²/2 + ε q cos(Ωt)`.
    pub fn driven_duffing(mass: f64, epsilon: f64, omega: f64) -> DrivenHamiltonian {
        let static_part = kinetic_plus_potential(mass, &[0.0, 0.0, -0.5, 0.0, 0.25]);
        let drive = DriveSpec::Cosine {
            amplitude: epsilon,
            angular_frequency: omega,
            phase_offset: 0.0,
        };
        DrivenHamiltonian::new(static_part, vec![(drive, q(1, 0))]).expect("valid Duffing parameters")
    }
}

#[cfg(test)]
mod tests {
    use super::models::*;
    use super::*;

    #[test]
    fn constants_validate() {
        assert!(ModelConstants::new(0.0, vec![1.0]).is_err());
        assert!(ModelConstants::new(1.0, vec![1.0, -2.0]).is_err());
        assert!(ModelConstants::new(1.0, vec![]).is_err());
        assert_eq!(ModelConstants::new(0.5, vec![2.0]).unwrap().mass(0), 2.0);
    }

    #[test]
    fn phase_points_must_be_finite() {
        assert!(PhasePoint::new(vec![f64::NAN], vec![0.0]).is_err());
        assert!(PhasePoint::new(vec![1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn duffing_energy_with_drive() {
        // cos(Ωt) = 1 at t = 0.
        let h = driven_duffing(1.0, 0.1, 1.0);
        let e = h.evaluate(&PhasePoint::single(1.0, 0.0), 0.0).unwrap();
        assert!((e - (-0.15)).abs() < 1e-15);
        assert!(!h.is_time_independent());
    }

    #[test]
    fn hamilton_rhs_examples() {
        let free = DrivenHamiltonian::time_independent(kinetic_plus_potential(1.0, &[]));
        let (dq, dp) = free.hamilton_rhs(&PhasePoint::single(0.0, 2.0), 0.0).unwrap();
        assert_eq!((dq[0], dp[0]), (2.0, 0.0));

        let ho = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
        let (dq, dp) = ho.hamilton_rhs(&PhasePoint::single(1.0, 0.0), 0.0).unwrap();
        assert_eq!((dq[0], dp[0]), (0.0, -1.0));

        let hh = DrivenHamiltonian::time_independent(henon_heiles());
        let z = PhasePoint::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let (dq, dp) = hh.hamilton_rhs(&z, 0.0).unwrap();
        assert_eq!(dq, vec![0.0, 0.0]);
        // Hand algebra: -(q1 + 2 q1 q2, q2 + q1² - q2²) at (1, 1).
        assert_eq!(dp, vec![-3.0, -1.0]);
    }

    #[test]
    fn hamilton_rhs_matches_finite_differences() {
        let hh = DrivenHamiltonian::time_independent(henon_heiles());
        let z = PhasePoint::new(vec![0.3, -0.2], vec![0.1, 0.4]).unwrap();
        let (dq, dp) = hh.hamilton_rhs(&z, 0.0).unwrap();
        let eps = 1e-6;
        for k in 0..2 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp.p[k] += eps;
            zm.p[k] -= eps;
            let fd = (hh.evaluate(&zp, 0.0).unwrap() - hh.evaluate(&zm, 0.0).unwrap()) / (2.0 * eps);
            assert!((fd - dq[k]).abs() < 1e-9);
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp.q[k] += eps;
            zm.q[k] -= eps;
            let fd = (hh.evaluate(&zp, 0.0).unwrap() - hh.evaluate(&zm, 0.0).unwrap()) / (2.0 * eps);
            assert!((fd + dp[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn kick_train_has_unit_area_pulses() {
        let kick = DriveSpec::PeriodicKick {
            strength: 2.0,
            period: 1.0,
            width: 0.0,
            smoothing: None,
        };
        kick.validate().unwrap();
        let n = 20_000;
        let area: f64 = (0..n).map(|i| kick.value(-0.5 + (i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
        assert!((area - 2.0).abs() < 1e-9);
        assert!(kick.value(0.5) < 1e-100);
    }

    #[test]
    fn drive_validation() {
        let bad = DriveSpec::Cosine {
            amplitude: 1.0,
            angular_frequency: 0.0,
            phase_offset: 0.0,
        };
        assert!(bad.validate().is_err());
        let bad = DriveSpec::PeriodicKick {
            strength: 1.0,
            period: -1.0,
            width: 0.0,
            smoothing: None,
        };
        assert!(bad.validate().is_err());
    }
}
