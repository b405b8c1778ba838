//! Wavefunctions on a uniform periodic one-dimensional grid.
//!
//! Fourier convention, used everywhere in the crate: for samples `ψ_i` at
//! `q_i = q_min + i·dq` the momentum-space amplitude is
//!
//! ```text
//! ψ̃(k_j) = dq/√(2π) · Σ_i ψ_i e^{−i k_j q_i},   k_j = 2π s_j / L
//! ```
//!
//! with `L = q_max − q_min` and signed frequencies `s_j = j` for `j < N/2`,
//! `s_j = j − N` otherwise (the Nyquist bin is negative). With `dk = 2π/L`
//! this is unitary: `Σ|ψ_i|² dq = Σ|ψ̃_j|² dk`. Momentum is `ħk`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::operator::OperatorPoly;

/// Edge cells inspected by [`GridState::edge_leak`].
pub const EDGE_CELLS: usize = 3;
/// Probability density at the edge above which a warning is logged.
pub const EDGE_LEAK_WARN: f64 = 1e-10;
/// Margin, in envelope widths, required between an envelope and the box edge.
pub const ENVELOPE_MARGIN_SIGMAS: f64 = 6.0;

/// Uniform periodic grid on `[q_min, q_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n_points: usize,
    q_min: f64,
    q_max: f64,
}

impl GridSpec {
    pub fn new(n_points: usize, q_min: f64, q_max: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= 2, got {n_points}"
            )));
        }
        if !(q_min.is_finite() && q_max.is_finite()) {
            return Err(Error::NonFinite { what: "grid bounds" });
        }
        if !(q_min < q_max) {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must satisfy q_min < q_max, got [{q_min}, {q_max})"
            )));
        }
        Ok(GridSpec { n_points, q_min, q_max })
    }

    /// Grid symmetric about the origin, `[−half_length, half_length)`.
    pub fn centered(n_points: usize, half_length: f64) -> Result<Self> {
        Self::new(n_points, -half_length, half_length)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn length(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn dq(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length()
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.q(i)).collect()
    }

    /// Signed integer frequency of FFT bin `j`.
    pub fn frequency(&self, j: usize) -> i64 {
        let n = self.n_points as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Wavenumbers `k_j` in FFT layout; momenta are `ħ·k_j`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = self.dk();
        (0..self.n_points).map(|j| dk * self.frequency(j) as f64).collect()
    }
}

/// Envelope shapes, all centered at the origin with zero mean momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnvelopeKind {
    /// `exp(−q²/4σ²)`: position spread σ.
    Gaussian { sigma: f64 },
    /// `H_n(q/(√2σ))·exp(−q²/4σ²)`, the n-th oscillator eigenfunction shape.
    Hermite { order: u32, sigma: f64 },
    /// Equal-weight sum of two Gaussians of spread σ at `±separation/2`.
    SymmetricDoubleGaussian { sigma: f64, separation: f64 },
}

impl EnvelopeKind {
    pub fn sigma(&self) -> f64 {
        match *self {
            EnvelopeKind::Gaussian { sigma }
            | EnvelopeKind::Hermite { sigma, .. }
            | EnvelopeKind::SymmetricDoubleGaussian { sigma, .. } => sigma,
        }
    }

    /// Distance from the origin beyond which the envelope is treated as
    /// negligible: the outermost lobe plus a 6σ margin.
    pub fn half_width(&self) -> f64 {
        let m = ENVELOPE_MARGIN_SIGMAS;
        match *self {
            EnvelopeKind::Gaussian { sigma } => m * sigma,
            EnvelopeKind::Hermite { order, sigma } => sigma * (m + 2.0 * (2.0 * order as f64 + 1.0).sqrt()),
            EnvelopeKind::SymmetricDoubleGaussian { sigma, separation } => 0.5 * separation.abs() + m * sigma,
        }
    }

    fn validate(&self) -> Result<()> {
        let sigma = self.sigma();
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("envelope sigma must be positive, got {sigma}")));
        }
        if let EnvelopeKind::SymmetricDoubleGaussian { separation, .. } = *self {
            if !separation.is_finite() {
                return Err(Error::NonFinite { what: "envelope separation" });
            }
        }
        Ok(())
    }

    fn sample(&self, q: f64) -> f64 {
        let gauss = |x: f64, s: f64| (-x * x / (4.0 * s * s)).exp();
        match *self {
            EnvelopeKind::Gaussian { sigma } => gauss(q, sigma),
            EnvelopeKind::Hermite { order, sigma } => {
                let x = q / (std::f64::consts::SQRT_2 * sigma);
                hermite(order, x) * gauss(q, sigma)
            }
            EnvelopeKind::SymmetricDoubleGaussian { sigma, separation } => {
                gauss(q - 0.5 * separation, sigma) + gauss(q + 0.5 * separation, sigma)
            }
        }
    }
}

/// Physicists' Hermite polynomial by the three-term recurrence.
fn hermite(n: u32, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// A sampled wavefunction. Operations return new states.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    spec: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl GridState {
    pub fn new(spec: GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != spec.n_points {
            return Err(Error::DimensionMismatch {
                expected: spec.n_points,
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite { what: "grid amplitudes" });
        }
        Ok(GridState { spec, amplitudes })
    }

    pub(crate) fn from_raw(spec: GridSpec, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), spec.n_points);
        GridState { spec, amplitudes }
    }

    /// Samples `f(q_i)` on the grid.
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(spec, spec.positions().into_iter().map(f).collect())
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    fn check_same_grid(&self, other: &GridState) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.spec.dq()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalize(&self) -> Result<GridState> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> GridState {
        GridState::from_raw(self.spec, self.amplitudes.iter().map(|a| a * c).collect())
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: Complex64, other: &GridState, beta: Complex64) -> Result<GridState> {
        self.check_same_grid(other)?;
        Ok(GridState::from_raw(
            self.spec,
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        ))
    }

    /// Multiplies by the global phase `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> GridState {
        self.scaled(Complex64::from_polar(1.0, phi))
    }

    /// `Σ conj(ψ₁ᵢ) ψ₂ᵢ dq`.
    pub fn inner_product(&self, other: &GridState) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let s: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.spec.dq())
    }

    /// `1 − |⟨ψ₁|ψ₂⟩|²`, clamped to `[0, 1]` against rounding.
    pub fn metric_distance(&self, other: &GridState) -> Result<f64> {
        let ov = self.inner_product(other)?;
        Ok((1.0 - ov.norm_sqr()).clamp(0.0, 1.0))
    }

    /// Full complex L² distance `‖ψ₁ − ψ₂‖`.
    pub fn l2_distance(&self, other: &GridState) -> Result<f64> {
        self.check_same_grid(other)?;
        let s: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.spec.dq()).sqrt())
    }

    /// Momentum-space amplitudes `ψ̃(k_j)` in FFT layout (unitary
    /// convention of the module docs).
    pub fn momentum_amplitudes(&self) -> Vec<Complex64> {
        let mut buf = self.amplitudes.clone();
        fft::forward(&mut buf);
        let scale = self.spec.dq() / (2.0 * PI).sqrt();
        let kq0 = self.spec.q_min * self.spec.dk();
        for (j, x) in buf.iter_mut().enumerate() {
            let phase = -kq0 * self.spec.frequency(j) as f64;
            *x *= Complex64::from_polar(scale, phase);
        }
        buf
    }

    /// `|ψ̃(k_j)|²·dk` in FFT layout; sums to the norm squared.
    fn momentum_weights(&self) -> Vec<f64> {
        let mut buf = self.amplitudes.clone();
        fft::forward(&mut buf);
        let scale = self.spec.dq() / self.spec.n_points as f64;
        buf.iter().map(|x| x.norm_sqr() * scale).collect()
    }

    /// `Σ q_i |ψ_i|² dq` (assumes unit norm).
    pub fn expectation_q(&self) -> f64 {
        let dq = self.spec.dq();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| self.spec.q(i) * a.norm_sqr())
            .sum::<f64>()
            * dq
    }

    /// `Σ ħk |ψ̃(k)|² dk` (assumes unit norm).
    pub fn expectation_p(&self, hbar: f64) -> f64 {
        let k = self.spec.wavenumbers();
        hbar * self.momentum_weights().iter().zip(&k).map(|(w, k)| w * k).sum::<f64>()
    }

    /// `(⟨q⟩, ⟨p⟩)`.
    pub fn expectation_point(&self, hbar: f64) -> (f64, f64) {
        (self.expectation_q(), self.expectation_p(hbar))
    }

    /// `Σ (q_i − ⟨q⟩)^j |ψ_i|² dq`.
    pub fn central_moment(&self, order: u32) -> f64 {
        let mean = self.expectation_q();
        let dq = self.spec.dq();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| (self.spec.q(i) - mean).powi(order as i32) * a.norm_sqr())
            .sum::<f64>()
            * dq
    }

    pub fn position_variance(&self) -> f64 {
        self.central_moment(2)
    }

    /// Momentum variance about ⟨p⟩, computed spectrally.
    pub fn momentum_variance(&self, hbar: f64) -> f64 {
        let w = self.momentum_weights();
        let k = self.spec.wavenumbers();
        let mean: f64 = w.iter().zip(&k).map(|(w, k)| w * k).sum();
        hbar * hbar * w.iter().zip(&k).map(|(w, k)| w * (k - mean).powi(2)).sum::<f64>()
    }

    /// `σ_q² σ_p²`, bounded below by ħ²/4.
    pub fn uncertainty_product(&self, hbar: f64) -> f64 {
        self.position_variance() * self.momentum_variance(hbar)
    }

    /// `ψ(q − a)` by an integer roll followed by a spectral fractional shift.
    pub fn translated(&self, a: f64) -> GridState {
        let dq = self.spec.dq();
        let n = self.spec.n_points as i64;
        let whole = (a / dq).round();
        let frac = a - whole * dq;
        let shift = (whole as i64).rem_euclid(n) as usize;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, x) in self.amplitudes.iter().enumerate() {
            buf[(i + shift) % self.amplitudes.len()] = *x;
        }
        if frac != 0.0 {
            let mult: Vec<Complex64> = self
                .spec
                .wavenumbers()
                .iter()
                .map(|k| Complex64::from_polar(1.0, -k * frac))
                .collect();
            fft::apply_multiplier(&mut buf, &mult);
        }
        GridState::from_raw(self.spec, buf)
    }

    /// `e^{i p₀ q / ħ} ψ(q)`.
    pub fn modulated(&self, p0: f64, hbar: f64) -> GridState {
        GridState::from_raw(
            self.spec,
            self.amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| a * Complex64::from_polar(1.0, p0 * self.spec.q(i) / hbar))
                .collect(),
        )
    }

    /// `e^{−i⟨p⟩q/ħ} ψ(q + ⟨q⟩)`: moves the state to zero mean position and
    /// momentum without changing its shape.
    pub fn center_envelope(&self, hbar: f64) -> GridState {
        let (q0, p0) = self.expectation_point(hbar);
        self.translated(-q0).modulated(-p0, hbar)
    }

    /// Largest `|ψ|²` among the cells within [`EDGE_CELLS`] of either edge.
    pub fn edge_leak(&self) -> f64 {
        let n = self.amplitudes.len();
        let k = EDGE_CELLS.min(n / 2);
        self.amplitudes[..k]
            .iter()
            .chain(&self.amplitudes[n - k..])
            .map(|a| a.norm_sqr())
            .fold(0.0, f64::max)
    }

    /// Logs a warning when probability density reaches the box edge.
    /// Returns whether the check passed.
    pub fn check_edges(&self, context: &str) -> bool {
        let leak = self.edge_leak();
        if leak > EDGE_LEAK_WARN {
            log::warn!("{context}: |psi|^2 = {leak:.3e} near the box edge; enlarge the grid");
            false
        } else {
            true
        }
    }

    /// Applies a canonically ordered operator (unnormalized result): each
    /// term `c q̂^a p̂^b` multiplies the transform by `(ħk)^b`, transforms
    /// back, and multiplies by `c q^a` with ħ powers substituted.
    pub fn apply_operator(&self, x: &OperatorPoly<f64>, hbar: f64) -> Result<GridState> {
        apply_operator(x, self, hbar)
    }

    /// `⟨ψ|X ψ⟩` (assumes unit norm).
    pub fn expectation_operator(&self, x: &OperatorPoly<f64>, hbar: f64) -> Result<Complex64> {
        expectation_operator(x, self, hbar)
    }

    /// Text serialization; see [`GridState::write_text`].
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        self.write_text(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("serializer emits ASCII")
    }

    /// Writes the layout
    ///
    /// ```text
    /// gselab-grid-state 1
    /// n_points <N>
    /// q_min <float>
    /// q_max <float>
    /// <re_0> <im_0>
    /// ...
    /// <re_{N-1}> <im_{N-1}>
    /// ```
    ///
    /// Floats use the shortest representation that round-trips exactly.
    /// The reader skips blank lines and lines starting with `#`.
    pub fn write_text(&self, w: &mut impl Write) -> std::io::Result<()> {
        let mut s = String::with_capacity(48 * (self.amplitudes.len() + 4));
        let _ = writeln!(s, "{FORMAT_TAG} {FORMAT_VERSION}");
        let _ = writeln!(s, "n_points {}", self.spec.n_points);
        let _ = writeln!(s, "q_min {:e}", self.spec.q_min);
        let _ = writeln!(s, "q_max {:e}", self.spec.q_max);
        for a in &self.amplitudes {
            let _ = writeln!(s, "{:e} {:e}", a.re, a.im);
        }
        w.write_all(s.as_bytes())
    }

    pub fn from_text(text: &str) -> Result<GridState> {
        Self::read_text(text.as_bytes())
    }

    pub fn read_text(r: impl BufRead) -> Result<GridState> {
        let mut lines = r.lines();
        let mut next = |what: &str| -> Result<String> {
            loop {
                match lines.next() {
                    Some(line) => {
                        let line = line?;
                        let t = line.trim();
                        if !t.is_empty() && !t.starts_with('#') {
                            return Ok(line);
                        }
                    }
                    None => return Err(Error::Parse(format!("unexpected end of input, expected {what}"))),
                }
            }
        };
        let header = next("header")?;
        let expected = format!("{FORMAT_TAG} {FORMAT_VERSION}");
        if header.trim() != expected {
            return Err(Error::Parse(format!("bad header {header:?}, expected {expected:?}")));
        }
        let field = |line: String, key: &str| -> Result<String> {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(k), Some(v), None) if k == key => Ok(v.to_string()),
                _ => Err(Error::Parse(format!("expected `{key} <value>`, got {line:?}"))),
            }
        };
        let parse_f = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))) };
        let n: usize = field(next("n_points")?, "n_points")?
            .parse()
            .map_err(|e| Error::Parse(format!("n_points: {e}")))?;
        let q_min = parse_f(&field(next("q_min")?, "q_min")?)?;
        let q_max = parse_f(&field(next("q_max")?, "q_max")?)?;
        let spec = GridSpec::new(n, q_min, q_max)?;
        let mut amps = Vec::with_capacity(n);
        for i in 0..n {
            let line = next(&format!("sample {i}"))?;
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(re), Some(im), None) => amps.push(Complex64::new(parse_f(re)?, parse_f(im)?)),
                _ => return Err(Error::Parse(format!("sample {i}: expected `<re> <im>`, got {line:?}"))),
            }
        }
        GridState::new(spec, amps)
    }
}

const FORMAT_TAG: &str = "gselab-grid-state";
const FORMAT_VERSION: u32 = 1;

/// Unit-norm envelope of the given kind, centered at the origin.
pub fn make_envelope(kind: EnvelopeKind, spec: &GridSpec) -> Result<GridState> {
    kind.validate()?;
    let hw = kind.half_width();
    if -hw < spec.q_min || hw > spec.q_max {
        return Err(Error::EnvelopeTooWide {
            half_width: hw,
            q_min: spec.q_min,
            q_max: spec.q_max,
        });
    }
    GridState::from_fn(*spec, |q| Complex64::new(kind.sample(q), 0.0))?.normalize()
}

/// See [`GridState::apply_operator`]. Only one degree of freedom is supported.
pub fn apply_operator(x: &OperatorPoly<f64>, s: &GridState, hbar: f64) -> Result<GridState> {
    if x.n_dof() != 1 {
        return Err(Error::UnsupportedDof { found: x.n_dof() });
    }
    let n = s.amplitudes.len();
    // Group terms by p power: for each b, a polynomial in q.
    let mut by_p: std::collections::BTreeMap<u32, Vec<Complex64>> = Default::default();
    for (m, c) in x.numeric_terms(hbar) {
        let (a, b) = (m.q_power(0) as usize, m.p_power(0));
        let row = by_p.entry(b).or_default();
        if row.len() <= a {
            row.resize(a + 1, Complex64::new(0.0, 0.0));
        }
        row[a] += c;
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if by_p.is_empty() {
        return Ok(GridState::from_raw(s.spec, out));
    }
    let mut transformed = s.amplitudes.clone();
    fft::forward(&mut transformed);
    let hk: Vec<f64> = s.spec.wavenumbers().iter().map(|k| hbar * k).collect();
    let positions = s.spec.positions();
    for (b, qpoly) in by_p {
        let mut buf: Vec<Complex64> = transformed
            .iter()
            .zip(&hk)
            .map(|(x, p)| x * p.powi(b as i32))
            .collect();
        fft::inverse(&mut buf);
        for ((o, v), &q) in out.iter_mut().zip(&buf).zip(&positions) {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in qpoly.iter().rev() {
                acc = acc * q + c;
            }
            *o += acc * v;
        }
    }
    Ok(GridState::from_raw(s.spec, out))
}

/// See [`GridState::expectation_operator`].
pub fn expectation_operator(x: &OperatorPoly<f64>, s: &GridState, hbar: f64) -> Result<Complex64> {
    s.inner_product(&apply_operator(x, s, hbar)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HbarSeries;
    use crate::poly::Monomial;

    fn spec() -> GridSpec {
        GridSpec::centered(1024, 20.0).unwrap()
    }

    fn gaussian(sigma: f64) -> GridState {
        make_envelope(EnvelopeKind::Gaussian { sigma }, &spec()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(100, 0.0, 1.0).is_err());
        assert!(GridSpec::new(64, 1.0, 1.0).is_err());
        assert!(GridSpec::new(64, 0.0, f64::INFINITY).is_err());
        let s = GridSpec::new(8, 0.0, 1.0).unwrap();
        assert_eq!(s.dq(), 0.125);
        assert_eq!((0..8).map(|j| s.frequency(j)).collect::<Vec<_>>(), vec![0, 1, 2, 3, -4, -3, -2, -1]);
    }

    #[test]
    fn normalize_examples() {
        let s = GridSpec::new(8, 0.0, 1.0).unwrap();
        let ones = GridState::from_fn(s, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(ones.normalize().unwrap(), ones);
        let doubled = ones.scaled(Complex64::new(2.0, 0.0));
        assert_eq!(doubled.normalize().unwrap(), ones);
        let zero = ones.scaled(Complex64::new(0.0, 0.0));
        assert!(matches!(zero.normalize(), Err(Error::ZeroState)));
        assert!((gaussian(1.3).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_and_overlap() {
        let g = gaussian(1.0);
        let h1 = make_envelope(EnvelopeKind::Hermite { order: 1, sigma: 1.0 }, &spec()).unwrap();
        assert!(g.inner_product(&h1).unwrap().norm() < 1e-12);
        assert!((g.inner_product(&g).unwrap().re - 1.0).abs() < 1e-12);
        assert!((g.metric_distance(&h1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_moments() {
        let hbar = 0.7;
        let sigma = 1.2;
        let g = gaussian(sigma);
        assert!(g.expectation_q().abs() < 1e-10 && g.expectation_p(hbar).abs() < 1e-10);
        assert!((g.position_variance() - sigma * sigma).abs() < 1e-10);
        assert!((g.momentum_variance(hbar) - hbar * hbar / (4.0 * sigma * sigma)).abs() < 1e-10);
        assert!((g.uncertainty_product(hbar) - hbar * hbar / 4.0).abs() < 1e-10);
        let h1 = make_envelope(EnvelopeKind::Hermite { order: 1, sigma }, &spec()).unwrap();
        assert!((h1.uncertainty_product(hbar) - 9.0 * hbar * hbar / 4.0).abs() < 1e-10);
    }

    #[test]
    fn parseval() {
        let g = gaussian(0.8).modulated(1.3, 1.0).translated(2.2);
        let dk = g.spec().dk();
        let sum: f64 = g.momentum_amplitudes().iter().map(|x| x.norm_sqr()).sum::<f64>() * dk;
        assert!((sum - g.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn momentum_amplitudes_of_gaussian() {
        // ψ̃(k) = (2σ²/π)^{1/4} e^{−σ²k²}.
        let sigma = 1.1;
        let g = gaussian(sigma);
        let k = g.spec().wavenumbers();
        for (amp, k) in g.momentum_amplitudes().iter().zip(&k).take(20) {
            let exact = (2.0 * sigma * sigma / PI).powf(0.25) * (-sigma * sigma * k * k).exp();
            assert!((amp - Complex64::new(exact, 0.0)).norm() < 1e-12, "{amp} vs {exact}");
        }
    }

    #[test]
    fn translation_and_modulation() {
        let hbar = 1.0;
        let g = gaussian(1.0);
        let p0 = 7.0 * g.spec().dk();
        let moved = g.translated(3.0).modulated(p0, hbar);
        assert!((moved.expectation_q() - 3.0).abs() < 1e-10);
        assert!((moved.expectation_p(hbar) - p0).abs() < 1e-10);
        let frac = g.translated(0.123);
        let exact = GridState::from_fn(*g.spec(), |q| Complex64::new((-(q - 0.123f64).powi(2) / 4.0).exp(), 0.0))
            .unwrap()
            .normalize()
            .unwrap();
        assert!(frac.l2_distance(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn centering() {
        let hbar = 1.0;
        let g = gaussian(1.0);
        assert!(g.center_envelope(hbar).l2_distance(&g).unwrap() < 1e-12);
        let p0 = 5.0 * g.spec().dk();
        let moved = g.translated(3.0).modulated(p0, hbar);
        let c = moved.center_envelope(hbar);
        assert!(c.expectation_q().abs() < 1e-8 && c.expectation_p(hbar).abs() < 1e-8);
        assert!(c.metric_distance(&g).unwrap() < 1e-12);
        assert!(c.center_envelope(hbar).l2_distance(&c).unwrap() < 1e-10);
    }

    #[test]
    fn envelope_kinds_are_centered() {
        for kind in [
            EnvelopeKind::Gaussian { sigma: 1.0 },
            EnvelopeKind::Hermite { order: 1, sigma: 1.0 },
            EnvelopeKind::Hermite { order: 3, sigma: 0.7 },
            EnvelopeKind::SymmetricDoubleGaussian {
                sigma: 1.0,
                separation: 6.0,
            },
        ] {
            let e = make_envelope(kind, &spec()).unwrap();
            assert!((e.norm() - 1.0).abs() < 1e-12);
            assert!(e.expectation_q().abs() < 1e-10 && e.expectation_p(1.0).abs() < 1e-10);
        }
        let narrow = GridSpec::centered(64, 5.0).unwrap();
        assert!(matches!(
            make_envelope(EnvelopeKind::Gaussian { sigma: 1.0 }, &narrow),
            Err(Error::EnvelopeTooWide { .. })
        ));
    }

    #[test]
    fn operator_application() {
        let hbar = 1.0;
        let sigma = 1.0;
        let g = gaussian(sigma);
        let qhat = OperatorPoly::<f64>::q_hat(1, 0);
        assert!(g.expectation_operator(&qhat, hbar).unwrap().norm() < 1e-12);
        let p0 = 4.0 * g.spec().dk();
        let w = g.modulated(p0, hbar);
        let p2 = OperatorPoly::<f64>::monomial(Monomial::qp(0, 2), HbarSeries::one());
        let e = w.expectation_operator(&p2, hbar).unwrap();
        assert!((e.re - (p0 * p0 + hbar * hbar / (4.0 * sigma * sigma))).abs() < 1e-10 && e.im.abs() < 1e-12);
        let mut sym = OperatorPoly::<f64>::monomial(Monomial::qp(1, 1), HbarSeries::one());
        sym.add_term(Monomial::one(1), HbarSeries::term(1, Complex64::new(0.0, -0.5)));
        assert!(g.expectation_operator(&sym, hbar).unwrap().norm() < 1e-10);
        let id = OperatorPoly::<f64>::identity(1);
        assert!((g.expectation_operator(&id, hbar).unwrap() - 1.0).norm() < 1e-12);
        assert!(g.apply_operator(&OperatorPoly::zero(2), hbar).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = gaussian(1.0).modulated(0.37, 1.0).with_phase(0.3);
        let back = GridState::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g);
        let commented = format!("# produced by a test\n#\n{}", g.to_text());
        assert_eq!(GridState::from_text(&commented).unwrap(), g);
        assert!(GridState::from_text("nope").is_err());
        let truncated: String = g.to_text().lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(GridState::from_text(&truncated).is_err());
    }

    #[test]
    fn edges() {
        assert!(gaussian(1.0).check_edges("test"));
        let flat = GridState::from_fn(spec(), |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(!flat.check_edges("test"));
    }
}
