//! Canonically ordered polynomials in the quantal operators q̂ and p̂.
//!
//! Every term is stored as `q̂^a p̂^b` per degree of freedom with all q̂ factors
//! to the left. Coefficients are finite power series in ħ with complex
//! entries, so the commutator `[q̂_j, p̂_k] = iħ δ_jk` is applied exactly.

use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};


use crate::coeff::{binomial, factorial, Coeff};
use crate::error::{Error, Result};
use crate::poly::Monomial;

/// `Σ_j c_j ħ^j` with complex `c_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct HbarSeries<C = f64> {
    terms: BTreeMap<u32, Complex<C>>,
}

impl<C: Coeff> HbarSeries<C> {
    pub fn zero() -> Self {
        HbarSeries { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::real(C::one())
    }

    pub fn real(c: C) -> Self {
        Self::term(0, Complex::new(c, C::zero()))
    }

    /// `c ħ^power`.
    pub fn term(power: u32, c: Complex<C>) -> Self {
        let mut s = Self::zero();
        s.add_term(power, c);
        s
    }

    /// `(-iħ)^j`.
    pub fn minus_i_hbar_pow(j: u32) -> Self {
        let minus_i = Complex::new(C::zero(), -C::one());
        let mut c = Complex::new(C::one(), C::zero());
        for _ in 0..j {
            c = c * minus_i.clone();
        }
        Self::term(j, c)
    }

    pub fn add_term(&mut self, power: u32, c: Complex<C>) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&power) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(power, sum);
                }
            }
            None => {
                self.terms.insert(power, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Complex<C>)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Coefficient of `ħ^power`.
    pub fn get(&self, power: u32) -> Complex<C> {
        self.terms.get(&power).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn max_power(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Complex<C>) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, v.clone() * c.clone());
        }
        out
    }

    pub fn scale_real(&self, c: &C) -> Self {
        self.scale(&Complex::new(c.clone(), C::zero()))
    }

    pub fn conj(&self) -> Self {
        HbarSeries {
            terms: self.terms.iter().map(|(k, v)| (*k, v.conj())).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, v) in &other.terms {
            self.add_term(*k, v.clone());
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                out.add_term(ka + kb, va.clone() * vb.clone());
            }
        }
        out
    }

    /// Numerical value with ħ substituted.
    pub fn evaluate(&self, hbar: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, v)| Complex64::new(v.re.to_f64(), v.im.to_f64()) * hbar.powi(*k as i32))
            .sum()
    }

    pub fn close_to(&self, other: &Self) -> bool {
        let keys: std::collections::BTreeSet<u32> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter().all(|k| {
            let a = self.get(k);
            let b = other.get(k);
            a.re.close_to(&b.re) && a.im.close_to(&b.im)
        })
    }
}

/// Letters of an operator word: `Q(k)` is q̂_k, `P(k)` is p̂_k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Q(usize),
    P(usize),
}

impl Letter {
    pub fn dof(&self) -> usize {
        match *self {
            Letter::Q(k) | Letter::P(k) => k,
        }
    }
}

/// A coefficient times an ordered product of letters.
#[derive(Clone, Debug, PartialEq)]
pub struct Word<C = f64> {
    pub coeff: HbarSeries<C>,
    pub letters: Vec<Letter>,
}

impl<C: Coeff> Word<C> {
    pub fn new(coeff: HbarSeries<C>, letters: Vec<Letter>) -> Self {
        Word { coeff, letters }
    }

    pub fn unit(letters: Vec<Letter>) -> Self {
        Word::new(HbarSeries::one(), letters)
    }
}

/// Canonically ordered operator polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPoly<C = f64> {
    n_dof: usize,
    terms: BTreeMap<Monomial, HbarSeries<C>>,
}

/// Operator polynomial with floating-point coefficients.
pub type CanonicalOperatorPoly = OperatorPoly<f64>;

impl<C: Coeff> OperatorPoly<C> {
    pub fn zero(n_dof: usize) -> Self {
        assert!(n_dof > 0, "operator needs at least one degree of freedom");
        OperatorPoly {
            n_dof,
            terms: BTreeMap::new(),
        }
    }

    /// `c · 1̂`.
    pub fn scalar(n_dof: usize, c: HbarSeries<C>) -> Self {
        let mut out = Self::zero(n_dof);
        out.add_term(Monomial::one(n_dof), c);
        out
    }

    pub fn identity(n_dof: usize) -> Self {
        Self::scalar(n_dof, HbarSeries::one())
    }

    /// Single canonical term `c · q̂^a p̂^b`.
    pub fn monomial(m: Monomial, c: HbarSeries<C>) -> Self {
        let mut out = Self::zero(m.n_dof());
        out.add_term(m, c);
        out
    }

    pub fn q_hat(n_dof: usize, dof: usize) -> Self {
        let mut m = Monomial::one(n_dof);
        *m.q_power_mut(dof) = 1;
        Self::monomial(m, HbarSeries::one())
    }

    pub fn p_hat(n_dof: usize, dof: usize) -> Self {
        let mut m = Monomial::one(n_dof);
        *m.p_power_mut(dof) = 1;
        Self::monomial(m, HbarSeries::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: HbarSeries<C>) {
        debug_assert_eq!(m.n_dof(), self.n_dof);
        if c.is_zero() {
            return;
        }
        let mut merged = self.terms.remove(&m).unwrap_or_else(HbarSeries::zero);
        merged.add_assign(&c);
        if !merged.is_zero() {
            self.terms.insert(m, merged);
        }
    }

    pub fn n_dof(&self) -> usize {
        self.n_dof
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &HbarSeries<C>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> HbarSeries<C> {
        self.terms.get(m).cloned().unwrap_or_else(HbarSeries::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the operator is a multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(Monomial::is_constant)
    }

    pub fn scale(&self, c: &Complex<C>) -> Self {
        let mut out = Self::zero(self.n_dof);
        for (m, s) in &self.terms {
            out.add_term(m.clone(), s.scale(c));
        }
        out
    }

    pub fn scale_real(&self, c: &C) -> Self {
        self.scale(&Complex::new(c.clone(), C::zero()))
    }

    /// Canonical product `self · other`.
    ///
    /// Uses `p̂^b q̂^c = Σ_j j! C(b,j) C(c,j) (-iħ)^j q̂^(c-j) p̂^(b-j)` per
    /// degree of freedom; distinct degrees of freedom commute.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.n_dof, other.n_dof, "operators have different n_dof");
        let mut out = Self::zero(self.n_dof);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let base = ca.mul(cb);
                let mut partial: Vec<(Monomial, HbarSeries<C>)> = vec![(Monomial::one(self.n_dof), base)];
                for k in 0..self.n_dof {
                    let (a, b) = (ma.q_power(k), ma.p_power(k));
                    let (c, d) = (mb.q_power(k), mb.p_power(k));
                    let mut next = Vec::with_capacity(partial.len() * (b.min(c) as usize + 1));
                    for (pm, pc) in &partial {
                        for j in 0..=b.min(c) {
                            let weight = factorial(j) * binomial(b, j) * binomial(c, j);
                            let coeff = pc
                                .mul(&HbarSeries::minus_i_hbar_pow(j))
                                .scale_real(&C::from_int(weight));
                            let mut nm = pm.clone();
                            *nm.q_power_mut(k) = a + c - j;
                            *nm.p_power_mut(k) = b + d - j;
                            next.push((nm, coeff));
                        }
                    }
                    partial = next;
                }
                for (m, c) in partial {
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// Hermitian adjoint: reverse each word to `p̂^b q̂^a`, conjugate, and
    /// restore canonical order.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_dof);
        for (m, c) in &self.terms {
            let mut p_part = Monomial::one(self.n_dof);
            let mut q_part = Monomial::one(self.n_dof);
            for k in 0..self.n_dof {
                *p_part.p_power_mut(k) = m.p_power(k);
                *q_part.q_power_mut(k) = m.q_power(k);
            }
            let reordered = Self::monomial(p_part, c.conj()).product(&Self::monomial(q_part, HbarSeries::one()));
            out = &out + &reordered;
        }
        out
    }

    /// Term-by-term comparison up to the coefficient field's tolerance.
    pub fn close_to(&self, other: &Self) -> bool {
        if self.n_dof != other.n_dof {
            return false;
        }
        let zero = HbarSeries::zero();
        let keys: std::collections::BTreeSet<&Monomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .all(|m| self.terms.get(m).unwrap_or(&zero).close_to(other.terms.get(m).unwrap_or(&zero)))
    }

    /// `adjoint(X) = X`, exactly for rational coefficients and to
    /// floating-point tolerance for `f64`.
    pub fn is_hermitian(&self) -> bool {
        self.adjoint().close_to(self)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> OperatorPoly<D> {
        let mut out = OperatorPoly::zero(self.n_dof);
        for (m, s) in &self.terms {
            let mut ns = HbarSeries::zero();
            for (k, v) in s.terms() {
                ns.add_term(k, Complex::new(f(&v.re), f(&v.im)));
            }
            out.add_term(m.clone(), ns);
        }
        out
    }

    /// Coefficients with ħ substituted numerically.
    pub fn numeric_terms(&self, hbar: f64) -> Vec<(Monomial, Complex64)> {
        self.terms.iter().map(|(m, s)| (m.clone(), s.evaluate(hbar))).collect()
    }
}

/// Rewrites words to canonical order by repeated application of
/// `P_k Q_k → Q_k P_k − iħ`; letters of distinct degrees of freedom commute.
///
/// This is the literal rewriting procedure, independent of the closed-form
/// reordering used by [`OperatorPoly::product`].
pub fn normal_order_reduce<C: Coeff>(n_dof: usize, words: &[Word<C>]) -> Result<OperatorPoly<C>> {
    let mut pending: BTreeMap<Vec<Letter>, HbarSeries<C>> = BTreeMap::new();
    let push = |pending: &mut BTreeMap<Vec<Letter>, HbarSeries<C>>, letters: Vec<Letter>, c: HbarSeries<C>| {
        pending.entry(letters).or_insert_with(HbarSeries::zero).add_assign(&c);
    };
    for w in words {
        if let Some(bad) = w.letters.iter().find(|l| l.dof() >= n_dof) {
            return Err(Error::DimensionMismatch {
                expected: n_dof,
                found: bad.dof() + 1,
            });
        }
        let mut letters = w.letters.clone();
        // Stable: keeps the relative order within each degree of freedom.
        letters.sort_by_key(Letter::dof);
        push(&mut pending, letters, w.coeff.clone());
    }

    let mut out = OperatorPoly::zero(n_dof);
    while let Some((letters, c)) = pending.pop_first() {
        if c.is_zero() {
            continue;
        }
        let swap = letters
            .windows(2)
            .position(|w| matches!((w[0], w[1]), (Letter::P(a), Letter::Q(b)) if a == b));
        match swap {
            Some(i) => {
                let mut swapped = letters.clone();
                swapped.swap(i, i + 1);
                push(&mut pending, swapped, c.clone());
                let mut contracted = letters;
                contracted.drain(i..i + 2);
                push(&mut pending, contracted, c.mul(&HbarSeries::minus_i_hbar_pow(1)));
            }
            None => {
                let mut m = Monomial::one(n_dof);
                for l in &letters {
                    match *l {
                        Letter::Q(k) => *m.q_power_mut(k) += 1,
                        Letter::P(k) => *m.p_power_mut(k) += 1,
                    }
                }
                out.add_term(m, c);
            }
        }
    }
    Ok(out)
}

impl<C: Coeff> Add for &OperatorPoly<C> {
    type Output = OperatorPoly<C>;
    fn add(self, rhs: &OperatorPoly<C>) -> OperatorPoly<C> {
        assert_eq!(self.n_dof, rhs.n_dof, "operators have different n_dof");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Neg for &OperatorPoly<C> {
    type Output = OperatorPoly<C>;
    fn neg(self) -> OperatorPoly<C> {
        self.scale_real(&-C::one())
    }
}

impl<C: Coeff> Sub for &OperatorPoly<C> {
    type Output = OperatorPoly<C>;
    fn sub(self, rhs: &OperatorPoly<C>) -> OperatorPoly<C> {
        self + &(-rhs)
    }
}

impl<C: Coeff> Mul for &OperatorPoly<C> {
    type Output = OperatorPoly<C>;
    fn mul(self, rhs: &OperatorPoly<C>) -> OperatorPoly<C> {
        self.product(rhs)
    }
}

fn fmt_complex<C: Coeff>(c: &Complex<C>) -> String {
    let re_zero = c.re.is_zero();
    let im_zero = c.im.is_zero();
    match (re_zero, im_zero) {
        (_, true) => format!("{}", c.re),
        (true, false) => format!("{}i", c.im),
        (false, false) => {
            if c.im.is_negative() {
                format!("{}-{}i", c.re, -c.im.clone())
            } else {
                format!("{}+{}i", c.re, c.im)
            }
        }
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    let n = m.n_dof();
    let mut parts = Vec::new();
    for k in 0..n {
        let suffix = if n > 1 { format!("{}", k + 1) } else { String::new() };
        if m.q_power(k) > 0 {
            parts.push(format!("q{suffix}^{}", m.q_power(k)));
        }
        if m.p_power(k) > 0 {
            parts.push(format!("p{suffix}^{}", m.p_power(k)));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}

/// Stable text rendering, e.g. `q^1 p^1 (1) + 1 (-0.5i hbar)`.
///
/// Terms are ordered by descending total degree, then descending q powers.
/// Each term prints its canonical monomial (`1` for the identity; `q`/`p`
/// carry a 1-based index when there are several degrees of freedom and are
/// grouped by degree of freedom, q before p within each) and,
/// in parentheses, its ħ series joined by ` + `, with `hbar` or `hbar^j`
/// after each non-constant power. The zero operator prints as `0`.
impl<C: Coeff> fmt::Display for OperatorPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Monomial, &HbarSeries<C>)> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            b.degree()
                .cmp(&a.degree())
                .then_with(|| b.q_powers().cmp(a.q_powers()))
                .then_with(|| b.p_powers().cmp(a.p_powers()))
        });
        let rendered: Vec<String> = ordered
            .into_iter()
            .map(|(m, s)| {
                let series: Vec<String> = s
                    .terms()
                    .map(|(k, c)| match k {
                        0 => fmt_complex(c),
                        1 => format!("{} hbar", fmt_complex(c)),
                        _ => format!("{} hbar^{k}", fmt_complex(c)),
                    })
                    .collect();
                format!("{} ({})", fmt_monomial(m), series.join(" + "))
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}
