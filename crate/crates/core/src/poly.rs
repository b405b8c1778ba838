//! Real polynomials on phase space.
//!
//! A [`Poly`] is a sparse map from exponent multi-indices to coefficients. The
//! canonical form never stores a zero coefficient, so structural equality is
//! polynomial equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};



use crate::coeff::{binomial, powi, Coeff};
use crate::error::{Error, Result};
use crate::hamiltonian::PhasePoint;

/// Exponents of q and p, one entry per degree of freedom.
///
/// The same type indexes canonical operator terms, where it denotes
/// `q̂^a p̂^b` per degree of freedom with every `q̂` to the left.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    q: Vec<u32>,
    p: Vec<u32>,
}

impl Monomial {
    pub fn new(q: Vec<u32>, p: Vec<u32>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                found: p.len(),
            });
        }
        if q.is_empty() {
            return Err(Error::InvalidParameter("monomial needs at least one degree of freedom".into()));
        }
        Ok(Monomial { q, p })
    }

    pub fn one(n_dof: usize) -> Self {
        Monomial {
            q: vec![0; n_dof],
            p: vec![0; n_dof],
        }
    }

    /// Single-degree-of-freedom shorthand for `q^a p^b`.
    pub fn qp(a: u32, b: u32) -> Self {
        Monomial { q: vec![a], p: vec![b] }
    }

    pub fn n_dof(&self) -> usize {
        self.q.len()
    }

    pub fn q_powers(&self) -> &[u32] {
        &self.q
    }

    pub fn p_powers(&self) -> &[u32] {
        &self.p
    }

    pub fn q_power(&self, dof: usize) -> u32 {
        self.q[dof]
    }

    pub fn p_power(&self, dof: usize) -> u32 {
        self.p[dof]
    }

    pub(crate) fn q_power_mut(&mut self, dof: usize) -> &mut u32 {
        &mut self.q[dof]
    }

    pub(crate) fn p_power_mut(&mut self, dof: usize) -> &mut u32 {
        &mut self.p[dof]
    }

    pub fn degree(&self) -> u32 {
        self.q.iter().chain(&self.p).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn has_q(&self) -> bool {
        self.q.iter().any(|&a| a > 0)
    }

    pub fn has_p(&self) -> bool {
        self.p.iter().any(|&b| b > 0)
    }

    pub fn power(&self, coord: Coordinate) -> u32 {
        match coord {
            Coordinate::Q(k) => self.q[k],
            Coordinate::P(k) => self.p[k],
        }
    }

    fn power_mut(&mut self, coord: Coordinate) -> &mut u32 {
        match coord {
            Coordinate::Q(k) => &mut self.q[k],
            Coordinate::P(k) => &mut self.p[k],
        }
    }

    /// Exponent-wise sum (product of commuting monomials).
    pub fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            q: self.q.iter().zip(&other.q).map(|(a, b)| a + b).collect(),
            p: self.p.iter().zip(&other.p).map(|(a, b)| a + b).collect(),
        }
    }
}

/// A phase-space coordinate `q_k` or `p_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coordinate {
    Q(usize),
    P(usize),
}

impl Coordinate {
    pub fn dof(&self) -> usize {
        match *self {
            Coordinate::Q(k) | Coordinate::P(k) => k,
        }
    }
}

/// Sparse polynomial in `q_1..q_n, p_1..p_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C = f64> {
    n_dof: usize,
    terms: BTreeMap<Monomial, C>,
}

/// Classical observable with real floating-point coefficients.
pub type PolyObservable = Poly<f64>;

impl<C: Coeff> Poly<C> {
    pub fn zero(n_dof: usize) -> Self {
        assert!(n_dof > 0, "polynomial needs at least one degree of freedom");
        Poly {
            n_dof,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_dof: usize, c: C) -> Self {
        let mut poly = Self::zero(n_dof);
        poly.add_term(Monomial::one(n_dof), c);
        poly
    }

    /// The coordinate function `q_k` or `p_k`.
    pub fn variable(n_dof: usize, coord: Coordinate) -> Self {
        assert!(coord.dof() < n_dof, "coordinate out of range");
        let mut m = Monomial::one(n_dof);
        *m.power_mut(coord) = 1;
        let mut poly = Self::zero(n_dof);
        poly.add_term(m, C::one());
        poly
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut poly = Self::zero(m.n_dof());
        poly.add_term(m, c);
        poly
    }

    pub fn from_terms<I>(n_dof: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, C)>,
    {
        if n_dof == 0 {
            return Err(Error::InvalidParameter("n_dof must be positive".into()));
        }
        let mut poly = Self::zero(n_dof);
        for (m, c) in terms {
            if m.n_dof() != n_dof {
                return Err(Error::DimensionMismatch {
                    expected: n_dof,
                    found: m.n_dof(),
                });
            }
            poly.add_term(m, c);
        }
        Ok(poly)
    }

    /// Adds `c·m`, merging with an existing term and dropping exact zeros.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        debug_assert_eq!(m.n_dof(), self.n_dof);
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn n_dof(&self) -> usize {
        self.n_dof
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
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

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Every monomial depends on q alone or on p alone (constants allowed).
    pub fn is_separable(&self) -> bool {
        self.terms.keys().all(|m| !(m.has_q() && m.has_p()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n_dof);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.n_dof, C::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.n_dof);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Exact `∂^order f / ∂coord^order`.
    pub fn partial_derivative(&self, coord: Coordinate, order: u32) -> Self {
        assert!(coord.dof() < self.n_dof, "coordinate out of range");
        let mut out = Self::zero(self.n_dof);
        for (m, c) in &self.terms {
            let e = m.power(coord);
            if e < order {
                continue;
            }
            // e (e-1) ... (e-order+1)
            let falling: i64 = (0..order).map(|i| (e - i) as i64).product();
            let mut dm = m.clone();
            *dm.power_mut(coord) = e - order;
            out.add_term(dm, c.clone() * C::from_int(falling));
        }
        out
    }

    /// Terms of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        let mut out = Self::zero(self.n_dof);
        for (m, c) in &self.terms {
            if m.degree() == k {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Re-expands `f(q0 + u, p0 + u')` as a polynomial in the displacement.
    ///
    /// The coefficients of the result are the Taylor coefficients of `f` at
    /// `(q0, p0)`.
    pub fn shifted(&self, q0: &[C], p0: &[C]) -> Result<Self> {
        if q0.len() != self.n_dof || p0.len() != self.n_dof {
            return Err(Error::DimensionMismatch {
                expected: self.n_dof,
                found: q0.len().min(p0.len()),
            });
        }
        let mut out = Self::zero(self.n_dof);
        for (m, c) in &self.terms {
            // Product over coordinates of (x0 + u)^e = Σ_j C(e,j) x0^(e-j) u^j.
            let mut partial: Vec<(Monomial, C)> = vec![(Monomial::one(self.n_dof), c.clone())];
            let coords = (0..self.n_dof)
                .map(|k| (Coordinate::Q(k), &q0[k]))
                .chain((0..self.n_dof).map(|k| (Coordinate::P(k), &p0[k])));
            for (coord, x0) in coords {
                let e = m.power(coord);
                if e == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (pm, pc) in &partial {
                    for j in 0..=e {
                        let w = C::from_int(binomial(e, j)) * powi(x0, e - j);
                        if w.is_zero() {
                            continue;
                        }
                        let mut nm = pm.clone();
                        *nm.power_mut(coord) = j;
                        next.push((nm, pc.clone() * w));
                    }
                }
                partial = next;
            }
            for (pm, pc) in partial {
                out.add_term(pm, pc);
            }
        }
        Ok(out)
    }

    fn check_same_dof(&self, other: &Self) {
        assert_eq!(self.n_dof, other.n_dof, "polynomials have different n_dof");
    }
}

impl PolyObservable {
    /// `Σ c · Π q_i^m_i p_i^k_i` at `z`.
    pub fn evaluate(&self, z: &PhasePoint) -> Result<f64> {
        if z.n_dof() != self.n_dof {
            return Err(Error::DimensionMismatch {
                expected: self.n_dof,
                found: z.n_dof(),
            });
        }
        Ok(self.evaluate_slices(&z.q, &z.p))
    }

    pub(crate) fn evaluate_slices(&self, q: &[f64], p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = *c;
                for k in 0..self.n_dof {
                    if m.q[k] > 0 {
                        v *= q[k].powi(m.q[k] as i32);
                    }
                    if m.p[k] > 0 {
                        v *= p[k].powi(m.p[k] as i32);
                    }
                }
                v
            })
            .sum()
    }
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        self.check_same_dof(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        self.check_same_dof(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        self.check_same_dof(rhs);
        let mut out = Poly::zero(self.n_dof);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        self.scale(&-C::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<C: Coeff> $tr for Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for k in 0..self.n_dof {
                let suffix = if self.n_dof > 1 { format!("{}", k + 1) } else { String::new() };
                if m.q[k] > 0 {
                    write!(f, " q{suffix}^{}", m.q[k])?;
                }
                if m.p[k] > 0 {
                    write!(f, " p{suffix}^{}", m.p[k])?;
                }
            }
        }
        Ok(())
    }
}
