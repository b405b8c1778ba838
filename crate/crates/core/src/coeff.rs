use std::fmt;
use std::ops::Neg;

use num_rational::Rational64;
use num_traits::Num;

/// Scalar field for polynomial and operator coefficients.
///
/// `f64` is used for numerics. `Rational64` makes the ordering algebra exact,
/// which is what the symbolic comparisons in the test suites rely on.
pub trait Coeff:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Num
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn to_f64(&self) -> f64;

    /// Equality up to the natural tolerance of the field (exact for rationals).
    fn close_to(&self, other: &Self) -> bool;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl Coeff for f64 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn close_to(&self, other: &Self) -> bool {
        let scale = 1.0f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= 1e-12 * scale
    }
}

impl Coeff for Rational64 {
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational64::new(numer, denom)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn close_to(&self, other: &Self) -> bool {
        self == other
    }
}

/// Integer power by repeated multiplication; exact for rationals.
pub fn powi<C: Coeff>(base: &C, exp: u32) -> C {
    let mut acc = C::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as i64;
    let n = n as i64;
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(5), 120);
    }

    #[test]
    fn rational_power_is_exact() {
        let x = Rational64::new(2, 3);
        assert_eq!(powi(&x, 3), Rational64::new(8, 27));
        assert!(!x.close_to(&Rational64::new(2, 3 + 1)));
    }
}
