//! The quantization map and its λ-deformation.
//!
//! Quantization expands a classical polynomial around the expectation point
//! `(⟨q⟩, ⟨p⟩)` as an operator Taylor series in the fluctuations
//! `Δ̂ = (q̂ − ⟨q⟩, p̂ − ⟨p⟩)`, keeping every ordering of the noncommuting
//! factors. For a monomial in the fluctuations this is the Weyl-symmetric
//! product, which in q̂-left canonical order reads
//!
//! ```text
//! W(u^m v^n) = Σ_j (−iħ/2)^j · j! · C(m,j) · C(n,j) · u^(m−j) v^(n−j)
//! ```
//!
//! for any canonical pair `[u, v] = iħ`. The deformed map scales the
//! fluctuations by λ, so the Taylor layer of order k picks up a factor λ^k.

use num_complex::Complex;


use crate::coeff::{binomial, factorial, powi, Coeff};
use crate::error::{Error, Result};
use crate::hamiltonian::{DrivenHamiltonian, PhasePoint};
use crate::operator::{HbarSeries, OperatorPoly};
use crate::poly::{Monomial, Poly};

/// How Taylor layers are weighted by λ in the deformed generator.
///
/// `Raw` applies λ^k to layer k, the literal deformation; at λ = 0 only the
/// scalar `H(⟨q⟩, ⟨p⟩)` survives. `Interpolating` applies 1 to layer 0 and
/// λ^(k−1) to layer k ≥ 1. Both agree at λ = 1; at λ = 0 the interpolating
/// generator keeps the first-order fluctuation terms, which is the classical
/// wave equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GeneratorMode {
    Raw,
    #[default]
    Interpolating,
}

impl GeneratorMode {
    /// Weight of the Taylor layer of total order `k`.
    pub fn layer_weight<C: Coeff>(self, lambda: &C, k: u32) -> C {
        match self {
            GeneratorMode::Raw => powi(lambda, k),
            GeneratorMode::Interpolating if k == 0 => C::one(),
            GeneratorMode::Interpolating => powi(lambda, k - 1),
        }
    }
}

/// Per-degree-of-freedom Weyl expansion of `u^m v^n`: `(a, b, j, weight)`
/// meaning `weight · (−iħ)^j · u^a v^b`.
fn weyl_single<C: Coeff>(m: u32, n: u32) -> Vec<(u32, u32, u32, C)> {
    (0..=m.min(n))
        .map(|j| {
            let numer = factorial(j) * binomial(m, j) * binomial(n, j);
            let weight = C::from_ratio(numer, 1i64 << j);
            (m - j, n - j, j, weight)
        })
        .collect()
}

/// Weyl (fully symmetrized) quantization of a classical polynomial, reduced
/// to canonical order. The result is Hermitian for real input.
pub fn weyl_quantize<C: Coeff>(f: &Poly<C>) -> OperatorPoly<C> {
    let n = f.n_dof();
    let mut out = OperatorPoly::zero(n);
    for (m, c) in f.terms() {
        let mut partial: Vec<(Monomial, HbarSeries<C>)> = vec![(Monomial::one(n), HbarSeries::real(c.clone()))];
        for k in 0..n {
            let (mq, mp) = (m.q_power(k), m.p_power(k));
            if mq == 0 && mp == 0 {
                continue;
            }
            let expansion = weyl_single::<C>(mq, mp);
            let mut next = Vec::with_capacity(partial.len() * expansion.len());
            for (pm, pc) in &partial {
                for (a, b, j, w) in &expansion {
                    let mut nm = pm.clone();
                    *nm.q_power_mut(k) = *a;
                    *nm.p_power_mut(k) = *b;
                    let coeff = pc.mul(&HbarSeries::minus_i_hbar_pow(*j)).scale_real(w);
                    next.push((nm, coeff));
                }
            }
            partial = next;
        }
        for (pm, pc) in partial {
            out.add_term(pm, pc);
        }
    }
    out
}

/// Replaces fluctuation monomials `Δq^a Δp^b` (stored canonically) by
/// `(q̂ − q̄)^a (p̂ − p̄)^b`, which is already in q̂-left order.
fn substitute_fluctuations<C: Coeff>(delta_op: &OperatorPoly<C>, zq: &[C], zp: &[C]) -> OperatorPoly<C> {
    let n = delta_op.n_dof();
    let mut out = OperatorPoly::zero(n);
    for (m, c) in delta_op.terms() {
        let mut partial: Vec<(Monomial, C)> = vec![(Monomial::one(n), C::one())];
        for k in 0..n {
            let (a, b) = (m.q_power(k), m.p_power(k));
            let mut next = Vec::with_capacity(partial.len() * ((a + 1) * (b + 1)) as usize);
            for (pm, pc) in &partial {
                for i in 0..=a {
                    let wq = C::from_int(binomial(a, i)) * powi(&-zq[k].clone(), a - i);
                    if wq.is_zero() {
                        continue;
                    }
                    for l in 0..=b {
                        let wp = C::from_int(binomial(b, l)) * powi(&-zp[k].clone(), b - l);
                        if wp.is_zero() {
                            continue;
                        }
                        let mut nm = pm.clone();
                        *nm.q_power_mut(k) = i;
                        *nm.p_power_mut(k) = l;
                        next.push((nm, pc.clone() * wq.clone() * wp));
                    }
                }
            }
            partial = next;
        }
        for (pm, w) in partial {
            out.add_term(pm, c.scale_real(&w));
        }
    }
    out
}

/// Taylor layers `D_0, D_1, …, D_deg` of `f` around `(zq, zp)`: `D_k` is the
/// Weyl-symmetrized `(Δ̂·∇)^k f / k!` with derivatives taken at the
/// expansion point, written in terms of q̂ and p̂.
pub fn taylor_layers<C: Coeff>(f: &Poly<C>, zq: &[C], zp: &[C]) -> Result<Vec<OperatorPoly<C>>> {
    let shifted = f.shifted(zq, zp)?;
    Ok((0..=shifted.degree())
        .map(|k| substitute_fluctuations(&weyl_quantize(&shifted.homogeneous_part(k)), zq, zp))
        .collect())
}

/// λ-deformed generator of an undriven polynomial `f` at expansion point
/// `(zq, zp)`. Exact over rational coefficients.
pub fn deformed_generator_poly<C: Coeff>(
    f: &Poly<C>,
    zq: &[C],
    zp: &[C],
    lambda: &C,
    mode: GeneratorMode,
) -> Result<OperatorPoly<C>> {
    let shifted = f.shifted(zq, zp)?;
    let mut weighted = Poly::zero(f.n_dof());
    for (m, c) in shifted.terms() {
        weighted.add_term(m.clone(), c.clone() * mode.layer_weight(lambda, m.degree()));
    }
    Ok(substitute_fluctuations(&weyl_quantize(&weighted), zq, zp))
}

/// The generator `Ĥ_q(ψ; λ)` of the generalized Schrödinger equation for a
/// driven Hamiltonian, evaluated at the state's expectation point `zbar`
/// and time `t`. Drive terms enter with their scalar value at `t`.
pub fn deformed_generator(
    h: &DrivenHamiltonian,
    zbar: &PhasePoint,
    t: f64,
    lambda: f64,
    mode: GeneratorMode,
) -> Result<OperatorPoly<f64>> {
    if zbar.n_dof() != h.n_dof() {
        return Err(Error::DimensionMismatch {
            expected: h.n_dof(),
            found: zbar.n_dof(),
        });
    }
    if !zbar.is_finite() {
        return Err(Error::NonFinite { what: "expectation point" });
    }
    if !(lambda.is_finite() && t.is_finite()) {
        return Err(Error::NonFinite { what: "lambda or time" });
    }
    deformed_generator_poly(&h.instantaneous(t), &zbar.q, &zbar.p, &lambda, mode)
}

/// Generators for each λ in `lambdas` at fixed `zbar` and `t`.
pub fn lambda_is_smooth_probe(
    h: &DrivenHamiltonian,
    zbar: &PhasePoint,
    t: f64,
    mode: GeneratorMode,
    lambdas: &[f64],
) -> Result<Vec<OperatorPoly<f64>>> {
    lambdas
        .iter()
        .map(|&lambda| deformed_generator(h, zbar, t, lambda, mode))
        .collect()
}

/// `HbarSeries` with a single real entry at ħ⁰, for comparisons in tests
/// and callers that build expected operators by hand.
pub fn real_series<C: Coeff>(c: C) -> HbarSeries<C> {
    HbarSeries::term(0, Complex::new(c, C::zero()))
}
