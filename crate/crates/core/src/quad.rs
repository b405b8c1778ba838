//! Quadrature on uniformly sampled data.

use crate::error::{Error, Result};

/// Checks that `t` is uniformly spaced (relative tolerance 1e-9) and
/// returns the spacing.
pub(crate) fn uniform_spacing(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Ok(0.0);
    }
    let n = t.len() - 1;
    let span = t[n] - t[0];
    let h = span / n as f64;
    let tol = 1e-9 * span.abs();
    if h == 0.0 || t.iter().enumerate().any(|(i, &ti)| (ti - (t[0] + i as f64 * h)).abs() > tol) {
        return Err(Error::NonUniformSampling);
    }
    Ok(h)
}

/// Running integral `F_i = ∫_{t_0}^{t_i} f`: composite Simpson on even
/// indices, plus a four-point rule for the last interval on odd ones.
/// Exact for cubics when at least four samples are given; with three the
/// odd sample uses a three-point rule, with two the trapezoid.
pub(crate) fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    match n {
        0 | 1 => return out,
        2 => {
            out[1] = 0.5 * h * (f[0] + f[1]);
            return out;
        }
        3 => out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]),
        _ => out[1] = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]),
    }
    for i in 2..n {
        out[i] = if i % 2 == 0 {
            out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i])
        } else {
            out[i - 1] + h / 24.0 * (f[i - 3] - 5.0 * f[i - 2] + 19.0 * f[i - 1] + 9.0 * f[i])
        };
    }
    out
}

/// `∫_{0}^{s·h} p(x) dx` for the cubic through four equally spaced values
/// at x = 0, h, 2h, 3h.
pub(crate) fn lagrange4_partial(f: [f64; 4], h: f64, s: f64) -> f64 {
    // Antiderivatives of the Lagrange basis in units of h.
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let l0 = -(s4 / 4.0 - 2.0 * s3 + 11.0 * s2 / 2.0 - 6.0 * s) / 6.0;
    let l1 = (s4 / 4.0 - 5.0 * s3 / 3.0 + 3.0 * s2) / 2.0;
    let l2 = -(s4 / 4.0 - 4.0 * s3 / 3.0 + 3.0 * s2 / 2.0) / 2.0;
    let l3 = (s4 / 4.0 - s3 + s2) / 6.0;
    h * (l0 * f[0] + l1 * f[1] + l2 * f[2] + l3 * f[3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_cubics() {
        let h = 0.1;
        let f: Vec<f64> = (0..11).map(|i| (i as f64 * h).powi(3) - 2.0 * (i as f64 * h)).collect();
        let cum = cumulative_simpson(&f, h);
        for (i, c) in cum.iter().enumerate() {
            let t = i as f64 * h;
            assert!((c - (t.powi(4) / 4.0 - t * t)).abs() < 1e-14, "{i}");
        }
    }

    #[test]
    fn lagrange_partial_exact_for_cubics() {
        let h = 0.3;
        let p = |x: f64| 1.0 + x - 2.0 * x * x + 0.5 * x * x * x;
        let int = |x: f64| x + x * x / 2.0 - 2.0 * x * x * x / 3.0 + x.powi(4) / 8.0;
        let f = [p(0.0), p(h), p(2.0 * h), p(3.0 * h)];
        for s in [0.0, 0.4, 1.0, 2.7, 3.0] {
            assert!((lagrange4_partial(f, h, s) - int(s * h)).abs() < 1e-14);
        }
    }

    #[test]
    fn spacing_checks() {
        assert_eq!(uniform_spacing(&[0.0, 0.5, 1.0]).unwrap(), 0.5);
        assert!(uniform_spacing(&[0.0, 0.5, 1.5]).is_err());
        assert!(uniform_spacing(&[1.0, 1.0]).is_err());
    }
}
