//! Thin wrapper around a cached per-thread FFT planner.
//!
//! Forward transforms are unnormalized (`F_j = Σ ψ_i e^{−2πi ij/N}`);
//! inverse transforms divide by N so that `inverse(forward(x)) == x`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

pub(crate) fn inverse(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
    let scale = 1.0 / buf.len() as f64;
    for x in buf.iter_mut() {
        *x *= scale;
    }
}

/// Multiplies the transform of `buf` by `multiplier` (in FFT layout) and
/// transforms back.
pub(crate) fn apply_multiplier(buf: &mut [Complex64], multiplier: &[Complex64]) {
    forward(buf);
    for (x, m) in buf.iter_mut().zip(multiplier) {
        *x *= m;
    }
    inverse(buf);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let orig: Vec<Complex64> = (0..16).map(|i| Complex64::new(i as f64, -(i as f64).sin())).collect();
        let mut buf = orig.clone();
        forward(&mut buf);
        inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
