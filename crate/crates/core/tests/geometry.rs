use std::f64::consts::PI;

use gselab::models::*;
use gselab::phase_geometry::{loop_energy_integral, record_increment_over_loop, symmetric_loop_action};
use gselab::*;

/// Period of `p²/2 + q⁴/4` at amplitude 1: with q = sin θ,
/// `T = 4√2 ∫₀^{π/2} dθ / √(1 + sin²θ)`, whose periodic integrand makes the
/// trapezoid rule spectrally accurate.
fn quartic_period_by_quadrature() -> f64 {
    let n = 200;
    let h = 0.5 * PI / n as f64;
    let f = |t: f64| 1.0 / (1.0 + t.sin().powi(2)).sqrt();
    let sum: f64 = (1..n).map(|i| f(i as f64 * h)).sum::<f64>() + 0.5 * (f(0.0) + f(0.5 * PI));
    4.0 * 2f64.sqrt() * h * sum
}

fn trajectory(h: &DrivenHamiltonian, z0: PhasePoint, t_end: f64, n: usize) -> ClassicalTrajectory {
    integrate_classical(h, &z0, &uniform_grid(0.0, t_end, n), Integrator::Rk45 { tol: 1e-13 }).unwrap()
}

#[test]
fn quartic_period_matches_quadrature() {
    let period = quartic_period_by_quadrature();
    let h = DrivenHamiltonian::time_independent(quartic_oscillator(1.0));
    let traj = trajectory(&h, PhasePoint::single(1.0, 0.0), 1.4 * period, 1400);
    let lp = detect_closure(&traj, 1e-6).unwrap().unwrap();
    assert!((lp.period - period).abs() < 1e-8, "{} vs {period}", lp.period);
}

#[test]
fn quartic_action_is_refinement_stable_and_consistent() {
    let h = DrivenHamiltonian::time_independent(quartic_oscillator(1.0));
    let period = quartic_period_by_quadrature();
    let mut actions = Vec::new();
    for n in [700, 1400, 2800] {
        let traj = trajectory(&h, PhasePoint::single(1.0, 0.0), 1.4 * period, n);
        let lp = detect_closure(&traj, 1e-6).unwrap().unwrap();
        let rec = phase_integral(&traj, &h, 1.0).unwrap();
        let chk = check_loop_phases(&traj, &lp, &rec, 1.0).unwrap();
        assert!(chk.geometric_discrepancy() < 1e-8, "{chk:?}");
        assert!(chk.total_discrepancy() < 1e-8, "{chk:?}");
        let sym = symmetric_loop_action(&traj, &lp, 1.0).unwrap();
        assert!((sym - chk.gamma).abs() < 1e-8);
        // Energy is conserved, so ∮H dt = E·T.
        let e_int = loop_energy_integral(&traj, &lp).unwrap();
        assert!((e_int - 0.25 * lp.period).abs() < 1e-9);
        actions.push(loop_action(&traj, &lp).unwrap());
    }
    for w in actions.windows(2) {
        assert!((w[0] - w[1]).abs() < 1e-6 * w[1].abs());
    }
}

#[test]
fn mixed_oscillator_action_is_two_pi_e_over_omega() {
    // ½(a p² + b pq + c q²) has ω = √(ac − b²/4).
    let (a, b, c): (f64, f64, f64) = (1.5, 0.8, 2.0);
    let omega = (a * c - 0.25 * b * b).sqrt();
    let h = DrivenHamiltonian::time_independent(generalized_oscillator(a, b, c));
    let z0 = PhasePoint::single(1.0, -0.3);
    let e = h.evaluate(&z0, 0.0).unwrap();
    let period = 2.0 * PI / omega;
    let traj = trajectory(&h, z0, 1.3 * period, 1300);
    let lp = detect_closure(&traj, 1e-6).unwrap().unwrap();
    assert!((lp.period - period).abs() < 1e-8);
    let gamma = geometric_phase_on_loop(&traj, &lp, 1.0).unwrap();
    assert!((gamma - 2.0 * PI * e / omega).abs() < 1e-6 * gamma);
}

#[test]
fn oscillator_phases_over_a_period() {
    let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 2.0));
    let hbar = 0.5;
    // E = 3ħω: the loop action is 2π·3.
    let e: f64 = 3.0 * hbar * 2.0;
    let z0 = PhasePoint::single((2.0 * e).sqrt() / 2.0, 0.0);
    let traj = trajectory(&h, z0, 1.3 * PI, 1300);
    let lp = detect_closure(&traj, 1e-6).unwrap().unwrap();
    let rec = phase_integral(&traj, &h, hbar).unwrap();
    let (total, dynamical, geometric) = record_increment_over_loop(&rec, &lp).unwrap();
    assert!(total.abs() < 1e-8);
    assert!((geometric + dynamical - total).abs() < 1e-10);
    let gamma = geometric_phase_on_loop(&traj, &lp, hbar).unwrap();
    let (n, residual) = bohr_sommerfeld_residual(gamma);
    assert_eq!(n, 3);
    assert!(residual.abs() < 1e-6);
}

#[test]
fn phase_record_csv_layout() {
    let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
    let traj = trajectory(&h, PhasePoint::single(1.0, 0.0), 1.0, 4);
    let rec = phase_integral(&traj, &h, 1.0).unwrap();
    let mut out = Vec::new();
    rec.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,total,dynamical,geometric");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1].split(',').count(), 4);
}
