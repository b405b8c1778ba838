//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Build with `cargo test -p gselab --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use gselab::models::*;
use gselab::operator::Letter::{P, Q};
use gselab::phase_geometry::record_increment_over_loop;
use gselab::quantize::real_series;
use gselab::*;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = std::result::Result<(bool, String), Error>;
type Criterion = (u32, &'static str, fn() -> Outcome);
type Flow = dyn Fn(f64, &[f64], &mut [f64]);

/// Period of `p²/2 + q⁴/4` started from (1, 0).
const QUARTIC_PERIOD: f64 = 7.416298709205487;

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "Weyl ordering of the generalized oscillator", weyl_example),
        (2, "fast Weyl ordering equals interleaving average", ordering_oracle),
        (3, "λ = 1 coherent state after one period", coherent_state),
        (4, "λ = 0 grid propagation equals closed form", double_solution),
        (5, "closed-form residual scales as dt²", pde_residual),
        (6, "loop phase identities", phase_identities),
        (7, "zero-point energy interpolation", zero_point),
        (8, "superposition holds only at λ = 1", superposition),
        (9, "chaos diagnostics", chaos),
        (10, "split-step convergence order", convergence_order),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, f) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {n}: {} — {name}: {detail} [{secs:.1} s]", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ratio(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn weyl_example() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1991);
    let q = Poly::<Rational64>::variable(1, Coordinate::Q(0));
    let p = Poly::<Rational64>::variable(1, Coordinate::P(0));
    let mut shown = String::new();
    for _ in 0..3 {
        let mut draw = || ratio(rng.random_range(-20..=20), rng.random_range(1..=9));
        let (a, b, c) = (draw(), draw(), draw());
        let half = ratio(1, 2);
        let f = (&(&p.pow(2).scale(&a) + &(&p * &q).scale(&b)) + &q.pow(2).scale(&c)).scale(&half);
        let words = vec![
            Word::new(real_series(half * a), vec![P(0), P(0)]),
            Word::new(real_series(half * b * half), vec![P(0), Q(0)]),
            Word::new(real_series(half * b * half), vec![Q(0), P(0)]),
            Word::new(real_series(half * c), vec![Q(0), Q(0)]),
        ];
        let expected = normal_order_reduce(1, &words)?;
        let got = weyl_quantize(&f);
        if got != expected {
            return Ok((false, format!("(a, b, c) = ({a}, {b}, {c}): got {got}, expected {expected}")));
        }
        shown = format!("(a, b, c) = ({a}, {b}, {c}) → {got}");
    }
    Ok((true, format!("3 rational triples exact; last {shown}")))
}

fn ordering_oracle() -> Outcome {
    let mut checked = 0;
    for total in 0..=6u32 {
        for m in 0..=total {
            let n = total - m;
            let arrangements = interleavings(m, n);
            let weight = ratio(1, arrangements.len() as i64);
            let words: Vec<Word<Rational64>> = arrangements
                .into_iter()
                .map(|w| Word::new(real_series(weight), w))
                .collect();
            let brute = normal_order_reduce(1, &words)?;
            let fast = weyl_quantize(&Poly::monomial(Monomial::qp(m, n), ratio(1, 1)));
            if brute != fast {
                return Ok((false, format!("q^{m} p^{n}: fast {fast} vs brute {brute}")));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} monomials identical")))
}

/// Every distinct arrangement of `m` q̂ and `n` p̂ letters.
fn interleavings(m: u32, n: u32) -> Vec<Vec<gselab::Letter>> {
    if m == 0 && n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    if m > 0 {
        for mut w in interleavings(m - 1, n) {
            w.insert(0, Q(0));
            out.push(w);
        }
    }
    if n > 0 {
        for mut w in interleavings(m, n - 1) {
            w.insert(0, P(0));
            out.push(w);
        }
    }
    out
}

fn coherent_state() -> Outcome {
    let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
    let spec = GridSpec::centered(1024, 10.0)?;
    let env = make_envelope(EnvelopeKind::Gaussian { sigma: 0.5f64.sqrt() }, &spec)?;
    let psi0 = closed_form_state(&env, &PhasePoint::single(2.0, 1.0), 0.0, 1.0)?;
    let period = 2.0 * PI;
    let config = PropagationConfig {
        splitting: SplitOrder::Fourth,
        ..PropagationConfig::new(1.0, period / 2000.0)
    };
    let psi_t = evolve(&h, &psi0, 0.0, period, &config, 1.0)?;
    // One full period multiplies a coherent state by exp(−iωT/2) = −1.
    let exact = psi0.scaled(Complex64::new(-1.0, 0.0));
    let err = psi_t.l2_distance(&exact)?;
    Ok((err < 1e-6, format!("L² error {err:.2e} (< 1e-6)")))
}

fn quartic() -> DrivenHamiltonian {
    DrivenHamiltonian::time_independent(quartic_oscillator(1.0))
}

fn double_solution() -> Outcome {
    let h = quartic();
    let spec = GridSpec::centered(256, 16.0)?;
    let z0 = PhasePoint::single(1.0, 0.0);
    let t_final = 10.0 * QUARTIC_PERIOD;
    let steps_per_period = 2_000;
    let record_stride = 10;
    let config = PropagationConfig {
        splitting: SplitOrder::Fourth,
        record_stride,
        snapshot_stride: steps_per_period,
        ..PropagationConfig::new(0.0, QUARTIC_PERIOD / steps_per_period as f64)
    };
    let kinds = [
        EnvelopeKind::Gaussian { sigma: 1.0 },
        EnvelopeKind::Hermite { order: 2, sigma: 1.0 },
        EnvelopeKind::SymmetricDoubleGaussian { sigma: 1.0, separation: 6.0 },
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for kind in kinds {
        let env = make_envelope(kind, &spec)?;
        let psi0 = closed_form_state(&env, &z0, 0.0, 1.0)?;
        let rec = propagate(&h, &psi0, t_final, &config, 1.0)?;
        let snap_times: Vec<f64> = rec.snapshots.iter().map(|(t, _)| *t).collect();
        let oracle = propagate_closed_form(&h, Some(&env), &z0, &snap_times, 2 * steps_per_period, 1.0)?;
        let l2 = rec
            .snapshots
            .iter()
            .zip(&oracle.states)
            .map(|((_, s), o)| s.l2_distance(o))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let classical = integrate_classical(&h, &z0, &rec.times, Integrator::Rk45 { tol: 1e-12 })?;
        let ehrenfest = rec
            .exp_q
            .iter()
            .zip(&rec.exp_p)
            .zip(&classical.points)
            .map(|((q, p), z)| (q - z.q[0]).abs().max((p - z.p[0]).abs()))
            .fold(0.0, f64::max);
        let energy = TrajectoryRecord::drift(&rec.energy_classical);
        let widths = TrajectoryRecord::drift(&rec.sigma_q).max(TrajectoryRecord::drift(&rec.sigma_p));
        let norm = TrajectoryRecord::drift(&rec.norm);
        let pass = l2 < 1e-6 && ehrenfest < 1e-6 && energy < 1e-7 && widths < 1e-8 && norm < 1e-9;
        ok &= pass;
        lines.push(format!(
            "{}: L² {l2:.1e}, Ehrenfest {ehrenfest:.1e}, energy {energy:.1e}, σ {widths:.1e}, norm {norm:.1e}",
            envelope_name(kind)
        ));
    }
    Ok((ok, lines.join("; ")))
}

fn envelope_name(kind: EnvelopeKind) -> &'static str {
    match kind {
        EnvelopeKind::Gaussian { .. } => "gaussian",
        EnvelopeKind::Hermite { .. } => "hermite",
        EnvelopeKind::SymmetricDoubleGaussian { .. } => "double-gaussian",
    }
}

fn pde_residual() -> Outcome {
    let h = quartic();
    let spec = GridSpec::centered(256, 16.0)?;
    let env = make_envelope(EnvelopeKind::Gaussian { sigma: 1.0 }, &spec)?;
    let z0 = PhasePoint::single(1.0, 0.0);
    let max_residual = |n: usize, drift: f64| -> Result<f64> {
        let t = uniform_grid(0.0, QUARTIC_PERIOD, n);
        let run = propagate_closed_form(&h, Some(&env), &z0, &t, 8, 1.0)?;
        let states: Vec<GridState> = run.states.iter().zip(&t).map(|(s, &ti)| s.with_phase(drift * ti)).collect();
        Ok(verify_pde_residual(&states, &h, &t, 1.0)?.into_iter().fold(0.0, f64::max))
    };
    let coarse = max_residual(200, 0.0)?;
    let fine = max_residual(400, 0.0)?;
    let r = coarse / fine;
    let dt = QUARTIC_PERIOD / 200.0;
    let corrupted = max_residual(400, 0.1)?;
    let ok = (3.5..=4.5).contains(&r) && corrupted > 1e-2;
    Ok((
        ok,
        format!(
            "max residual {coarse:.2e} → {fine:.2e}, ratio {r:.3}; residual/dt² {:.3}; corrupted phase {corrupted:.2e}",
            coarse / (dt * dt)
        ),
    ))
}

fn phase_identities() -> Outcome {
    let hbar = 1.0;
    // Oscillator at E = ħω (n = 1).
    let ho = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
    let e: f64 = 1.0;
    let z0 = PhasePoint::single((2.0 * e).sqrt(), 0.0);
    let grid = uniform_grid(0.0, 1.3 * 2.0 * PI, 1300);
    let traj = integrate_classical(&ho, &z0, &grid, Integrator::Rk45 { tol: 1e-13 })?;
    let lp = detect_closure(&traj, 1e-6)?.ok_or_else(|| Error::InvalidLoop("oscillator orbit did not close".into()))?;
    let rec = phase_integral(&traj, &ho, hbar)?;
    let (total, _, _) = record_increment_over_loop(&rec, &lp)?;
    let gamma = geometric_phase_on_loop(&traj, &lp, hbar)?;
    let gamma_rel = (gamma - 2.0 * PI * e / hbar).abs() / (2.0 * PI * e);
    let (n, bs) = bohr_sommerfeld_residual(gamma);
    let ho_ok = total.abs() < 1e-8 && gamma_rel < 1e-6 && n == 1 && bs.abs() < 1e-6;

    // Quartic orbit: refinement stability and record-vs-loop agreement.
    let h = quartic();
    let z0 = PhasePoint::single(1.0, 0.0);
    let action_at = |samples: usize| -> Result<(f64, LoopPhaseCheck)> {
        let grid = uniform_grid(0.0, 1.3 * QUARTIC_PERIOD, samples);
        let traj = integrate_classical(&h, &z0, &grid, Integrator::Rk45 { tol: 1e-13 })?;
        let lp = detect_closure(&traj, 1e-6)?.ok_or_else(|| Error::InvalidLoop("quartic orbit did not close".into()))?;
        let rec = phase_integral(&traj, &h, hbar)?;
        Ok((loop_action(&traj, &lp)?, check_loop_phases(&traj, &lp, &rec, hbar)?))
    };
    let (a1, _) = action_at(1000)?;
    let (a2, chk) = action_at(2000)?;
    let refine = (a1 - a2).abs() / a2.abs();
    let geo = chk.geometric_discrepancy();
    let quartic_ok = refine < 1e-6 && geo < 1e-8;
    Ok((
        ho_ok && quartic_ok,
        format!(
            "oscillator: total {total:.1e}, γ rel {gamma_rel:.1e}, n {n}, BS residual {bs:.1e}; quartic: refinement {refine:.1e}, geometric vs loop {geo:.1e}"
        ),
    ))
}

fn zero_point() -> Outcome {
    let h = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
    let spec = GridSpec::centered(256, 10.0)?;
    let psi = make_envelope(EnvelopeKind::Gaussian { sigma: 0.5f64.sqrt() }, &spec)?;
    let (q, p) = psi.expectation_point(1.0);
    let z = PhasePoint::single(q, p);
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let g = deformed_generator(&h, &z, 0.0, lambda, GeneratorMode::Interpolating)?;
        let e = psi.expectation_operator(&g, 1.0)?.re;
        worst = worst.max((e - 0.5 * lambda).abs());
        values.push(format!("{e:.10}"));
    }
    let raw = deformed_generator(&h, &z, 0.0, 0.0, GeneratorMode::Raw)?;
    let e_raw = psi.expectation_operator(&raw, 1.0)?.re;
    Ok((
        worst < 1e-9 && e_raw.abs() < 1e-9,
        format!("E(λ) = [{}], max deviation {worst:.1e}; raw λ = 0 gives {e_raw:.1e}", values.join(", ")),
    ))
}

fn superposition() -> Outcome {
    let h = quartic();
    let spec = GridSpec::centered(256, 16.0)?;
    let env = make_envelope(EnvelopeKind::Gaussian { sigma: 1.0 }, &spec)?;
    let s1 = closed_form_state(&env, &PhasePoint::single(-1.0, 0.0), 0.0, 1.0)?;
    let s2 = closed_form_state(&env, &PhasePoint::single(1.5, 0.5), 0.0, 1.0)?;
    let w = Complex64::new(0.5f64.sqrt(), 0.0);
    let dt = QUARTIC_PERIOD / 2000.0;
    let linear = superposition_probe(&h, &s1, &s2, w, w, QUARTIC_PERIOD, &PropagationConfig::new(1.0, dt), 1.0)?;
    let classical = superposition_probe(&h, &s1, &s2, w, w, QUARTIC_PERIOD, &PropagationConfig::new(0.0, dt), 1.0)?;
    Ok((
        linear < 1e-8 && classical > 1e-2,
        format!("λ = 1: {linear:.1e} (< 1e-8); λ = 0: {classical:.3} (> 1e-2)"),
    ))
}

/// Tangent-space Lyapunov estimate from the variational equations, with
/// fixed RK4 steps and renormalization every `every` steps.
fn tangent_ftle(flow: &Flow, z0: &[f64], t_total: f64, dt: f64, every: usize) -> f64 {
    let dim = z0.len();
    let mut y: Vec<f64> = z0.to_vec();
    y.extend(std::iter::repeat_n(1.0 / (dim as f64).sqrt(), dim));
    let n = (t_total / dt).round() as usize;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; 2 * dim], vec![0.0; 2 * dim], vec![0.0; 2 * dim], vec![0.0; 2 * dim]);
    let mut tmp = vec![0.0; 2 * dim];
    let mut log_sum = 0.0;
    for i in 0..n {
        let t = i as f64 * dt;
        flow(t, &y, &mut k1);
        for j in 0..2 * dim {
            tmp[j] = y[j] + 0.5 * dt * k1[j];
        }
        flow(t + 0.5 * dt, &tmp, &mut k2);
        for j in 0..2 * dim {
            tmp[j] = y[j] + 0.5 * dt * k2[j];
        }
        flow(t + 0.5 * dt, &tmp, &mut k3);
        for j in 0..2 * dim {
            tmp[j] = y[j] + dt * k3[j];
        }
        flow(t + dt, &tmp, &mut k4);
        for j in 0..2 * dim {
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if (i + 1) % every == 0 {
            let norm = y[dim..].iter().map(|x| x * x).sum::<f64>().sqrt();
            log_sum += norm.ln();
            y[dim..].iter_mut().for_each(|x| *x /= norm);
        }
    }
    log_sum / (n as f64 * dt)
}

/// Hénon–Heiles flow plus its linearization; state (q1, q2, p1, p2, δ…).
fn henon_heiles_tangent(_: f64, y: &[f64], dy: &mut [f64]) {
    let (q1, q2, p1, p2) = (y[0], y[1], y[2], y[3]);
    dy[0] = p1;
    dy[1] = p2;
    dy[2] = -(q1 + 2.0 * q1 * q2);
    dy[3] = -(q2 + q1 * q1 - q2 * q2);
    let (a, b, c, d) = (y[4], y[5], y[6], y[7]);
    dy[4] = c;
    dy[5] = d;
    dy[6] = -((1.0 + 2.0 * q2) * a + 2.0 * q1 * b);
    dy[7] = -(2.0 * q1 * a + (1.0 - 2.0 * q2) * b);
}

/// Driven Duffing flow (ε = 0.3, Ω = 1) plus its linearization.
fn duffing_tangent(t: f64, y: &[f64], dy: &mut [f64]) {
    let (q, p) = (y[0], y[1]);
    dy[0] = p;
    dy[1] = -(q * q * q - q + 0.3 * t.cos());
    dy[2] = y[3];
    dy[3] = -(3.0 * q * q - 1.0) * y[2];
}

/// Artifact FTLE against the two-step-size tangent oracle.
fn ftle_against_oracle(
    name: &str,
    h: &DrivenHamiltonian,
    z0: &PhasePoint,
    tangent: fn(f64, &[f64], &mut [f64]),
    t_total: f64,
    floor: f64,
) -> Result<(bool, f64, String)> {
    let artifact = ftle_benettin(h, z0, t_total, 0.01, 10, 1e-8)?;
    let mut y0 = z0.q.clone();
    y0.extend_from_slice(&z0.p);
    let coarse = tangent_ftle(&tangent, &y0, t_total, 0.01, 10);
    let fine = tangent_ftle(&tangent, &y0, t_total, 0.005, 20);
    let oracle = 0.5 * (coarse + fine);
    let spread = (coarse - fine).abs() / oracle;
    let dev = (artifact - oracle).abs() / oracle;
    let ok = artifact > floor && dev < 0.2 && spread < 0.2;
    Ok((
        ok,
        artifact,
        format!("{name} FTLE {artifact:.4} (oracle {coarse:.4}/{fine:.4}, deviation {:.0}%)", 100.0 * dev),
    ))
}

fn chaos() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();

    let ho = DrivenHamiltonian::time_independent(harmonic_oscillator(1.0, 1.0));
    let ho_ftle = ftle_benettin(&ho, &PhasePoint::single(1.0, 0.0), 200.0, 0.01, 10, 1e-8)?;
    ok &= ho_ftle.abs() < 0.01;
    lines.push(format!("oscillator FTLE {ho_ftle:.1e}"));

    let hh = DrivenHamiltonian::time_independent(henon_heiles());
    let (q1, q2) = (0.0, -0.1);
    let v = 0.5 * (q1 * q1 + q2 * q2) + q1 * q1 * q2 - q2 * q2 * q2 / 3.0;
    let hh_z0 = PhasePoint::new(vec![q1, q2], vec![(2.0 * (1.0 / 6.0 - v)).sqrt(), 0.0])?;
    let (hh_ok, _, line) = ftle_against_oracle("Hénon–Heiles", &hh, &hh_z0, henon_heiles_tangent, 5000.0, 0.02)?;
    ok &= hh_ok;
    lines.push(line);

    let duffing = driven_duffing(1.0, 0.3, 1.0);
    let duff_z0 = PhasePoint::single(0.0, 0.0);
    let (duff_ok, duff_ftle, line) = ftle_against_oracle("Duffing", &duffing, &duff_z0, duffing_tangent, 5000.0, 0.05)?;
    ok &= duff_ok;
    lines.push(line);

    // Wavefunction divergence in the Duffing chaotic window.
    let sigma = 1.0;
    let dz = PhasePoint::single(1e-5, 0.0);
    let t = uniform_grid(0.0, 300.0, 3000);
    let engine = DivergenceEngine::ClosedForm { substeps: 10 };
    let d = wavefunction_divergence(&duffing, Envelope::Gaussian { sigma }, &duff_z0, &dz, &t, 1.0, engine)?;
    let saturation = first_crossing(&d, &t, 0.9).unwrap_or(t[t.len() - 1]);
    let rate = divergence_rate_fit(&d, &t, (0.0, saturation))?;
    let rate_ratio = rate / (2.0 * duff_ftle);
    let crossing = first_crossing(&d, &t, 0.5);
    let predicted = (sigma / dz.norm()).ln() / duff_ftle;
    let crossing_ratio = crossing.map_or(f64::INFINITY, |c| c / predicted);
    ok &= (1.0 / 3.0..=3.0).contains(&rate_ratio) && (1.0 / 3.0..=3.0).contains(&crossing_ratio);
    lines.push(format!(
        "Duffing divergence rate {rate:.4} = {rate_ratio:.2}×2·FTLE, d = 0.5 at t = {:.1} ({crossing_ratio:.2}× prediction)",
        crossing.unwrap_or(f64::NAN)
    ));

    // One grid cross-check of the λ = 0 distance series.
    let spec = GridSpec::centered(256, 16.0)?;
    let env = make_envelope(EnvelopeKind::Gaussian { sigma }, &spec)?;
    let short = uniform_grid(0.0, 20.0, 100);
    let dz_big = PhasePoint::single(1e-2, 0.0);
    let d_cf = wavefunction_divergence(&duffing, Envelope::Gaussian { sigma }, &duff_z0, &dz_big, &short, 1.0, DivergenceEngine::ClosedForm { substeps: 20 })?;
    let d_pde = wavefunction_divergence(&duffing, Envelope::Grid(&env), &duff_z0, &dz_big, &short, 1.0, DivergenceEngine::PdeLambda0 { steps_per_sample: 20 })?;
    let cross = d_cf.iter().zip(&d_pde).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let d_max = d_cf.iter().cloned().fold(0.0, f64::max);
    ok &= cross < 1e-3 * d_max;
    lines.push(format!("grid cross-check {cross:.1e} (max d {d_max:.1e})"));

    // Oscillator divergence stays bounded.
    let t_ho = uniform_grid(0.0, 200.0, 2000);
    let d_ho = wavefunction_divergence(&ho, Envelope::Gaussian { sigma }, &PhasePoint::single(1.0, 0.0), &PhasePoint::single(1e-3, 0.0), &t_ho, 1.0, engine)?;
    let early = d_ho[..=63].iter().cloned().fold(0.0, f64::max);
    let late = d_ho.iter().cloned().fold(0.0, f64::max);
    let ho_slope = divergence_rate_fit(&d_ho, &t_ho, (0.0, 200.0))?;
    ok &= late <= 1.01 * early && ho_slope.abs() < 0.005;
    lines.push(format!("oscillator divergence max {late:.2e} vs first period {early:.2e}, slope {ho_slope:.1e}"));

    Ok((ok, lines.join("; ")))
}

fn convergence_order() -> Outcome {
    let h = quartic();
    let spec = GridSpec::centered(256, 16.0)?;
    let env = make_envelope(EnvelopeKind::Gaussian { sigma: 1.0 }, &spec)?;
    let z0 = PhasePoint::single(1.0, 0.0);
    let psi0 = closed_form_state(&env, &z0, 0.0, 1.0)?;
    let oracle = propagate_closed_form(&h, Some(&env), &z0, &[0.0, QUARTIC_PERIOD], 20_000, 1.0)?;
    let exact = &oracle.states[1];
    let mut errors = Vec::new();
    for n in [200usize, 400, 800, 1600] {
        let config = PropagationConfig::new(0.0, QUARTIC_PERIOD / n as f64);
        errors.push(evolve(&h, &psi0, 0.0, QUARTIC_PERIOD, &config, 1.0)?.l2_distance(exact)?);
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let ok = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    Ok((
        ok,
        format!(
            "errors [{}], ratios [{}]",
            errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", "),
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}
