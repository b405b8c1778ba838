//! Subcommand bodies. Each writes into its scenario's output directory and
//! returns a one-line summary.
//!
//! Frozen CSV layouts (after the `#` header):
//! - `trajectory.csv`: `t,exp_q,exp_p,norm,E_classical,E_quantal,sigma_q,sigma_p`
//! - `closed_form.csv`: `t,q…,p…,E_classical,phase_total,phase_dynamical,phase_geometric`
//!   (`q,p` for one degree of freedom, `q1…qn,p1…pn` otherwise)
//! - `phases.csv`: `t,total,dynamical,geometric`
//! - `compare.csv`: `t,l2_error,metric_distance,exp_q_error,exp_p_error`
//! - `phase.csv`: `orbit,E,period,gamma,n,residual,total_phase,geometric_discrepancy`
//! - `divergence.csv`: `t,d`
//! - `chaos_summary.csv`: `scenario,ftle,divergence_rate,saturation_time` (first time d ≥ 1/2)
//! - `sweep.csv`: `lambda,energy` plus, with `sweep.evolve`,
//!   `final_exp_q,final_exp_p,final_sigma_q,final_sigma_p,energy_quantal_drift,norm_drift`
//! - `density.csv` (`--emit-plot-data`): `t,q,density`
//! - `centroids.csv` (`--emit-plot-data`): `t,q…,p…,q…',p…'` for the two
//!   divergence trajectories
//! - `orbits.csv` (`--emit-plot-data`): `orbit,t,q…,p…`

use rayon::prelude::*;
use serde_json::{json, Value};

use gselab::{
    bohr_sommerfeld_residual, check_loop_phases, closed_form_state, deformed_generator, detect_closure,
    divergence_rate_fit, first_crossing, ftle_benettin, geometric_phase_on_loop, integrate_classical, loop_action,
    make_envelope, phase_integral, propagate, propagate_closed_form, uniform_grid, wavefunction_divergence,
    DivergenceEngine, Envelope, EnvelopeKind, GridState, Integrator, PhasePoint, PropagationConfig, TrajectoryRecord,
};

use crate::error::CliError;
use crate::output::{row, Sink};
use crate::scenario::{Artifact, EngineName, Scenario};

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub emit_plot_data: bool,
}

fn one_dof(s: &Scenario, what: &str) -> Result<(), CliError> {
    if s.n_dof() == 1 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "hamiltonian.n_dof: {what} needs one degree of freedom, got {}",
            s.n_dof()
        )))
    }
}

/// Checks that the classical sweep over `[0, t_final]`, widened by the
/// envelope's half-width, fits inside the grid box.
fn check_box(s: &Scenario, t_final: f64) -> Result<(), CliError> {
    let h = s.hamiltonian()?;
    let z0 = s.initial_point()?;
    let traj = integrate_classical(&h, &z0, &uniform_grid(0.0, t_final, 1000), Integrator::Rk45 { tol: 1e-10 })?;
    let (lo, hi) = traj
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.q[0]), hi.max(z.q[0])));
    let hw = s.envelope_kind()?.half_width();
    let g = &s.grid;
    if lo - hw < g.q_min || hi + hw > g.q_max {
        return Err(CliError::Config(format!(
            "grid: box [{}, {}) does not contain the classical sweep [{lo:.4}, {hi:.4}] plus envelope half-width {hw:.4}",
            g.q_min, g.q_max
        )));
    }
    Ok(())
}

fn initial_state(s: &Scenario) -> Result<(GridState, GridState), CliError> {
    let env = make_envelope(s.envelope_kind()?, &s.grid_spec())?;
    let psi0 = closed_form_state(&env, &s.initial_point()?, 0.0, s.hbar())?;
    Ok((env, psi0))
}

fn record_csv(rec: &TrajectoryRecord) -> Vec<u8> {
    let mut out = Vec::new();
    rec.write_csv(&mut out).expect("writing to a Vec cannot fail");
    out
}

fn write_snapshots(sink: &mut Sink, snapshots: &[(f64, GridState)]) -> Result<(), CliError> {
    for (i, (t, state)) in snapshots.iter().enumerate() {
        let body = format!("# t = {t:e}\n{}", state.to_text());
        sink.text(&format!("snapshots/state_{i:05}.txt"), body.as_bytes())?;
    }
    Ok(())
}

fn density_csv(states: &[(f64, &GridState)]) -> Vec<u8> {
    let mut out = String::from("t,q,density\n");
    for (t, s) in states {
        let spec = s.spec();
        for (i, a) in s.amplitudes().iter().enumerate() {
            out.push_str(&row(&[*t, spec.q(i), a.norm_sqr()]));
        }
    }
    out.into_bytes()
}

fn coordinate_names(n: usize) -> (Vec<String>, Vec<String>) {
    if n == 1 {
        (vec!["q".into()], vec!["p".into()])
    } else {
        ((1..=n).map(|k| format!("q{k}")).collect(), (1..=n).map(|k| format!("p{k}")).collect())
    }
}

fn point_values(z: &PhasePoint) -> Vec<f64> {
    z.q.iter().chain(&z.p).copied().collect()
}

pub fn quantize(s: &Scenario, sink: &mut Sink, _: Options) -> Result<String, CliError> {
    let h = s.hamiltonian()?;
    let z = s.quantize_point()?;
    let qz = &s.quantize;
    let g = deformed_generator(&h, &z, qz.t, qz.lambda, qz.mode.into())?;
    let printed = g.to_string();
    sink.text("operator.txt", format!("{printed}\n").as_bytes())?;
    let terms: Vec<Value> = g
        .numeric_terms(s.hbar())
        .into_iter()
        .map(|(m, c)| json!({"powers_q": m.q_powers(), "powers_p": m.p_powers(), "re": c.re, "im": c.im}))
        .collect();
    sink.json(
        "operator.json",
        json!({"operator": printed, "hermitian": g.is_hermitian(), "terms": terms}),
    )?;
    Ok(printed)
}

pub fn evolve(s: &Scenario, sink: &mut Sink, opts: Options) -> Result<String, CliError> {
    one_dof(s, "evolve")?;
    let steps = s.step_count()?;
    let t_final = s.propagation.t_final;
    check_box(s, t_final)?;
    let h = s.hamiltonian()?;
    let config = s.propagation_config()?;
    let (_, psi0) = initial_state(s)?;
    let rec = propagate(&h, &psi0, t_final, &config, s.hbar())?;
    let last = rec.final_state.clone().expect("at least one step");
    sink.text("trajectory.csv", &record_csv(&rec))?;
    sink.text("final_state.txt", last.to_text().as_bytes())?;
    if s.outputs.contains(&Artifact::Snapshots) {
        write_snapshots(sink, &rec.snapshots)?;
    }
    if opts.emit_plot_data {
        let states: Vec<(f64, &GridState)> = if rec.snapshots.is_empty() {
            vec![(0.0, &psi0), (t_final, &last)]
        } else {
            rec.snapshots.iter().map(|(t, st)| (*t, st)).collect()
        };
        sink.text("density.csv", &density_csv(&states))?;
    }
    let n = rec.len() - 1;
    sink.summary(json!({
            "steps": steps,
            "final_time": rec.times[n],
            "final_exp_q": rec.exp_q[n],
            "final_exp_p": rec.exp_p[n],
            "norm_drift": TrajectoryRecord::drift(&rec.norm),
            "energy_classical_drift": TrajectoryRecord::drift(&rec.energy_classical),
            "energy_quantal_drift": TrajectoryRecord::drift(&rec.energy_quantal),
            "sigma_q_drift": TrajectoryRecord::drift(&rec.sigma_q),
            "sigma_p_drift": TrajectoryRecord::drift(&rec.sigma_p),
        }),
    )?;
    Ok(format!(
        "{steps} steps to t = {t_final}; <q> = {:.6}, <p> = {:.6}",
        rec.exp_q[n], rec.exp_p[n]
    ))
}

fn record_grid(s: &Scenario) -> Result<Vec<f64>, CliError> {
    let steps = s.step_count()?;
    let intervals = (steps / s.propagation.record_stride).max(1);
    Ok(uniform_grid(0.0, s.propagation.t_final, intervals))
}

pub fn closed_form(s: &Scenario, sink: &mut Sink, opts: Options) -> Result<String, CliError> {
    let h = s.hamiltonian()?;
    let z0 = s.initial_point()?;
    let t = record_grid(s)?;
    let with_states = s.n_dof() == 1;
    let env = if with_states {
        check_box(s, s.propagation.t_final)?;
        Some(initial_state(s)?.0)
    } else {
        None
    };
    let run = propagate_closed_form(&h, env.as_ref(), &z0, &t, s.propagation.closed_form_substeps, s.hbar())?;
    let (qn, pn) = coordinate_names(s.n_dof());
    let mut body = format!(
        "t,{},{},E_classical,phase_total,phase_dynamical,phase_geometric\n",
        qn.join(","),
        pn.join(",")
    );
    let tr = &run.trajectory;
    let ph = &run.phases;
    for (i, &ti) in t.iter().enumerate() {
        let mut v = vec![ti];
        v.extend(point_values(&tr.points[i]));
        v.extend([tr.energies[i], ph.total[i], ph.dynamical[i], ph.geometric[i]]);
        body.push_str(&row(&v));
    }
    sink.text("closed_form.csv", body.as_bytes())?;
    if s.outputs.contains(&Artifact::Phases) {
        let mut out = Vec::new();
        ph.write_csv(&mut out)?;
        sink.text("phases.csv", &out)?;
    }
    if with_states {
        let snaps: Vec<(f64, GridState)> = t.iter().copied().zip(run.states.iter().cloned()).collect();
        if s.outputs.contains(&Artifact::Snapshots) {
            write_snapshots(sink, &snaps)?;
        }
        if opts.emit_plot_data {
            let states: Vec<(f64, &GridState)> = snaps.iter().map(|(t, st)| (*t, st)).collect();
            sink.text("density.csv", &density_csv(&states))?;
        }
    }
    let n = t.len() - 1;
    sink.summary(json!({
            "final_time": t[n],
            "final_point": point_values(&tr.points[n]),
            "final_phase_total": ph.total[n],
            "final_phase_dynamical": ph.dynamical[n],
            "final_phase_geometric": ph.geometric[n],
            "energy_drift": tr.energy_drift(),
        }),
    )?;
    Ok(format!("{} samples to t = {}; total phase {:.6}", t.len(), t[n], ph.total[n]))
}

pub fn compare(s: &Scenario, sink: &mut Sink, opts: Options) -> Result<String, CliError> {
    one_dof(s, "compare")?;
    let steps = s.step_count()?;
    let stride = s.propagation.record_stride;
    if steps % stride != 0 {
        return Err(CliError::Config(format!(
            "propagation.record_stride: must divide the {steps} steps for compare"
        )));
    }
    let t_final = s.propagation.t_final;
    check_box(s, t_final)?;
    let h = s.hamiltonian()?;
    let config = PropagationConfig {
        snapshot_stride: stride,
        ..s.propagation_config()?
    };
    let (env, psi0) = initial_state(s)?;
    let rec = propagate(&h, &psi0, t_final, &config, s.hbar())?;
    let times: Vec<f64> = rec.snapshots.iter().map(|(t, _)| *t).collect();
    let cf = propagate_closed_form(&h, Some(&env), &s.initial_point()?, &times, s.propagation.closed_form_substeps, s.hbar())?;
    let mut body = String::from("t,l2_error,metric_distance,exp_q_error,exp_p_error\n");
    let (mut max_l2, mut max_exp): (f64, f64) = (0.0, 0.0);
    for (i, (t, state)) in rec.snapshots.iter().enumerate() {
        let oracle = &cf.states[i];
        let l2 = state.l2_distance(oracle)?;
        let d = state.metric_distance(oracle)?;
        let (q, p) = state.expectation_point(s.hbar());
        let z = &cf.trajectory.points[i];
        let (eq, ep) = ((q - z.q[0]).abs(), (p - z.p[0]).abs());
        max_l2 = max_l2.max(l2);
        max_exp = max_exp.max(eq).max(ep);
        body.push_str(&row(&[*t, l2, d, eq, ep]));
    }
    sink.text("compare.csv", body.as_bytes())?;
    if s.outputs.contains(&Artifact::Trajectory) {
        sink.text("trajectory.csv", &record_csv(&rec))?;
    }
    if s.outputs.contains(&Artifact::Snapshots) {
        write_snapshots(sink, &rec.snapshots)?;
    }
    if opts.emit_plot_data {
        let states: Vec<(f64, &GridState)> = rec.snapshots.iter().map(|(t, st)| (*t, st)).collect();
        sink.text("density.csv", &density_csv(&states))?;
    }
    sink.summary(json!({
            "lambda": config.lambda,
            "max_l2_error": max_l2,
            "max_expectation_error": max_exp,
            "samples": times.len(),
        }),
    )?;
    Ok(format!("max L2 error {max_l2:.3e}, max centroid error {max_exp:.3e}"))
}

pub fn phase(s: &Scenario, sink: &mut Sink, opts: Options) -> Result<String, CliError> {
    let h = s.hamiltonian()?;
    let hbar = s.hbar();
    let ph = &s.phase;
    let grid = uniform_grid(0.0, ph.t_final, ph.samples - 1);
    let mut body = String::from("orbit,E,period,gamma,n,residual,total_phase,geometric_discrepancy\n");
    let (qn, pn) = coordinate_names(s.n_dof());
    let mut tracks = format!("orbit,t,{},{}\n", qn.join(","), pn.join(","));
    let mut results = Vec::new();
    let mut closed = 0;
    for (k, z0) in s.orbits()?.iter().enumerate() {
        let traj = integrate_classical(&h, z0, &grid, Integrator::Rk45 { tol: ph.integrator_tol })?;
        let e = h.evaluate(z0, 0.0)?;
        if opts.emit_plot_data {
            for (t, z) in traj.times.iter().zip(&traj.points) {
                let mut v = vec![k as f64, *t];
                v.extend(point_values(z));
                tracks.push_str(&row(&v));
            }
        }
        match detect_closure(&traj, ph.closure_tol)? {
            Some(lp) => {
                closed += 1;
                let gamma = geometric_phase_on_loop(&traj, &lp, hbar)?;
                let (n, residual) = bohr_sommerfeld_residual(gamma);
                let rec = phase_integral(&traj, &h, hbar)?;
                let chk = check_loop_phases(&traj, &lp, &rec, hbar)?;
                body.push_str(&format!(
                    "{k},{e:e},{:e},{gamma:e},{n},{residual:e},{:e},{:e}\n",
                    lp.period,
                    chk.record_total,
                    chk.geometric_discrepancy()
                ));
                results.push(json!({
                    "orbit": k, "E": e, "period": lp.period, "gamma": gamma, "n": n, "residual": residual,
                    "action": loop_action(&traj, &lp)?, "total_phase": chk.record_total,
                    "geometric_discrepancy": chk.geometric_discrepancy(),
                }));
            }
            None => {
                log::warn!("orbit {k} did not close within t = {}", ph.t_final);
                body.push_str(&format!("{k},{e:e},nan,nan,,nan,nan,nan\n"));
                results.push(json!({"orbit": k, "E": e, "closed": false}));
            }
        }
    }
    sink.text("phase.csv", body.as_bytes())?;
    if opts.emit_plot_data {
        sink.text("orbits.csv", tracks.as_bytes())?;
    }
    sink.summary(json!({ "orbits": results }))?;
    Ok(format!("{closed} of {} orbits closed", s.orbits()?.len()))
}

pub fn chaos(s: &Scenario, sink: &mut Sink, opts: Options) -> Result<String, CliError> {
    let h = s.hamiltonian()?;
    let hbar = s.hbar();
    let ch = &s.chaos;
    let z0 = s.initial_point()?;
    let ftle = ftle_benettin(&h, &z0, ch.ftle_time, ch.ftle_dt, ch.renorm_every, ch.delta0)?;
    let dz = s.divergence_offset()?;
    let t = uniform_grid(0.0, ch.divergence_time, ch.samples - 1);
    let kind = s.envelope_kind()?;
    let grid_env = if s.n_dof() == 1 {
        Some(make_envelope(kind, &s.grid_spec())?)
    } else {
        None
    };
    let envelope = match (kind, &grid_env) {
        (EnvelopeKind::Gaussian { sigma }, _) if ch.engine == EngineName::ClosedForm => Envelope::Gaussian { sigma },
        (_, Some(env)) => Envelope::Grid(env),
        (_, None) => {
            return Err(CliError::Config(
                "initial.envelope: divergence in several degrees of freedom needs a gaussian envelope".into(),
            ))
        }
    };
    let engine = match ch.engine {
        EngineName::ClosedForm => DivergenceEngine::ClosedForm { substeps: ch.substeps },
        EngineName::PdeLambda0 => {
            if s.propagation.lambda != 0.0 {
                log::info!("the pde-lambda0 engine always propagates at λ = 0");
            }
            DivergenceEngine::PdeLambda0 { steps_per_sample: ch.substeps }
        }
    };
    let d = wavefunction_divergence(&h, envelope, &z0, &dz, &t, hbar, engine)?;
    // Bounded systems can hover below the 0.9 cut after saturating, so the
    // default fit stops at the first crossing of one half.
    let saturation = first_crossing(&d, &t, 0.5);
    let window = if ch.fit_window.len() == 2 {
        (ch.fit_window[0], ch.fit_window[1])
    } else {
        (0.0, saturation.unwrap_or(t[t.len() - 1]))
    };
    let rate = match divergence_rate_fit(&d, &t, window) {
        Ok(r) => Some(r),
        Err(gselab::Error::EmptyWindow) => None,
        Err(e) => return Err(e.into()),
    };
    let mut body = String::from("t,d\n");
    for (ti, di) in t.iter().zip(&d) {
        body.push_str(&row(&[*ti, *di]));
    }
    sink.text("divergence.csv", body.as_bytes())?;
    let fmt_opt = |x: Option<f64>| x.map_or("nan".to_string(), |v| format!("{v:e}"));
    let summary = format!(
        "scenario,ftle,divergence_rate,saturation_time\n{},{ftle:e},{},{}\n",
        s.name,
        fmt_opt(rate),
        fmt_opt(saturation)
    );
    sink.text("chaos_summary.csv", summary.as_bytes())?;
    if opts.emit_plot_data {
        let a = propagate_closed_form(&h, None, &z0, &t, ch.substeps, hbar)?.trajectory;
        let b = propagate_closed_form(&h, None, &z0.offset(&dz), &t, ch.substeps, hbar)?.trajectory;
        let (qn, pn) = coordinate_names(s.n_dof());
        let primed = |v: &[String]| v.iter().map(|x| format!("{x}'")).collect::<Vec<_>>().join(",");
        let mut out = format!("t,{},{},{},{}\n", qn.join(","), pn.join(","), primed(&qn), primed(&pn));
        for (i, &ti) in t.iter().enumerate() {
            let mut v = vec![ti];
            v.extend(point_values(&a.points[i]));
            v.extend(point_values(&b.points[i]));
            out.push_str(&row(&v));
        }
        sink.text("centroids.csv", out.as_bytes())?;
    }
    sink.summary(json!({
            "ftle": ftle,
            "divergence_rate": rate,
            "rate_over_twice_ftle": rate.map(|r| r / (2.0 * ftle)),
            "saturation_time": saturation,
            "fit_window": [window.0, window.1],
        }),
    )?;
    Ok(format!(
        "FTLE {ftle:.5}, divergence rate {}",
        rate.map_or("n/a".into(), |r| format!("{r:.5}"))
    ))
}

struct SweepRow {
    lambda: f64,
    energy: f64,
    dynamics: Option<[f64; 6]>,
}

pub fn sweep_lambda(s: &Scenario, sink: &mut Sink, _: Options) -> Result<String, CliError> {
    one_dof(s, "sweep-lambda")?;
    let h = s.hamiltonian()?;
    let hbar = s.hbar();
    let (_, psi0) = initial_state(s)?;
    let (q, p) = psi0.expectation_point(hbar);
    let z = PhasePoint::single(q, p);
    let base = s.propagation_config()?;
    if s.sweep.evolve {
        s.step_count()?;
        check_box(s, s.propagation.t_final)?;
    }
    let rows: Vec<SweepRow> = s
        .sweep
        .lambdas
        .par_iter()
        .map(|&lambda| -> Result<SweepRow, CliError> {
            let g = deformed_generator(&h, &z, 0.0, lambda, base.mode)?;
            let energy = psi0.expectation_operator(&g, hbar)?.re;
            let dynamics = if s.sweep.evolve {
                let config = PropagationConfig {
                    lambda,
                    snapshot_stride: 0,
                    ..base
                };
                let rec = propagate(&h, &psi0, s.propagation.t_final, &config, hbar)?;
                let n = rec.len() - 1;
                Some([
                    rec.exp_q[n],
                    rec.exp_p[n],
                    rec.sigma_q[n],
                    rec.sigma_p[n],
                    TrajectoryRecord::drift(&rec.energy_quantal),
                    TrajectoryRecord::drift(&rec.norm),
                ])
            } else {
                None
            };
            Ok(SweepRow { lambda, energy, dynamics })
        })
        .collect::<Result<_, _>>()?;
    let mut body = String::from("lambda,energy");
    if s.sweep.evolve {
        body.push_str(",final_exp_q,final_exp_p,final_sigma_q,final_sigma_p,energy_quantal_drift,norm_drift");
    }
    body.push('\n');
    for r in &rows {
        let mut v = vec![r.lambda, r.energy];
        if let Some(d) = r.dynamics {
            v.extend(d);
        }
        body.push_str(&row(&v));
    }
    sink.text("sweep.csv", body.as_bytes())?;
    let results: Vec<Value> = rows
        .iter()
        .map(|r| json!({"lambda": r.lambda, "energy": r.energy, "dynamics": r.dynamics}))
        .collect();
    sink.summary(json!({ "rows": results }))?;
    Ok(rows
        .iter()
        .map(|r| format!("E({}) = {:.10}", r.lambda, r.energy))
        .collect::<Vec<_>>()
        .join(", "))
}
