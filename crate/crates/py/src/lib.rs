//! Python bindings: Hamiltonians, the deformed quantization map, grid
//! states, propagation, the closed-form solution, loop phases and chaos
//! diagnostics.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use gselab_core as core;
use gselab_core::{
    DivergenceEngine, DriveSpec, DrivenHamiltonian, Envelope, EnvelopeKind, GeneratorMode, GridSpec, GridState,
    Integrator, Monomial, OperatorPoly, PhasePoint, PolyObservable, PropagationConfig, Scheme, SplitOrder,
};

create_exception!(gselab, GselabError, PyException, "Configuration or input error.");
create_exception!(gselab, NumericalError, GselabError, "Integration or propagation failure.");

fn err(e: core::Error) -> PyErr {
    use core::Error::*;
    match e {
        NumericalFailure { .. } | StepUnderflow { .. } | Escape { .. } | NonFinite { .. } | ZeroState => {
            NumericalError::new_err(e.to_string())
        }
        other => GselabError::new_err(other.to_string()),
    }
}

fn point(q: Vec<f64>, p: Vec<f64>) -> PyResult<PhasePoint> {
    PhasePoint::new(q, p).map_err(err)
}

fn parse_mode(mode: &str) -> PyResult<GeneratorMode> {
    match mode {
        "interpolating" => Ok(GeneratorMode::Interpolating),
        "raw" => Ok(GeneratorMode::Raw),
        _ => Err(PyValueError::new_err(format!("mode must be 'interpolating' or 'raw', got {mode:?}"))),
    }
}

fn parse_splitting(s: &str) -> PyResult<SplitOrder> {
    match s {
        "strang" => Ok(SplitOrder::Strang),
        "fourth" => Ok(SplitOrder::Fourth),
        _ => Err(PyValueError::new_err(format!("splitting must be 'strang' or 'fourth', got {s:?}"))),
    }
}

fn parse_scheme(s: &str) -> PyResult<Scheme> {
    match s {
        "split-step" => Ok(Scheme::SplitStep),
        "rk4-matrix-free" => Ok(Scheme::Rk4MatrixFree),
        _ => Err(PyValueError::new_err(format!(
            "scheme must be 'split-step' or 'rk4-matrix-free', got {s:?}"
        ))),
    }
}

type Term = (Vec<u32>, Vec<u32>, f64);
type Samples = (Vec<(Vec<f64>, Vec<f64>)>, Vec<f64>);
type PhaseTable = HashMap<&'static str, Vec<f64>>;

fn poly_from_terms(n_dof: usize, terms: Vec<Term>) -> PyResult<PolyObservable> {
    let mut monos = Vec::with_capacity(terms.len());
    for (q, p, c) in terms {
        monos.push((Monomial::new(q, p).map_err(err)?, c));
    }
    PolyObservable::from_terms(n_dof, monos).map_err(err)
}

/// Polynomial Hamiltonian, optionally with time-dependent drive terms.
#[pyclass(name = "Hamiltonian", module = "gselab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyHamiltonian {
    inner: DrivenHamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    /// `terms` is a list of `(q_powers, p_powers, coeff)`.
    #[new]
    fn new(n_dof: usize, terms: Vec<Term>) -> PyResult<Self> {
        Ok(PyHamiltonian {
            inner: DrivenHamiltonian::time_independent(poly_from_terms(n_dof, terms)?),
        })
    }

    #[staticmethod]
    fn harmonic_oscillator(mass: f64, omega: f64) -> Self {
        PyHamiltonian {
            inner: DrivenHamiltonian::time_independent(core::models::harmonic_oscillator(mass, omega)),
        }
    }

    #[staticmethod]
    fn quartic_oscillator(mass: f64) -> Self {
        PyHamiltonian {
            inner: DrivenHamiltonian::time_independent(core::models::quartic_oscillator(mass)),
        }
    }

    /// `½(a p² + b pq + c q²)`.
    #[staticmethod]
    fn generalized_oscillator(a: f64, b: f64, c: f64) -> Self {
        PyHamiltonian {
            inner: DrivenHamiltonian::time_independent(core::models::generalized_oscillator(a, b, c)),
        }
    }

    #[staticmethod]
    fn henon_heiles() -> Self {
        PyHamiltonian {
            inner: DrivenHamiltonian::time_independent(core::models::henon_heiles()),
        }
    }

    #[staticmethod]
    fn driven_duffing(mass: f64, epsilon: f64, omega: f64) -> Self {
        PyHamiltonian {
            inner: core::models::driven_duffing(mass, epsilon, omega),
        }
    }

    /// Adds `amplitude·cos(ω t + phase)` times the polynomial `terms`.
    #[pyo3(signature = (terms, amplitude, angular_frequency, phase_offset=0.0))]
    fn with_cosine_drive(&self, terms: Vec<Term>, amplitude: f64, angular_frequency: f64, phase_offset: f64) -> PyResult<Self> {
        let shape = poly_from_terms(self.inner.n_dof(), terms)?;
        let mut drives = self.inner.drives().to_vec();
        drives.push((
            DriveSpec::Cosine {
                amplitude,
                angular_frequency,
                phase_offset,
            },
            shape,
        ));
        Ok(PyHamiltonian {
            inner: DrivenHamiltonian::new(self.inner.static_part().clone(), drives).map_err(err)?,
        })
    }

    #[getter]
    fn n_dof(&self) -> usize {
        self.inner.n_dof()
    }

    #[getter]
    fn is_separable(&self) -> bool {
        self.inner.is_separable()
    }

    #[pyo3(signature = (q, p, t=0.0))]
    fn energy(&self, q: Vec<f64>, p: Vec<f64>, t: f64) -> PyResult<f64> {
        self.inner.evaluate(&point(q, p)?, t).map_err(err)
    }

    /// Generator of the deformed dynamics at phase point `(q, p)` and time `t`.
    #[pyo3(signature = (lam, q, p, t=0.0, mode="interpolating"))]
    fn generator(&self, lam: f64, q: Vec<f64>, p: Vec<f64>, t: f64, mode: &str) -> PyResult<PyOperator> {
        let g = core::deformed_generator(&self.inner, &point(q, p)?, t, lam, parse_mode(mode)?).map_err(err)?;
        Ok(PyOperator { inner: g })
    }

    /// Weyl quantization of the static part.
    fn weyl(&self) -> PyOperator {
        PyOperator {
            inner: core::weyl_quantize(self.inner.static_part()),
        }
    }

    fn __str__(&self) -> String {
        self.inner.static_part().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian({})", self.inner.static_part())
    }
}

/// Operator polynomial in canonical q-left order with ħ-series coefficients.
#[pyclass(name = "Operator", module = "gselab", frozen, skip_from_py_object)]
struct PyOperator {
    inner: OperatorPoly<f64>,
}

#[pymethods]
impl PyOperator {
    #[getter]
    fn is_hermitian(&self) -> bool {
        self.inner.is_hermitian()
    }

    /// `[(q_powers, p_powers, complex coeff)]` with ħ substituted.
    fn terms(&self, hbar: f64) -> Vec<(Vec<u32>, Vec<u32>, Complex64)> {
        self.inner
            .numeric_terms(hbar)
            .into_iter()
            .map(|(m, c)| (m.q_powers().to_vec(), m.p_powers().to_vec(), c))
            .collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Operator({})", self.inner)
    }
}

/// Uniform periodic grid of `n_points` (a power of two) on `[q_min, q_max)`.
#[pyclass(name = "GridSpec", module = "gselab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGridSpec {
    inner: GridSpec,
}

#[pymethods]
impl PyGridSpec {
    #[new]
    fn new(n_points: usize, q_min: f64, q_max: f64) -> PyResult<Self> {
        Ok(PyGridSpec {
            inner: GridSpec::new(n_points, q_min, q_max).map_err(err)?,
        })
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.inner.n_points()
    }

    #[getter]
    fn q_min(&self) -> f64 {
        self.inner.q_min()
    }

    #[getter]
    fn q_max(&self) -> f64 {
        self.inner.q_max()
    }

    #[getter]
    fn dq(&self) -> f64 {
        self.inner.dq()
    }

    fn positions(&self) -> Vec<f64> {
        self.inner.positions()
    }

    fn __repr__(&self) -> String {
        format!(
            "GridSpec(n_points={}, q_min={}, q_max={})",
            self.inner.n_points(),
            self.inner.q_min(),
            self.inner.q_max()
        )
    }
}

/// Wavefunction sampled on a grid.
#[pyclass(name = "GridState", module = "gselab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGridState {
    inner: GridState,
}

#[pymethods]
impl PyGridState {
    #[new]
    fn new(spec: &PyGridSpec, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(PyGridState {
            inner: GridState::new(spec.inner, amplitudes).map_err(err)?,
        })
    }

    /// Unit-norm wave packet: an envelope (`gaussian`, `hermite` or
    /// `double-gaussian`) centered at `(q, p)`.
    #[staticmethod]
    #[pyo3(signature = (spec, q=0.0, p=0.0, sigma=1.0, hbar=1.0, kind="gaussian", order=0, separation=0.0))]
    #[allow(clippy::too_many_arguments)]
    fn packet(
        spec: &PyGridSpec,
        q: f64,
        p: f64,
        sigma: f64,
        hbar: f64,
        kind: &str,
        order: u32,
        separation: f64,
    ) -> PyResult<Self> {
        let kind = match kind {
            "gaussian" => EnvelopeKind::Gaussian { sigma },
            "hermite" => EnvelopeKind::Hermite { order, sigma },
            "double-gaussian" => EnvelopeKind::SymmetricDoubleGaussian { sigma, separation },
            _ => return Err(PyValueError::new_err(format!("unknown envelope kind {kind:?}"))),
        };
        let env = core::make_envelope(kind, &spec.inner).map_err(err)?;
        let inner = core::closed_form_state(&env, &PhasePoint::single(q, p), 0.0, hbar).map_err(err)?;
        Ok(PyGridState { inner })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyGridState {
            inner: GridState::from_text(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn spec(&self) -> PyGridSpec {
        PyGridSpec { inner: *self.inner.spec() }
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn expectation_q(&self) -> f64 {
        self.inner.expectation_q()
    }

    #[pyo3(signature = (hbar=1.0))]
    fn expectation_p(&self, hbar: f64) -> f64 {
        self.inner.expectation_p(hbar)
    }

    fn position_variance(&self) -> f64 {
        self.inner.position_variance()
    }

    #[pyo3(signature = (hbar=1.0))]
    fn momentum_variance(&self, hbar: f64) -> f64 {
        self.inner.momentum_variance(hbar)
    }

    /// `1 − |⟨a|b⟩|²` for unit states; blind to a global phase.
    fn metric_distance(&self, other: &PyGridState) -> PyResult<f64> {
        self.inner.metric_distance(&other.inner).map_err(err)
    }

    fn l2_distance(&self, other: &PyGridState) -> PyResult<f64> {
        self.inner.l2_distance(&other.inner).map_err(err)
    }

    fn inner_product(&self, other: &PyGridState) -> PyResult<Complex64> {
        self.inner.inner_product(&other.inner).map_err(err)
    }

    #[pyo3(signature = (op, hbar=1.0))]
    fn expectation(&self, op: &PyOperator, hbar: f64) -> PyResult<Complex64> {
        self.inner.expectation_operator(&op.inner, hbar).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("GridState(n_points={}, norm={})", self.inner.spec().n_points(), self.inner.norm())
    }
}

fn config(lam: f64, dt: f64, mode: &str, scheme: &str, splitting: &str, record_stride: usize) -> PyResult<PropagationConfig> {
    let c = PropagationConfig {
        lambda: lam,
        mode: parse_mode(mode)?,
        dt,
        scheme: parse_scheme(scheme)?,
        splitting: parse_splitting(splitting)?,
        record_stride,
        ..PropagationConfig::default()
    };
    c.validate().map_err(err)?;
    Ok(c)
}

/// Final state after evolving `state` from `t0` to `t_final`.
#[pyfunction]
#[pyo3(signature = (h, state, t_final, lam, dt, hbar=1.0, t0=0.0, mode="interpolating", scheme="split-step", splitting="strang"))]
#[allow(clippy::too_many_arguments)]
fn evolve(
    py: Python<'_>,
    h: &PyHamiltonian,
    state: &PyGridState,
    t_final: f64,
    lam: f64,
    dt: f64,
    hbar: f64,
    t0: f64,
    mode: &str,
    scheme: &str,
    splitting: &str,
) -> PyResult<PyGridState> {
    let c = config(lam, dt, mode, scheme, splitting, 1)?;
    let (h, s) = (&h.inner, &state.inner);
    let inner = py.detach(|| core::evolve(h, s, t0, t_final, &c, hbar)).map_err(err)?;
    Ok(PyGridState { inner })
}

/// Evolves `state` from `t = 0` and returns the recorded observables as a
/// dict of lists plus the final state under `"final_state"`.
#[pyfunction]
#[pyo3(signature = (h, state, t_final, lam, dt, hbar=1.0, record_stride=1, mode="interpolating", scheme="split-step", splitting="strang"))]
#[allow(clippy::too_many_arguments)]
fn propagate<'py>(
    py: Python<'py>,
    h: &PyHamiltonian,
    state: &PyGridState,
    t_final: f64,
    lam: f64,
    dt: f64,
    hbar: f64,
    record_stride: usize,
    mode: &str,
    scheme: &str,
    splitting: &str,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let c = config(lam, dt, mode, scheme, splitting, record_stride)?;
    let (hh, s) = (&h.inner, &state.inner);
    let rec = py.detach(|| core::propagate(hh, s, t_final, &c, hbar)).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("t", &rec.times)?;
    d.set_item("exp_q", &rec.exp_q)?;
    d.set_item("exp_p", &rec.exp_p)?;
    d.set_item("norm", &rec.norm)?;
    d.set_item("E_classical", &rec.energy_classical)?;
    d.set_item("E_quantal", &rec.energy_quantal)?;
    d.set_item("sigma_q", &rec.sigma_q)?;
    d.set_item("sigma_p", &rec.sigma_p)?;
    d.set_item("final_state", rec.final_state.map(|inner| PyGridState { inner }))?;
    Ok(d)
}

/// Classical trajectory sampled at `times`: `(points, energies)` with each
/// point a `(q, p)` pair of lists.
#[pyfunction]
#[pyo3(signature = (h, q, p, times, tol=1e-10))]
fn integrate(
    py: Python<'_>,
    h: &PyHamiltonian,
    q: Vec<f64>,
    p: Vec<f64>,
    times: Vec<f64>,
    tol: f64,
) -> PyResult<Samples> {
    let z0 = point(q, p)?;
    let hh = &h.inner;
    let traj = py
        .detach(|| core::integrate_classical(hh, &z0, &times, Integrator::Rk45 { tol }))
        .map_err(err)?;
    let points = traj.points.into_iter().map(|z| (z.q, z.p)).collect();
    Ok((points, traj.energies))
}

/// Closed-form λ = 0 states at `times` for the envelope shifted onto the
/// classical orbit from `(q, p)`. Returns `(states, phases)` where `phases`
/// maps `t`, `total`, `dynamical` and `geometric` to lists.
#[pyfunction]
#[pyo3(signature = (h, envelope, q, p, times, hbar=1.0, substeps=10))]
#[allow(clippy::too_many_arguments)]
fn closed_form(
    py: Python<'_>,
    h: &PyHamiltonian,
    envelope: &PyGridState,
    q: f64,
    p: f64,
    times: Vec<f64>,
    hbar: f64,
    substeps: usize,
) -> PyResult<(Vec<PyGridState>, PhaseTable)> {
    let (hh, env) = (&h.inner, &envelope.inner);
    let run = py
        .detach(|| core::propagate_closed_form(hh, Some(env), &PhasePoint::single(q, p), &times, substeps, hbar))
        .map_err(err)?;
    let states = run.states.into_iter().map(|inner| PyGridState { inner }).collect();
    let phases = HashMap::from([
        ("t", run.phases.times),
        ("total", run.phases.total),
        ("dynamical", run.phases.dynamical),
        ("geometric", run.phases.geometric),
    ]);
    Ok((states, phases))
}

/// Loop quantities of the orbit from `(q, p)`: period, action, γ = ∮p dq/ħ,
/// the nearest Bohr–Sommerfeld level and its residual. Returns `None` if
/// the orbit does not close within `t_final`.
#[pyfunction]
#[pyo3(signature = (h, q, p, t_final, samples=2000, hbar=1.0, closure_tol=1e-6, tol=1e-12))]
#[allow(clippy::too_many_arguments)]
fn loop_phase(
    py: Python<'_>,
    h: &PyHamiltonian,
    q: Vec<f64>,
    p: Vec<f64>,
    t_final: f64,
    samples: usize,
    hbar: f64,
    closure_tol: f64,
    tol: f64,
) -> PyResult<Option<HashMap<&'static str, f64>>> {
    if samples < 2 {
        return Err(PyValueError::new_err("samples must be at least 2"));
    }
    let z0 = point(q, p)?;
    let hh = &h.inner;
    py.detach(|| -> core::Result<Option<HashMap<&'static str, f64>>> {
        let grid = core::uniform_grid(0.0, t_final, samples - 1);
        let traj = core::integrate_classical(hh, &z0, &grid, Integrator::Rk45 { tol })?;
        let Some(lp) = core::detect_closure(&traj, closure_tol)? else {
            return Ok(None);
        };
        let gamma = core::geometric_phase_on_loop(&traj, &lp, hbar)?;
        let (n, residual) = core::bohr_sommerfeld_residual(gamma);
        Ok(Some(HashMap::from([
            ("energy", hh.evaluate(&z0, 0.0)?),
            ("period", lp.period),
            ("action", core::loop_action(&traj, &lp)?),
            ("gamma", gamma),
            ("n", n as f64),
            ("residual", residual),
        ])))
    })
    .map_err(err)
}

/// Finite-time Lyapunov exponent by two-trajectory renormalization.
#[pyfunction]
#[pyo3(signature = (h, q, p, t_total, dt=0.01, renorm_every=10, delta0=1e-8))]
#[allow(clippy::too_many_arguments)]
fn ftle(
    py: Python<'_>,
    h: &PyHamiltonian,
    q: Vec<f64>,
    p: Vec<f64>,
    t_total: f64,
    dt: f64,
    renorm_every: usize,
    delta0: f64,
) -> PyResult<f64> {
    let z0 = point(q, p)?;
    let hh = &h.inner;
    py.detach(|| core::ftle_benettin(hh, &z0, t_total, dt, renorm_every, delta0))
        .map_err(err)
}

/// Metric distance `d(t)` between Gaussian packets of width `sigma` launched
/// from `(q, p)` and `(q + dq, p + dp)`, under the closed-form dynamics.
#[pyfunction]
#[pyo3(signature = (h, q, p, dq, dp, times, sigma=1.0, hbar=1.0, substeps=10))]
#[allow(clippy::too_many_arguments)]
fn divergence(
    py: Python<'_>,
    h: &PyHamiltonian,
    q: Vec<f64>,
    p: Vec<f64>,
    dq: Vec<f64>,
    dp: Vec<f64>,
    times: Vec<f64>,
    sigma: f64,
    hbar: f64,
    substeps: usize,
) -> PyResult<Vec<f64>> {
    let (z0, dz) = (point(q, p)?, point(dq, dp)?);
    let hh = &h.inner;
    py.detach(|| {
        core::wavefunction_divergence(
            hh,
            Envelope::Gaussian { sigma },
            &z0,
            &dz,
            &times,
            hbar,
            DivergenceEngine::ClosedForm { substeps },
        )
    })
    .map_err(err)
}

/// Least-squares slope of `ln d` over `window`, skipping saturated samples.
#[pyfunction]
fn divergence_rate(d: Vec<f64>, times: Vec<f64>, window: (f64, f64)) -> PyResult<f64> {
    core::divergence_rate_fit(&d, &times, window).map_err(err)
}

#[pymodule]
fn gselab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("GselabError", m.py().get_type::<GselabError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyGridSpec>()?;
    m.add_class::<PyGridState>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(loop_phase, m)?)?;
    m.add_function(wrap_pyfunction!(ftle, m)?)?;
    m.add_function(wrap_pyfunction!(divergence, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_rate, m)?)?;
    Ok(())
}
