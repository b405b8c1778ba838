//! Scenario files: a TOML document describing one physical setup and the
//! parameters of every subcommand. Unknown keys are rejected; omitted keys
//! take the defaults below, and the fully resolved document is echoed into
//! every output file.

use serde::{Deserialize, Serialize};

use gselab::{
    DriveSpec, DrivenHamiltonian, EnvelopeKind, GeneratorMode, GridSpec, ModelConstants, Monomial, PhasePoint,
    PolyObservable, PropagationConfig, Refresh, Scheme, SplitOrder,
};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Optional artifacts: `snapshots` writes grid states, `phases` writes
    /// the phase table of closed-form runs, `trajectory` the observables.
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Artifact>,
    #[serde(default)]
    pub constants: Constants,
    pub hamiltonian: HamiltonianConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub propagation: PropagationSection,
    #[serde(default)]
    pub quantize: QuantizeConfig,
    #[serde(default)]
    pub phase: PhaseConfig,
    #[serde(default)]
    pub chaos: ChaosConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    Trajectory,
    Snapshots,
    Phases,
}

fn default_outputs() -> Vec<Artifact> {
    vec![Artifact::Trajectory, Artifact::Phases]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    pub hbar: f64,
    /// One mass per degree of freedom; used by `hamiltonian.kinetic`.
    #[serde(default)]
    pub masses: Vec<f64>,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            hbar: 1.0,
            masses: Vec::new(),
        }
    }
}

/// `coeff · Π q_k^{powers_q[k]} p_k^{powers_p[k]}`; missing powers are 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    #[serde(default)]
    pub powers_q: Vec<u32>,
    #[serde(default)]
    pub powers_p: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub n_dof: usize,
    /// Adds `Σ p_k²/2m_k` with the masses from `constants.masses`.
    #[serde(default)]
    pub kinetic: bool,
    #[serde(default)]
    pub terms: Vec<Term>,
    #[serde(default)]
    pub drives: Vec<DriveConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveKind {
    Constant,
    Cosine,
    PeriodicKick,
}

/// A drive `f(t)` multiplying the polynomial `terms`. Parameters used by
/// each kind: constant → `value`; cosine → `amplitude`,
/// `angular_frequency`, `phase_offset`; periodic-kick → `strength`,
/// `period`, `width`, `smoothing`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub kind: DriveKind,
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_frequency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeName {
    Gaussian,
    Hermite,
    DoubleGaussian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub envelope: EnvelopeName,
    pub sigma: f64,
    /// Hermite order.
    pub order: u32,
    /// Distance between the two double-Gaussian lobes.
    pub separation: f64,
    /// Initial expectation values; empty means the origin.
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            envelope: EnvelopeName::Gaussian,
            sigma: 1.0,
            order: 0,
            separation: 0.0,
            q: Vec::new(),
            p: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub q_min: f64,
    pub q_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_points: 256,
            q_min: -16.0,
            q_max: 16.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Raw,
    Interpolating,
}

impl From<ModeName> for GeneratorMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Raw => GeneratorMode::Raw,
            ModeName::Interpolating => GeneratorMode::Interpolating,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    SplitStep,
    Rk4MatrixFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefreshName {
    PredictorCorrector,
    Frozen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplittingName {
    Strang,
    Fourth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationSection {
    pub lambda: f64,
    pub mode: ModeName,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: SchemeName,
    pub refresh: RefreshName,
    pub splitting: SplittingName,
    pub record_stride: usize,
    /// Snapshot every this many steps when `snapshots` is requested;
    /// 0 means at every record.
    pub snapshot_stride: usize,
    pub corrector_tol: f64,
    pub max_corrections: usize,
    /// RK4 substeps per record interval for closed-form runs.
    pub closed_form_substeps: usize,
}

impl Default for PropagationSection {
    fn default() -> Self {
        PropagationSection {
            lambda: 1.0,
            mode: ModeName::Interpolating,
            dt: 0.01,
            t_final: 1.0,
            scheme: SchemeName::SplitStep,
            refresh: RefreshName::PredictorCorrector,
            splitting: SplittingName::Strang,
            record_stride: 10,
            snapshot_stride: 0,
            corrector_tol: 1e-12,
            max_corrections: 50,
            closed_form_substeps: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizeConfig {
    pub lambda: f64,
    pub mode: ModeName,
    /// Expansion point; empty means the origin.
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

impl Default for QuantizeConfig {
    fn default() -> Self {
        QuantizeConfig {
            lambda: 1.0,
            mode: ModeName::Interpolating,
            q: Vec::new(),
            p: Vec::new(),
            t: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Orbit {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseConfig {
    /// Initial conditions, one per orbit; empty means the scenario's
    /// initial point.
    pub orbits: Vec<Orbit>,
    /// Integration span per orbit; must exceed the orbit period.
    pub t_final: f64,
    pub samples: usize,
    pub closure_tol: f64,
    pub integrator_tol: f64,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        PhaseConfig {
            orbits: Vec::new(),
            t_final: 20.0,
            samples: 2000,
            closure_tol: 1e-6,
            integrator_tol: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineName {
    ClosedForm,
    PdeLambda0,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChaosConfig {
    pub ftle_time: f64,
    pub ftle_dt: f64,
    pub renorm_every: usize,
    pub delta0: f64,
    /// Offset between the two wavefunction centroids; empty means
    /// `1e-6` along the first coordinate.
    pub dz_q: Vec<f64>,
    pub dz_p: Vec<f64>,
    pub divergence_time: f64,
    pub samples: usize,
    pub substeps: usize,
    pub engine: EngineName,
    /// Fit window for the divergence rate; empty means from 0 to the
    /// first time the distance reaches 0.9.
    pub fit_window: Vec<f64>,
}

impl Default for ChaosConfig {
    fn default() -> Self {
        ChaosConfig {
            ftle_time: 1000.0,
            ftle_dt: 0.01,
            renorm_every: 10,
            delta0: 1e-8,
            dz_q: Vec::new(),
            dz_p: Vec::new(),
            divergence_time: 100.0,
            samples: 1000,
            substeps: 10,
            engine: EngineName::ClosedForm,
            fit_window: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    /// Also propagate each λ to `propagation.t_final`.
    pub evolve: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lambdas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            evolve: false,
        }
    }
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

fn check_finite(key: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(config_err(key, format!("must be finite, got {x}")))
    }
}

fn check_positive(key: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(config_err(key, format!("must be positive, got {x}")))
    }
}

fn padded(key: &str, v: &[f64], n: usize, fill: f64) -> Result<Vec<f64>, CliError> {
    if v.is_empty() {
        return Ok(vec![fill; n]);
    }
    if v.len() != n {
        return Err(config_err(key, format!("needs {n} entries, got {}", v.len())));
    }
    for (i, x) in v.iter().enumerate() {
        check_finite(&format!("{key}[{i}]"), *x)?;
    }
    Ok(v.to_vec())
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn n_dof(&self) -> usize {
        self.hamiltonian.n_dof
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name.starts_with('.') {
            return Err(config_err("name", "must be a non-empty file-name-safe string"));
        }
        let n = self.n_dof();
        if n == 0 {
            return Err(config_err("hamiltonian.n_dof", "must be at least 1"));
        }
        ModelConstants::new(
            self.constants.hbar,
            if self.constants.masses.is_empty() { vec![1.0] } else { self.constants.masses.clone() },
        )
        .map_err(|e| config_err("constants", e))?;
        self.hamiltonian()?;
        self.initial_point()?;
        self.envelope_kind()?;
        let g = &self.grid;
        GridSpec::new(g.n_points, g.q_min, g.q_max).map_err(|e| config_err("grid", e))?;
        self.propagation_config()?;
        let pr = &self.propagation;
        check_finite("propagation.t_final", pr.t_final)?;
        if pr.closed_form_substeps == 0 {
            return Err(config_err("propagation.closed_form_substeps", "must be positive"));
        }
        let qz = &self.quantize;
        check_finite("quantize.lambda", qz.lambda)?;
        check_finite("quantize.t", qz.t)?;
        padded("quantize.q", &qz.q, n, 0.0)?;
        padded("quantize.p", &qz.p, n, 0.0)?;
        self.orbits()?;
        let ph = &self.phase;
        check_positive("phase.t_final", ph.t_final)?;
        check_positive("phase.closure_tol", ph.closure_tol)?;
        check_positive("phase.integrator_tol", ph.integrator_tol)?;
        if ph.samples < 3 {
            return Err(config_err("phase.samples", "must be at least 3"));
        }
        let ch = &self.chaos;
        check_positive("chaos.ftle_time", ch.ftle_time)?;
        check_positive("chaos.ftle_dt", ch.ftle_dt)?;
        check_positive("chaos.delta0", ch.delta0)?;
        check_positive("chaos.divergence_time", ch.divergence_time)?;
        if ch.renorm_every == 0 {
            return Err(config_err("chaos.renorm_every", "must be positive"));
        }
        if ch.samples < 2 || ch.substeps == 0 {
            return Err(config_err("chaos.samples", "need at least 2 samples and 1 substep"));
        }
        self.divergence_offset()?;
        if !(ch.fit_window.is_empty() || (ch.fit_window.len() == 2 && ch.fit_window[0] < ch.fit_window[1])) {
            return Err(config_err("chaos.fit_window", "must be empty or [start, end] with start < end"));
        }
        if self.sweep.lambdas.is_empty() {
            return Err(config_err("sweep.lambdas", "must not be empty"));
        }
        for (i, l) in self.sweep.lambdas.iter().enumerate() {
            check_finite(&format!("sweep.lambdas[{i}]"), *l)?;
        }
        Ok(())
    }

    fn monomial(&self, key: &str, t: &Term) -> Result<(Monomial, f64), CliError> {
        let n = self.n_dof();
        let pad = |v: &[u32], which: &str| -> Result<Vec<u32>, CliError> {
            if v.len() > n {
                return Err(config_err(&format!("{key}.{which}"), format!("has more than {n} entries")));
            }
            let mut out = v.to_vec();
            out.resize(n, 0);
            Ok(out)
        };
        check_finite(&format!("{key}.coeff"), t.coeff)?;
        let m = Monomial::new(pad(&t.powers_q, "powers_q")?, pad(&t.powers_p, "powers_p")?).map_err(|e| config_err(key, e))?;
        Ok((m, t.coeff))
    }

    fn polynomial(&self, key: &str, terms: &[Term]) -> Result<PolyObservable, CliError> {
        let mut f = PolyObservable::zero(self.n_dof());
        for (i, t) in terms.iter().enumerate() {
            let (m, c) = self.monomial(&format!("{key}[{i}]"), t)?;
            f.add_term(m, c);
        }
        Ok(f)
    }

    pub fn hamiltonian(&self) -> Result<DrivenHamiltonian, CliError> {
        let hc = &self.hamiltonian;
        let n = hc.n_dof;
        let mut h = self.polynomial("hamiltonian.terms", &hc.terms)?;
        if hc.kinetic {
            let masses = padded("constants.masses", &self.constants.masses, n, 1.0)?;
            for (k, m) in masses.iter().enumerate() {
                let mut p = vec![0; n];
                p[k] = 2;
                h.add_term(Monomial::new(vec![0; n], p).expect("valid monomial"), 0.5 / m);
            }
        }
        let mut drives = Vec::new();
        for (i, d) in hc.drives.iter().enumerate() {
            let key = format!("hamiltonian.drives[{i}]");
            let need = |v: Option<f64>, name: &str| v.ok_or_else(|| config_err(&format!("{key}.{name}"), "required for this drive kind"));
            let spec = match d.kind {
                DriveKind::Constant => DriveSpec::Constant {
                    value: need(d.value, "value")?,
                },
                DriveKind::Cosine => DriveSpec::Cosine {
                    amplitude: need(d.amplitude, "amplitude")?,
                    angular_frequency: need(d.angular_frequency, "angular_frequency")?,
                    phase_offset: d.phase_offset.unwrap_or(0.0),
                },
                DriveKind::PeriodicKick => DriveSpec::PeriodicKick {
                    strength: need(d.strength, "strength")?,
                    period: need(d.period, "period")?,
                    width: d.width.unwrap_or(0.0),
                    smoothing: d.smoothing,
                },
            };
            drives.push((spec, self.polynomial(&format!("{key}.terms"), &d.terms)?));
        }
        if h.is_zero() && drives.is_empty() {
            return Err(config_err("hamiltonian", "has no terms"));
        }
        DrivenHamiltonian::new(h, drives).map_err(|e| config_err("hamiltonian", e))
    }

    pub fn hbar(&self) -> f64 {
        self.constants.hbar
    }

    pub fn initial_point(&self) -> Result<PhasePoint, CliError> {
        let n = self.n_dof();
        let q = padded("initial.q", &self.initial.q, n, 0.0)?;
        let p = padded("initial.p", &self.initial.p, n, 0.0)?;
        PhasePoint::new(q, p).map_err(|e| config_err("initial", e))
    }

    pub fn envelope_kind(&self) -> Result<EnvelopeKind, CliError> {
        let i = &self.initial;
        check_positive("initial.sigma", i.sigma)?;
        check_finite("initial.separation", i.separation)?;
        Ok(match i.envelope {
            EnvelopeName::Gaussian => EnvelopeKind::Gaussian { sigma: i.sigma },
            EnvelopeName::Hermite => EnvelopeKind::Hermite {
                order: i.order,
                sigma: i.sigma,
            },
            EnvelopeName::DoubleGaussian => EnvelopeKind::SymmetricDoubleGaussian {
                sigma: i.sigma,
                separation: i.separation,
            },
        })
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(self.grid.n_points, self.grid.q_min, self.grid.q_max).expect("validated grid")
    }

    /// Library propagation settings; snapshots follow `snapshot_stride`
    /// (or the record stride when it is 0) if `snapshots` is requested.
    pub fn propagation_config(&self) -> Result<PropagationConfig, CliError> {
        let pr = &self.propagation;
        check_finite("propagation.lambda", pr.lambda)?;
        if !(pr.dt.is_finite() && pr.dt != 0.0) {
            return Err(config_err("propagation.dt", format!("must be finite and nonzero, got {}", pr.dt)));
        }
        let snapshot_stride = if self.outputs.contains(&Artifact::Snapshots) {
            if pr.snapshot_stride == 0 {
                pr.record_stride
            } else {
                pr.snapshot_stride
            }
        } else {
            0
        };
        let config = PropagationConfig {
            lambda: pr.lambda,
            mode: pr.mode.into(),
            dt: pr.dt,
            scheme: match pr.scheme {
                SchemeName::SplitStep => Scheme::SplitStep,
                SchemeName::Rk4MatrixFree => Scheme::Rk4MatrixFree,
            },
            refresh: match pr.refresh {
                RefreshName::PredictorCorrector => Refresh::PredictorCorrector,
                RefreshName::Frozen => Refresh::Frozen,
            },
            splitting: match pr.splitting {
                SplittingName::Strang => SplitOrder::Strang,
                SplittingName::Fourth => SplitOrder::Fourth,
            },
            snapshot_stride,
            record_stride: pr.record_stride,
            corrector_tol: pr.corrector_tol,
            max_corrections: pr.max_corrections,
        };
        config.validate().map_err(|e| config_err("propagation", e))?;
        Ok(config)
    }

    pub fn quantize_point(&self) -> Result<PhasePoint, CliError> {
        let n = self.n_dof();
        let q = padded("quantize.q", &self.quantize.q, n, 0.0)?;
        let p = padded("quantize.p", &self.quantize.p, n, 0.0)?;
        PhasePoint::new(q, p).map_err(|e| config_err("quantize", e))
    }

    pub fn orbits(&self) -> Result<Vec<PhasePoint>, CliError> {
        if self.phase.orbits.is_empty() {
            return Ok(vec![self.initial_point()?]);
        }
        let n = self.n_dof();
        self.phase
            .orbits
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let key = format!("phase.orbits[{i}]");
                let q = padded(&format!("{key}.q"), &o.q, n, 0.0)?;
                let p = padded(&format!("{key}.p"), &o.p, n, 0.0)?;
                PhasePoint::new(q, p).map_err(|e| config_err(&key, e))
            })
            .collect()
    }

    pub fn divergence_offset(&self) -> Result<PhasePoint, CliError> {
        let n = self.n_dof();
        let ch = &self.chaos;
        let (q, p) = if ch.dz_q.is_empty() && ch.dz_p.is_empty() {
            let mut q = vec![0.0; n];
            q[0] = 1e-6;
            (q, vec![0.0; n])
        } else {
            (padded("chaos.dz_q", &ch.dz_q, n, 0.0)?, padded("chaos.dz_p", &ch.dz_p, n, 0.0)?)
        };
        PhasePoint::new(q, p).map_err(|e| config_err("chaos", e))
    }

    /// Number of whole propagation steps to `t_final`.
    pub fn step_count(&self) -> Result<usize, CliError> {
        let pr = &self.propagation;
        let x = pr.t_final / pr.dt;
        let n = x.round();
        if n < 1.0 || (x - n).abs() > 1e-9 * x.abs().max(1.0) {
            return Err(config_err(
                "propagation.t_final",
                format!("must be a positive whole multiple of dt = {}", pr.dt),
            ));
        }
        Ok(n as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "ho"
[hamiltonian]
n_dof = 1
kinetic = true
terms = [{ powers_q = [2], coeff = 0.5 }]
"#;

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::parse(MINIMAL).unwrap();
        assert_eq!(s.grid, GridConfig::default());
        assert_eq!(s.propagation.lambda, 1.0);
        let h = s.hamiltonian().unwrap();
        assert_eq!(h.evaluate(&PhasePoint::single(1.0, 2.0), 0.0).unwrap(), 2.5);
    }

    #[test]
    fn round_trips_through_toml() {
        let s = Scenario::parse(MINIMAL).unwrap();
        assert_eq!(Scenario::parse(&s.to_toml()).unwrap(), s);
    }

    #[test]
    fn errors_name_the_key() {
        let bad = MINIMAL.replace("n_dof = 1", "n_dof = 1\nbogus = 3");
        assert!(matches!(Scenario::parse(&bad), Err(CliError::Config(m)) if m.contains("bogus")));
        let bad = format!("{MINIMAL}\n[propagation]\ndt = 0.0\n");
        assert!(matches!(Scenario::parse(&bad), Err(CliError::Config(m)) if m.contains("propagation.dt")));
        let bad = format!("{MINIMAL}\n[initial]\nq = [1.0, 2.0]\n");
        assert!(matches!(Scenario::parse(&bad), Err(CliError::Config(m)) if m.contains("initial.q")));
        let bad = MINIMAL.replace("powers_q = [2]", "powers_q = [2, 1]");
        assert!(matches!(Scenario::parse(&bad), Err(CliError::Config(m)) if m.contains("hamiltonian.terms[0].powers_q")));
    }

    #[test]
    fn drives_need_their_parameters() {
        let base = format!("{MINIMAL}\n[[hamiltonian.drives]]\nkind = \"cosine\"\nterms = [{{ powers_q = [1], coeff = 1.0 }}]\n");
        assert!(matches!(Scenario::parse(&base), Err(CliError::Config(m)) if m.contains("amplitude")));
        let ok = format!("{base}amplitude = 0.3\nangular_frequency = 1.0\n");
        let s = Scenario::parse(&ok).unwrap();
        assert!(!s.hamiltonian().unwrap().is_time_independent());
        assert_eq!(Scenario::parse(&s.to_toml()).unwrap(), s);
    }
}
