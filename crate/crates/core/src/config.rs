//! JSON run configuration.
//!
//! ```json
//! {
//!   "scenario": {"type": "continuum", "kind": "nlfse"},
//!   "params": {"exponent_s": 2.5, "coupling_chi": 0.5},
//!   "grid": {"length": 256.0, "points": 256},
//!   "initial_condition": {"type": "gaussian_packet", "width": 10.0, "k0": 0.3},
//!   "integrator": {"dt": 0.05, "t_end": 50.0, "series_every": 0.5},
//!   "outputs": {"directory": "nlfse"}
//! }
//! ```
//!
//! Omitted keys take the defaults of the corresponding `Default` impls;
//! [`RunConfig::resolve`] writes every one of them out explicitly.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::continuum::{
    effective_nonlinearity, Coefficients, DispersionMode, PhononIntegrator, ScenarioKind,
    ScenarioSpec,
};
use crate::lattice::{CouplingMethod, LatticeOptions, LatticeTopology, SourceStencil, Boundary};
use crate::model::{quadratic_coefficient, ModelParams};
use crate::spectral::{Field, SpectralGrid};
use crate::traveling::{gamma_coefficient, ProfileDispersion, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumScenario {
    pub kind: ScenarioKind,
    /// Defaults to `exact_gap` for `general_nonlocal`, `asymptotic` otherwise.
    #[serde(default)]
    pub dispersion_mode: Option<DispersionMode>,
    #[serde(default)]
    pub nonlinearity_g: Option<f64>,
    #[serde(default)]
    pub coefficients: Coefficients,
    #[serde(default)]
    pub lambda_shift: f64,
    #[serde(default = "two")]
    pub source_factor: f64,
    #[serde(default)]
    pub phonon_integrator: PhononIntegrator,
}

fn two() -> f64 {
    2.0
}

fn one() -> f64 {
    1.0
}

impl ContinuumScenario {
    pub fn spec(&self) -> ScenarioSpec {
        let mut spec = ScenarioSpec::new(self.kind);
        if let Some(mode) = self.dispersion_mode {
            spec.dispersion_mode = mode;
        }
        spec.nonlinearity_g = self.nonlinearity_g;
        spec.coefficients = self.coefficients;
        spec.lambda_shift = self.lambda_shift;
        spec.source_factor = self.source_factor;
        spec.phonon_integrator = self.phonon_integrator;
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeScenario {
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub interaction_cutoff: Option<usize>,
    #[serde(default)]
    pub stencil: SourceStencil,
    #[serde(default = "one")]
    pub source_factor: f64,
    #[serde(default)]
    pub coupling_method: CouplingMethod,
}

impl LatticeScenario {
    pub fn topology(&self) -> LatticeTopology {
        LatticeTopology {
            boundary: self.boundary,
            interaction_cutoff: self.interaction_cutoff,
        }
    }

    pub fn options(&self) -> LatticeOptions {
        LatticeOptions {
            stencil: self.stencil,
            source_factor: self.source_factor,
            coupling_method: self.coupling_method,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TravelingScenario {
    pub wave_speed: f64,
    #[serde(default = "fractional")]
    pub dispersion: ProfileDispersion,
    /// `mu` in `phi e^{i mu t / hbar}`.
    pub frequency_shift: f64,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Relative amplitude of seeded noise added to the initial guess.
    #[serde(default)]
    pub guess_noise: f64,
}

fn fractional() -> ProfileDispersion {
    ProfileDispersion::Fractional
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScenarioConfig {
    Continuum(ContinuumScenario),
    Lattice(LatticeScenario),
    TravelingWave(TravelingScenario),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Domain length; defaults to `points` (unit spacing). Lattice runs
    /// require unit spacing.
    #[serde(default)]
    pub length: Option<f64>,
    pub points: usize,
}

impl GridConfig {
    pub fn length(&self) -> f64 {
        self.length.unwrap_or(self.points as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `A exp(-(x - x0)^2 / (2 width^2) + i k0 x)`
    GaussianPacket {
        #[serde(default)]
        x0: f64,
        width: f64,
        #[serde(default)]
        k0: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `A e^{i k0 x}`
    PlaneWave {
        k0: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `eta sech((x - x0) / width)`; `width` defaults to the classical NLS
    /// value `sqrt(2 A / g) / eta`.
    SechSoliton {
        eta: f64,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        width: Option<f64>,
    },
    Zero,
}

impl InitialCondition {
    /// Value at position `x`.
    pub fn value(&self, x: f64, params: &ModelParams) -> Complex64 {
        match *self {
            Self::GaussianPacket {
                x0,
                width,
                k0,
                amplitude,
            } => {
                let d = x - x0;
                Complex64::from_polar(amplitude * (-d * d / (2.0 * width * width)).exp(), k0 * x)
            }
            Self::PlaneWave { k0, amplitude } => Complex64::from_polar(amplitude, k0 * x),
            Self::SechSoliton { eta, x0, width } => {
                let w = width.unwrap_or_else(|| classical_width(eta, params));
                Complex64::new(eta / ((x - x0) / w).cosh(), 0.0)
            }
            Self::Zero => Complex64::new(0.0, 0.0),
        }
    }

    pub fn field(&self, grid: &Arc<SpectralGrid>, params: &ModelParams) -> Field {
        Field::from_fn(grid.clone(), |x| self.value(x, params))
    }
}

/// Width `sqrt(2 A / g) / eta` of the classical NLS soliton.
fn classical_width(eta: f64, params: &ModelParams) -> f64 {
    let a = quadratic_coefficient(params);
    let g = effective_nonlinearity(params, Coefficients::Corrected);
    (2.0 * a / g).sqrt() / eta
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Snapshot interval; defaults to `t_end`.
    #[serde(default)]
    pub snapshot_every: Option<f64>,
    /// Series interval; defaults to `dt`.
    #[serde(default)]
    pub series_every: Option<f64>,
}

impl IntegratorConfig {
    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }

    pub fn series_stride(&self) -> u64 {
        (self.series_every.unwrap_or(self.dt) / self.dt).round() as u64
    }

    pub fn snapshot_stride(&self) -> u64 {
        (self.snapshot_every.unwrap_or(self.t_end) / self.dt).round() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative paths resolve against the output root.
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "yes")]
    pub series: bool,
    #[serde(default = "yes")]
    pub snapshots: bool,
}

fn default_directory() -> String {
    "output".into()
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            series: true,
            snapshots: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub params: ModelParams,
    pub grid: GridConfig,
    pub initial_condition: InitialCondition,
    /// Required for time-dependent runs.
    #[serde(default)]
    pub integrator: Option<IntegratorConfig>,
    #[serde(default)]
    pub outputs: OutputConfig,
    /// Seeds the guess perturbation of traveling-wave runs.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Every violated rule.
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse {
                line,
                column,
                message,
            } => write!(f, "parse error at line {line}, column {column}: {message}"),
            Self::Invalid(v) => {
                write!(f, "{} validation error(s):", v.len())?;
                for e in v {
                    write!(f, "\n  - {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parses, validates and resolves a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let violations = config.violations();
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations));
    }
    Ok(config.resolve())
}

fn multiple_of(interval: f64, dt: f64) -> bool {
    let r = interval / dt;
    interval > 0.0 && r >= 1.0 - 1e-12 && (r - r.round()).abs() <= 1e-12 * r.max(1.0)
}

impl RunConfig {
    /// All violated rules, each naming the rule.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let p = &self.params;
        if let Err(e) = p.validate() {
            out.push(format!("params: {e}"));
        }
        let s = p.exponent_s;

        let m = self.grid.points;
        if m < 8 || !m.is_multiple_of(2) {
            out.push(format!("grid.points must be even and >= 8, got {m}"));
        }
        let length = self.grid.length();
        if !(length > 0.0 && length.is_finite()) {
            out.push(format!("grid.length must be > 0, got {length}"));
        }
        let grid = SpectralGrid::new(length, m).ok();

        match &self.scenario {
            ScenarioConfig::Continuum(c) => {
                let spec = c.spec();
                if let Err(e) = spec.kind.check_exponent(s) {
                    out.push(format!("scenario: {e}"));
                }
                for (name, v) in [
                    ("scenario.lambda_shift", c.lambda_shift),
                    ("scenario.source_factor", c.source_factor),
                ] {
                    if !v.is_finite() {
                        out.push(format!("{name} must be finite"));
                    }
                }
                if let Some(g) = c.nonlinearity_g {
                    if !g.is_finite() {
                        out.push("scenario.nonlinearity_g must be finite".into());
                    }
                }
                if let Some(grid) = &grid {
                    if spec.dispersion_mode == DispersionMode::ExactGap {
                        if let Err(e) = grid.require_lattice_zone() {
                            out.push(format!("exact gap dispersion: {e}"));
                        }
                    }
                    if let Some(i) = &self.integrator {
                        if spec.kind.has_phonons() && p.validate().is_ok() {
                            let limit = 0.5 / (p.sound_speed() * grid.k_max());
                            if i.dt > limit {
                                out.push(format!(
                                    "integrator.dt = {} exceeds the strain stability limit 0.5 / (v_s k_max) = {limit}",
                                    i.dt
                                ));
                            }
                        }
                    }
                }
            }
            ScenarioConfig::Lattice(l) => {
                if (length - m as f64).abs() > 1e-12 * m as f64 {
                    out.push(format!(
                        "lattice runs use unit spacing: grid.length must equal grid.points ({m})"
                    ));
                }
                if let Err(e) = l.topology().validate(m) {
                    out.push(format!("scenario: {e}"));
                }
                if !l.source_factor.is_finite() {
                    out.push("scenario.source_factor must be finite".into());
                }
            }
            ScenarioConfig::TravelingWave(t) => {
                if p.validate().is_ok() {
                    if let Err(e) = gamma_coefficient(t.wave_speed, p) {
                        out.push(format!("scenario.wave_speed: {e}"));
                    }
                }
                let probe = crate::traveling::TravelingWaveProblem::new(
                    *p,
                    0.0,
                    SpectralGrid::shared(2.0 * PI * 8.0, 8).expect("valid probe grid"),
                    t.dispersion,
                );
                if let Err(e @ crate::Error::Incompatible { .. }) = probe {
                    out.push(format!("scenario.dispersion: {e}"));
                }
                if !t.frequency_shift.is_finite() {
                    out.push("scenario.frequency_shift must be finite".into());
                }
                if !(t.guess_noise >= 0.0 && t.guess_noise.is_finite()) {
                    out.push("scenario.guess_noise must be finite and >= 0".into());
                }
                if !(t.solver.tolerance > 0.0) {
                    out.push("scenario.solver.tolerance must be > 0".into());
                }
                if matches!(self.initial_condition, InitialCondition::Zero) {
                    out.push("traveling-wave runs need a nonzero initial guess".into());
                }
            }
        }

        match &self.initial_condition {
            InitialCondition::GaussianPacket {
                x0,
                width,
                k0,
                amplitude,
            } => {
                if !(*width > 0.0 && width.is_finite()) {
                    out.push(format!("initial_condition.width must be > 0, got {width}"));
                }
                if ![x0, k0, amplitude].iter().all(|v| v.is_finite()) {
                    out.push("initial_condition values must be finite".into());
                }
            }
            InitialCondition::PlaneWave { k0, amplitude } => {
                if !(k0.is_finite() && amplitude.is_finite()) {
                    out.push("initial_condition values must be finite".into());
                }
            }
            InitialCondition::SechSoliton { eta, x0, width } => {
                if !(eta.is_finite() && x0.is_finite()) || *eta == 0.0 {
                    out.push("initial_condition.eta must be finite and nonzero".into());
                }
                match width {
                    Some(w) if !(*w > 0.0 && w.is_finite()) => {
                        out.push(format!("initial_condition.width must be > 0, got {w}"));
                    }
                    Some(_) => {}
                    None => {
                        let w = classical_width(*eta, p);
                        if !(w > 0.0 && w.is_finite()) {
                            out.push(
                                "initial_condition.width is required unless s > 3 and chi != 0 (classical NLS width)"
                                    .into(),
                            );
                        }
                    }
                }
            }
            InitialCondition::Zero => {}
        }

        let time_dependent = !matches!(self.scenario, ScenarioConfig::TravelingWave(_));
        match (&self.integrator, time_dependent) {
            (None, true) => out.push("integrator is required for continuum and lattice runs".into()),
            (Some(i), _) => {
                if !(i.dt > 0.0 && i.dt.is_finite()) {
                    out.push(format!("integrator.dt must be > 0, got {}", i.dt));
                } else {
                    if !(i.t_end > 0.0 && i.t_end.is_finite()) {
                        out.push(format!("integrator.t_end must be > 0, got {}", i.t_end));
                    } else if !multiple_of(i.t_end, i.dt) {
                        out.push("integrator.t_end must be a positive multiple of dt".into());
                    }
                    for (name, v) in [
                        ("snapshot_every", i.snapshot_every),
                        ("series_every", i.series_every),
                    ] {
                        if let Some(v) = v {
                            if !multiple_of(v, i.dt) {
                                out.push(format!("integrator.{name} must be a positive multiple of dt"));
                            }
                        }
                    }
                }
            }
            (None, false) => {}
        }
        if self.outputs.directory.is_empty() {
            out.push("outputs.directory must not be empty".into());
        }
        out
    }

    /// Writes every defaulted value out explicitly.
    pub fn resolve(mut self) -> Self {
        self.grid.length = Some(self.grid.length());
        if let ScenarioConfig::Continuum(c) = &mut self.scenario {
            c.dispersion_mode = Some(c.spec().dispersion_mode);
        }
        if let InitialCondition::SechSoliton { eta, width, .. } = &mut self.initial_condition {
            if width.is_none() {
                *width = Some(classical_width(*eta, &self.params));
            }
        }
        if let Some(i) = &mut self.integrator {
            i.snapshot_every = Some(i.snapshot_every.unwrap_or(i.t_end));
            i.series_every = Some(i.series_every.unwrap_or(i.dt));
        }
        self
    }

    pub fn spectral_grid(&self) -> crate::Result<Arc<SpectralGrid>> {
        SpectralGrid::shared(self.grid.length(), self.grid.points)
    }
}
