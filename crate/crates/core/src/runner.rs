//! Executes a [`RunConfig`] and writes its data products.
//!
//! A run directory holds `series.csv`, `snapshot_NNNNNN.csv` (step number)
//! and `manifest.json`; traveling-wave runs write `profile.csv` and
//! `profile.json` instead of the time-dependent products. CSV numbers use
//! 17 significant digits, so identical inputs give identical bytes.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{InitialCondition, RunConfig, ScenarioConfig};
use crate::continuum::{ContinuumSolver, ContinuumState, ScenarioKind, ScenarioSpec};
use crate::error::Error;
use crate::lattice::{LatticeOptions, LatticeState, LatticeSystem, LatticeTopology};
use crate::model::{dispersion_at_zero, ModelParams};
use crate::spectral::{Field, SpectralGrid};
use crate::traveling::{sigma_profile, solve_profile_with, TravelingWaveProblem};

/// Environment variable overriding the root of relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "EXCITON_OUTPUT_ROOT";

/// Root for relative output directories: `$EXCITON_OUTPUT_ROOT` or `.`.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Run directory of `config` under `root`.
pub fn output_dir(config: &RunConfig, root: &Path) -> PathBuf {
    let d = Path::new(&config.outputs.directory);
    if d.is_absolute() {
        d.to_path_buf()
    } else {
        root.join(d)
    }
}

/// Fixed 17-significant-digit rendering.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_line<W: Write>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let mut line = String::with_capacity(values.len() * 25);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&fmt_num(*v));
    }
    line.push('\n');
    w.write_all(line.as_bytes())
}

/// Writes `header` and `rows` to `path`.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    write_csv_to(BufWriter::new(fs::File::create(path)?), header, rows)
}

pub fn write_csv_to<W: Write>(mut w: W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        csv_line(&mut w, r)?;
    }
    w.flush()
}

fn write_json_atomic(path: &Path, value: &serde_json::Value) -> io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Setup(Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Success,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub step: u64,
    pub time: f64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub directory: PathBuf,
    pub status: RunStatus,
    pub steps_completed: u64,
    pub failure: Option<Failure>,
    pub warnings: Vec<String>,
}

impl RunReport {
    /// 0 on success, 3 on a divergence or solver failure.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Success => 0,
            RunStatus::Failed => 3,
        }
    }
}

fn unix_seconds() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

struct Manifest {
    path: PathBuf,
    config: serde_json::Value,
    derived: serde_json::Value,
    started: f64,
    clock: Instant,
}

impl Manifest {
    fn write(
        &self,
        status: &str,
        steps: u64,
        failure: Option<&Failure>,
        products: &[serde_json::Value],
    ) -> io::Result<()> {
        let finished = (status != "running").then(unix_seconds);
        write_json_atomic(
            &self.path,
            &json!({
                "version": env!("CARGO_PKG_VERSION"),
                "status": status,
                "config": self.config,
                "derived": self.derived,
                "steps_completed": steps,
                "failure": failure,
                "products": products,
                "wall_clock": {
                    "started_unix": self.started,
                    "finished_unix": finished,
                    "elapsed_seconds": self.clock.elapsed().as_secs_f64(),
                },
            }),
        )
    }
}

/// Runs `config` (already validated) into `dir`.
pub fn run(config: &RunConfig, dir: &Path) -> Result<RunReport, RunError> {
    fs::create_dir_all(dir)?;
    let grid = config.spectral_grid().map_err(RunError::Setup)?;
    let derived = derived_values(config).map_err(RunError::Setup)?;
    let manifest = Manifest {
        path: dir.join("manifest.json"),
        config: serde_json::to_value(config).map_err(io::Error::other)?,
        derived,
        started: unix_seconds(),
        clock: Instant::now(),
    };
    manifest.write("running", 0, None, &[])?;
    let outcome = match &config.scenario {
        ScenarioConfig::Continuum(c) => run_continuum(config, &c.spec(), grid, dir),
        ScenarioConfig::Lattice(l) => run_lattice(config, l.topology(), l.options(), grid, dir),
        ScenarioConfig::TravelingWave(_) => run_traveling(config, grid, dir),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(RunError::Setup(e)) => {
            let failure = Failure {
                step: 0,
                time: 0.0,
                message: e.to_string(),
            };
            manifest.write("failed", 0, Some(&failure), &[])?;
            return Err(RunError::Setup(e));
        }
        Err(e) => return Err(e),
    };
    let status = if outcome.failure.is_some() {
        RunStatus::Failed
    } else {
        RunStatus::Success
    };
    manifest.write(
        match status {
            RunStatus::Success => "success",
            RunStatus::Failed => "failed",
        },
        outcome.steps,
        outcome.failure.as_ref(),
        &outcome.products,
    )?;
    Ok(RunReport {
        directory: dir.to_path_buf(),
        status,
        steps_completed: outcome.steps,
        failure: outcome.failure,
        warnings: outcome.warnings,
    })
}

fn derived_values(config: &RunConfig) -> crate::Result<serde_json::Value> {
    let p = &config.params;
    let mut d = json!({ "sound_speed": p.sound_speed() });
    match &config.scenario {
        ScenarioConfig::Continuum(c) => {
            d["nonlinearity_g"] = json!(c.spec().nonlinearity(p));
        }
        ScenarioConfig::Lattice(_) => {
            d["dispersion_at_zero"] = json!(dispersion_at_zero(p)?);
        }
        ScenarioConfig::TravelingWave(t) => {
            d["gamma"] = json!(crate::traveling::gamma_coefficient(t.wave_speed, p)?);
        }
    }
    Ok(d)
}

#[derive(Default)]
struct Outcome {
    steps: u64,
    failure: Option<Failure>,
    products: Vec<serde_json::Value>,
    warnings: Vec<String>,
}

struct Schedule {
    steps: u64,
    series: Option<u64>,
    snapshots: Option<u64>,
}

impl Schedule {
    fn new(config: &RunConfig) -> Self {
        let i = config.integrator.as_ref().expect("validated time-dependent config");
        Self {
            steps: i.steps(),
            series: config.outputs.series.then(|| i.series_stride()),
            snapshots: config.outputs.snapshots.then(|| i.snapshot_stride()),
        }
    }

    fn dt(config: &RunConfig) -> f64 {
        config.integrator.as_ref().expect("validated").dt
    }
}

fn snapshot_name(step: u64) -> String {
    format!("snapshot_{step:06}.csv")
}

const CONTINUUM_SERIES: [&str; 5] = ["t", "norm", "hamiltonian", "momentum", "max_density"];
const CONTINUUM_SNAPSHOT: [&str; 5] = ["x", "re_psi", "im_psi", "sigma", "sigma_rate"];
const LATTICE_SERIES: [&str; 7] = [
    "t",
    "norm",
    "energy",
    "exciton_energy",
    "phonon_energy",
    "interaction_energy",
    "max_density",
];
const LATTICE_SNAPSHOT: [&str; 5] = ["x", "re_psi", "im_psi", "xi", "eta"];

/// Shared stepping loop; `dump` writes a snapshot, `record` returns a series row.
#[allow(clippy::too_many_arguments)]
fn drive<S, Step, Record, Dump>(
    schedule: &Schedule,
    dt: f64,
    mut state: S,
    dir: &Path,
    series_header: &[&str],
    step: Step,
    record: Record,
    dump: Dump,
) -> Result<Outcome, RunError>
where
    Step: Fn(&S) -> crate::Result<S>,
    Record: Fn(&S, f64) -> crate::Result<Vec<f64>>,
    Dump: Fn(&S, &Path) -> io::Result<()>,
{
    let mut out = Outcome::default();
    let mut series = match schedule.series {
        Some(_) => {
            let mut w = BufWriter::new(fs::File::create(dir.join("series.csv"))?);
            writeln!(w, "{}", series_header.join(","))?;
            out.products.push(json!({"file": "series.csv"}));
            Some(w)
        }
        None => None,
    };
    let mut emit = |state: &S, n: u64, out: &mut Outcome| -> Result<(), RunError> {
        let t = n as f64 * dt;
        if let (Some(w), Some(every)) = (series.as_mut(), schedule.series) {
            if n.is_multiple_of(every) || n == schedule.steps {
                let row = record(state, t).map_err(RunError::Setup)?;
                csv_line(w, &row)?;
            }
        }
        if let Some(every) = schedule.snapshots {
            if n.is_multiple_of(every) || n == schedule.steps {
                let name = snapshot_name(n);
                dump(state, &dir.join(&name))?;
                out.products.push(json!({"file": name, "step": n, "t": t}));
            }
        }
        Ok(())
    };
    emit(&state, 0, &mut out)?;
    for n in 1..=schedule.steps {
        match step(&state) {
            Ok(next) => state = next,
            Err(e) => {
                out.failure = Some(Failure {
                    step: n,
                    time: n as f64 * dt,
                    message: e.to_string(),
                });
                break;
            }
        }
        out.steps = n;
        emit(&state, n, &mut out)?;
    }
    if let Some(mut w) = series {
        w.flush()?;
    }
    Ok(out)
}

fn run_continuum(
    config: &RunConfig,
    spec: &ScenarioSpec,
    grid: Arc<SpectralGrid>,
    dir: &Path,
) -> Result<Outcome, RunError> {
    let dt = Schedule::dt(config);
    let solver = ContinuumSolver::new(config.params, *spec, grid.clone(), dt).map_err(RunError::Setup)?;
    let psi = config.initial_condition.field(&grid, &config.params);
    let state = ContinuumState::from_psi(psi);
    let positions = grid.positions();
    drive(
        &Schedule::new(config),
        dt,
        state,
        dir,
        &CONTINUUM_SERIES,
        |s| solver.step(s),
        |s, t| {
            let o = solver.observables(s)?;
            Ok(vec![t, o.norm, o.hamiltonian, o.momentum, o.max_density])
        },
        |s, path| {
            let rows: Vec<Vec<f64>> = positions
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let p = s.psi.values()[j];
                    vec![x, p.re, p.im, s.sigma.values()[j].re, s.sigma_rate.values()[j].re]
                })
                .collect();
            write_csv(path, &CONTINUUM_SNAPSHOT, &rows)
        },
    )
}

fn run_lattice(
    config: &RunConfig,
    topology: LatticeTopology,
    options: LatticeOptions,
    grid: Arc<SpectralGrid>,
    dir: &Path,
) -> Result<Outcome, RunError> {
    let dt = Schedule::dt(config);
    let sites = config.grid.points;
    let system = LatticeSystem::new(config.params, topology, sites, options).map_err(RunError::Setup)?;
    let positions = grid.positions();
    let psi: Vec<Complex64> = positions
        .iter()
        .map(|&x| config.initial_condition.value(x, &config.params))
        .collect();
    let state = LatticeState::from_psi(psi).map_err(RunError::Setup)?;
    drive(
        &Schedule::new(config),
        dt,
        state,
        dir,
        &LATTICE_SERIES,
        |s| system.step_rk4(s, dt),
        |s, t| {
            let e = system.energies(s)?;
            Ok(vec![t, s.norm(), e.total(), e.exciton, e.phonon, e.interaction, s.max_density()])
        },
        |s, path| {
            let rows: Vec<Vec<f64>> = positions
                .iter()
                .enumerate()
                .map(|(n, &x)| vec![x, s.psi[n].re, s.psi[n].im, s.xi[n], s.eta[n]])
                .collect();
            write_csv(path, &LATTICE_SNAPSHOT, &rows)
        },
    )
}

/// Initial guess of a traveling-wave run, perturbed by seeded noise.
pub fn traveling_guess(config: &RunConfig, grid: &Arc<SpectralGrid>, noise: f64) -> Field {
    let mut guess = config.initial_condition.field(grid, &config.params);
    if noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let scale = noise * guess.values().iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for v in guess.values_mut() {
            *v += Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
        }
    }
    guess
}

fn run_traveling(config: &RunConfig, grid: Arc<SpectralGrid>, dir: &Path) -> Result<Outcome, RunError> {
    let ScenarioConfig::TravelingWave(t) = &config.scenario else {
        unreachable!()
    };
    let p = &config.params;
    let problem =
        TravelingWaveProblem::new(*p, t.wave_speed, grid.clone(), t.dispersion).map_err(RunError::Setup)?;
    let guess = traveling_guess(config, &grid, t.guess_noise);
    let mut out = Outcome::default();
    let sol = match solve_profile_with(&problem, &guess, t.frequency_shift, &t.solver) {
        Ok(s) => s,
        Err(e) => {
            let (iterations, residual) = match e {
                Error::NoConvergence {
                    iterations,
                    residual,
                } => (iterations, residual),
                Error::TrivialAttractor { iterations } => (iterations, f64::NAN),
                _ => return Err(RunError::Setup(e)),
            };
            out.steps = iterations as u64;
            out.failure = Some(Failure {
                step: iterations as u64,
                time: 0.0,
                message: format!("{e} (residual {residual:e})"),
            });
            return Ok(out);
        }
    };
    if sol.edge_ratio > 1e-10 {
        out.warnings.push(format!(
            "profile has not decayed at the domain edge (edge/peak = {:e}); enlarge grid.length",
            sol.edge_ratio
        ));
    }
    let sigma = sigma_profile(&sol.profile, t.wave_speed, p).map_err(RunError::Setup)?;
    let rows: Vec<Vec<f64>> = grid
        .positions()
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let v = sol.profile.values()[j];
            vec![x, v.re, v.im, sigma.values()[j].re]
        })
        .collect();
    write_csv(&dir.join("profile.csv"), &["zeta", "re_phi", "im_phi", "sigma"], &rows)?;
    write_json_atomic(
        &dir.join("profile.json"),
        &json!({
            "wave_speed": t.wave_speed,
            "gamma": problem.gamma,
            "s": p.exponent_s,
            "dispersion": t.dispersion,
            "frequency_shift": sol.frequency_shift,
            "residual": sol.residual,
            "iterations": sol.iterations,
            "method": sol.method,
            "edge_ratio": sol.edge_ratio,
        }),
    )?;
    out.steps = sol.iterations as u64;
    out.products.push(json!({"file": "profile.csv"}));
    out.products.push(json!({"file": "profile.json"}));
    Ok(out)
}

/// One row of a `(k, G, asymptote)` table.
pub fn dispersion_table(params: &ModelParams, k_max: f64, n: usize) -> crate::Result<Vec<Vec<f64>>> {
    params.validate()?;
    if !(k_max > 0.0 && k_max.is_finite()) || n == 0 {
        return Err(Error::InvalidArgument("need k_max > 0 and n >= 1".into()));
    }
    (1..=n)
        .map(|i| {
            let k = k_max * i as f64 / n as f64;
            let g = crate::model::spectral_gap(k, params, crate::model::DEFAULT_SUM_TOL)?;
            let a = crate::model::asymptotic_gap(k, params).unwrap_or(f64::NAN);
            Ok(vec![k, g, a])
        })
        .collect()
}

/// Lattice-versus-continuum comparison of one Gaussian packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareOptions {
    pub params: ModelParams,
    /// Ring size `L`; the continuum grid has `M = L` points at unit spacing.
    pub sites: usize,
    pub width: f64,
    pub k0: f64,
    /// Total norm `sum |psi_n|^2` of the packet.
    pub norm: f64,
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: f64,
    /// Strain source prefactor used on both sides.
    pub source_factor: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            params: ModelParams {
                coupling_chi: 0.5,
                ..ModelParams::default()
            },
            sites: 1024,
            width: 50.0,
            k0: 0.0,
            norm: 1.0,
            dt: 0.02,
            t_end: 10.0,
            sample_every: 0.5,
            source_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareRow {
    pub t: f64,
    /// `min_theta |psi_lat - e^{i theta} psi_cont| / |psi_lat|`
    pub distance: f64,
    pub norm_lattice: f64,
    pub norm_continuum: f64,
}

/// Phase-aligned relative L2 distance `min_theta |a - e^{i theta} b| / |a|`.
pub fn aligned_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = b.iter().zip(a).map(|(y, x)| y.conj() * x).sum();
    let rot = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y * rot).norm_sqr()).sum();
    let den: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Evolves the same packet on the ring (site energy `J(0)`) and in the
/// general nonlocal continuum model with the exact gap, sampling their
/// distance every `sample_every`.
pub fn compare(options: &CompareOptions) -> crate::Result<Vec<CompareRow>> {
    let o = options;
    if !(o.dt > 0.0 && o.t_end > 0.0 && o.sample_every > 0.0 && o.width > 0.0 && o.norm > 0.0) {
        return Err(Error::InvalidArgument(
            "dt, t_end, sample_every, width and norm must be > 0".into(),
        ));
    }
    let mut params = o.params;
    params.site_energy = dispersion_at_zero(&params)?;
    let l = o.sites;
    let lattice = LatticeSystem::new(
        params,
        LatticeTopology::default(),
        l,
        LatticeOptions {
            source_factor: o.source_factor,
            ..LatticeOptions::default()
        },
    )?;
    let grid = SpectralGrid::shared(l as f64, l)?;
    let mut spec = ScenarioSpec::new(ScenarioKind::GeneralNonlocal);
    spec.source_factor = o.source_factor;
    spec.lambda_shift = 0.0;
    let continuum = ContinuumSolver::new(params, spec, grid.clone(), o.dt)?;

    let ic = InitialCondition::GaussianPacket {
        x0: 0.0,
        width: o.width,
        k0: o.k0,
        amplitude: 1.0,
    };
    let mut psi: Vec<Complex64> = grid.positions().iter().map(|&x| ic.value(x, &params)).collect();
    let scale = (o.norm / crate::lattice::norm(&psi)).sqrt();
    psi.iter_mut().for_each(|z| *z *= scale);

    let mut lat = LatticeState::from_psi(psi.clone())?;
    let mut cont = ContinuumState::from_psi(Field::new(grid.clone(), psi)?);
    let steps = (o.t_end / o.dt).round() as u64;
    let every = ((o.sample_every / o.dt).round() as u64).max(1);
    let row = |lat: &LatticeState, cont: &ContinuumState, n: u64| CompareRow {
        t: n as f64 * o.dt,
        distance: aligned_distance(&lat.psi, cont.psi.values()),
        norm_lattice: lat.norm(),
        norm_continuum: crate::lattice::norm(cont.psi.values()),
    };
    let mut rows = vec![row(&lat, &cont, 0)];
    for n in 1..=steps {
        lat = lattice.step_rk4(&lat, o.dt)?;
        cont = continuum.step(&cont)?;
        if n % every == 0 || n == steps {
            rows.push(row(&lat, &cont, n));
        }
    }
    Ok(rows)
}

/// Outcome of one invariant check.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, value: f64, limit: f64) -> InvariantCheck {
    InvariantCheck {
        name: name.into(),
        passed: value <= limit,
        detail: format!("{value:e} (limit {limit:e})"),
    }
}

/// Runs the invariant suite on a validated configuration: at most
/// `max_steps` steps of the configured dynamics, or one profile solve.
pub fn validate_invariants(config: &RunConfig, max_steps: u64) -> crate::Result<Vec<InvariantCheck>> {
    let grid = config.spectral_grid()?;
    let p = &config.params;
    let mut checks = Vec::new();

    // dispersion symbol checks shared by every scenario
    if p.exponent_s > 1.0 {
        let ks = [0.01, 0.3, 1.7, 3.0];
        let mut asym = 0.0f64;
        let mut neg = 0.0f64;
        for k in ks {
            let a = crate::model::spectral_gap(k, p, crate::model::DEFAULT_SUM_TOL)?;
            let b = crate::model::spectral_gap(-k, p, crate::model::DEFAULT_SUM_TOL)?;
            asym = asym.max((a - b).abs());
            neg = neg.max(-a);
        }
        checks.push(check("gap is even", asym, 1e-12));
        checks.push(check("gap is non-negative", neg.max(0.0), 0.0));
    }

    match &config.scenario {
        ScenarioConfig::Continuum(c) => {
            let dt = Schedule::dt(config);
            let steps = config.integrator.as_ref().map(|i| i.steps()).unwrap_or(0).min(max_steps);
            let solver = ContinuumSolver::new(*p, c.spec(), grid.clone(), dt)?;
            let s0 = ContinuumState::from_psi(config.initial_condition.field(&grid, p));
            let o0 = solver.observables(&s0)?;
            let s1 = solver.advance(&s0, steps as usize)?;
            let o1 = solver.observables(&s1)?;
            let rel = |a: f64, b: f64| if a == 0.0 { (b - a).abs() } else { ((b - a) / a).abs() };
            checks.push(check("norm drift", rel(o0.norm, o1.norm), 1e-10));
            checks.push(check(
                "strain stays real",
                s1.sigma.max_abs_imag().max(s1.sigma_rate.max_abs_imag()),
                1e-10,
            ));
            let mut shifted = c.spec();
            shifted.lambda_shift += 0.37;
            let other = ContinuumSolver::new(*p, shifted, grid.clone(), dt)?.advance(&s0, steps as usize)?;
            let rot = Complex64::from_polar(1.0, 0.37 * s1.time / p.hbar);
            let gauge = s1
                .psi
                .values()
                .iter()
                .zip(other.psi.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b * rot).norm()));
            checks.push(check("gauge shift is a global phase", gauge, 1e-10));
        }
        ScenarioConfig::Lattice(l) => {
            let dt = Schedule::dt(config);
            let steps = config.integrator.as_ref().map(|i| i.steps()).unwrap_or(0).min(max_steps);
            let system = LatticeSystem::new(*p, l.topology(), config.grid.points, l.options())?;
            let psi = grid.positions().iter().map(|&x| config.initial_condition.value(x, p)).collect();
            let mut s = LatticeState::from_psi(psi)?;
            let (n0, e0) = (s.norm(), system.total_energy(&s)?);
            for _ in 0..steps {
                s = system.step_rk4(&s, dt)?;
            }
            let (n1, e1) = (s.norm(), system.total_energy(&s)?);
            let scale = if n0 == 0.0 { 1.0 } else { n0 };
            checks.push(check("norm drift", (n1 - n0).abs() / scale, 1e-8));
            if l.stencil == crate::lattice::SourceStencil::Backward {
                let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
                checks.push(check("energy drift", (e1 - e0).abs() / scale, 1e-6));
            }
        }
        ScenarioConfig::TravelingWave(t) => {
            let problem = TravelingWaveProblem::new(*p, t.wave_speed, grid.clone(), t.dispersion)?;
            let guess = traveling_guess(config, &grid, t.guess_noise);
            let sol = solve_profile_with(&problem, &guess, t.frequency_shift, &t.solver)?;
            checks.push(check("profile residual", sol.residual, t.solver.tolerance));
            let rot = Complex64::from_polar(1.0, 0.9);
            let turned = Field::new(grid.clone(), sol.profile.values().iter().map(|z| z * rot).collect())?;
            let r0 = crate::traveling::fgl_residual_shifted(&sol.profile, &problem, t.frequency_shift);
            let r1 = crate::traveling::fgl_residual_shifted(&turned, &problem, t.frequency_shift);
            let diff = r0
                .values()
                .iter()
                .zip(r1.values())
                .fold(0.0f64, |m, (a, b)| m.max((a * rot - b).norm()));
            checks.push(check("residual is phase invariant", diff, 1e-12));
        }
    }
    Ok(checks)
}

/// One `--set key=v1,v2,...` axis of a sweep; `key` is a dotted path into
/// the configuration document.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<serde_json::Value>,
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(arg: &str) -> Result<Self, String> {
        let (key, list) = arg
            .split_once('=')
            .ok_or_else(|| format!("expected key=v1,v2,..., got `{arg}`"))?;
        if key.is_empty() || list.is_empty() {
            return Err(format!("expected key=v1,v2,..., got `{arg}`"));
        }
        let values = list
            .split(',')
            .map(|v| serde_json::from_str(v).unwrap_or_else(|_| serde_json::Value::String(v.to_string())))
            .collect();
        Ok(Self {
            key: key.to_string(),
            values,
        })
    }
}

fn set_path(doc: &mut serde_json::Value, key: &str, value: serde_json::Value) {
    let mut node = doc;
    for part in key.split('.') {
        if !node.is_object() {
            *node = json!({});
        }
        node = node
            .as_object_mut()
            .expect("object")
            .entry(part.to_string())
            .or_insert(serde_json::Value::Null);
    }
    *node = value;
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub directory: String,
    pub values: serde_json::Map<String, serde_json::Value>,
    /// `success`, `failed` or `invalid`.
    pub status: String,
    pub exit_code: i32,
    pub message: Option<String>,
}

/// Runs the Cartesian product of `axes` over `base`, each point in
/// `dir/point_NNNN`, in parallel, and writes `dir/index.json`.
pub fn sweep(base: &serde_json::Value, axes: &[SweepAxis], dir: &Path) -> io::Result<Vec<SweepPoint>> {
    use rayon::prelude::*;

    fs::create_dir_all(dir)?;
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let points: Vec<SweepPoint> = (0..total)
        .into_par_iter()
        .map(|index| {
            let mut doc = base.clone();
            let mut values = serde_json::Map::new();
            let mut rest = index;
            for axis in axes.iter().rev() {
                let v = axis.values[rest % axis.values.len()].clone();
                rest /= axis.values.len();
                set_path(&mut doc, &axis.key, v.clone());
                values.insert(axis.key.clone(), v);
            }
            let name = format!("point_{index:04}");
            let point_dir = dir.join(&name);
            set_path(
                &mut doc,
                "outputs.directory",
                json!(point_dir.to_string_lossy()),
            );
            let (status, exit_code, message) =
                match crate::config::parse_config(&doc.to_string()) {
                    Err(e) => ("invalid", 2, Some(e.to_string())),
                    Ok(config) => match run(&config, &point_dir) {
                        Ok(r) if r.status == RunStatus::Success => ("success", 0, None),
                        Ok(r) => ("failed", 3, r.failure.map(|f| f.message)),
                        Err(RunError::Setup(e)) => ("invalid", 2, Some(e.to_string())),
                        Err(e) => ("failed", 1, Some(e.to_string())),
                    },
                };
            SweepPoint {
                index,
                directory: name,
                values,
                status: status.into(),
                exit_code,
                message,
            }
        })
        .collect();
    write_json_atomic(
        &dir.join("index.json"),
        &json!({
            "axes": axes.iter().map(|a| json!({"key": a.key, "values": a.values})).collect::<Vec<_>>(),
            "points": points,
        }),
    )?;
    Ok(points)
}
