//! C ABI for the exciton solvers.
//!
//! Every function returns an [`XphStatus`]; on failure the message is kept
//! per thread and can be read with [`xph_last_error_message`]. Handles are
//! opaque and must be released with the matching `*_free` function.
//! Complex arrays are interleaved `re, im` pairs ([`XphComplex`]).

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use exciton_core::continuum::{ContinuumSolver, ContinuumState, ScenarioKind, ScenarioSpec};
use exciton_core::lattice::{
    Boundary, LatticeOptions, LatticeState, LatticeSystem, LatticeTopology, SourceStencil,
};
use exciton_core::model::{self, ModelParams, DEFAULT_SUM_TOL};
use exciton_core::spectral::{Field, SpectralGrid};
use exciton_core::traveling::{self, ProfileDispersion, SolverOptions, TravelingWaveProblem};
use exciton_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XphStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Exponent outside the domain of the requested quantity or scenario.
    OutOfDomain = 3,
    SonicSingularity = 4,
    Aliasing = 5,
    StepTooLarge = 6,
    /// A non-finite value appeared during time stepping.
    Divergence = 7,
    NoConvergence = 8,
    TrivialAttractor = 9,
    /// Configuration document failed to parse or validate.
    InvalidConfig = 10,
    Io = 11,
    Panic = 12,
}

/// Model constants; mirrors `ModelParams`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XphParams {
    pub hbar: f64,
    pub mass: f64,
    pub elasticity: f64,
    pub coupling_chi: f64,
    pub site_energy: f64,
    pub interaction_j: f64,
    pub exponent_s: f64,
}

impl From<XphParams> for ModelParams {
    fn from(p: XphParams) -> Self {
        Self {
            hbar: p.hbar,
            mass: p.mass,
            elasticity: p.elasticity,
            coupling_chi: p.coupling_chi,
            site_energy: p.site_energy,
            interaction_j: p.interaction_j,
            exponent_s: p.exponent_s,
        }
    }
}

impl From<ModelParams> for XphParams {
    fn from(p: ModelParams) -> Self {
        Self {
            hbar: p.hbar,
            mass: p.mass,
            elasticity: p.elasticity,
            coupling_chi: p.coupling_chi,
            site_energy: p.site_energy,
            interaction_j: p.interaction_j,
            exponent_s: p.exponent_s,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XphComplex {
    pub re: f64,
    pub im: f64,
}

pub const XPH_KIND_GENERAL_NONLOCAL: u32 = 0;
pub const XPH_KIND_FRACTIONAL_ZAKHAROV: u32 = 1;
pub const XPH_KIND_HILBERT_ZAKHAROV: u32 = 2;
pub const XPH_KIND_NLFSE: u32 = 3;
pub const XPH_KIND_HILBERT_NLS: u32 = 4;
pub const XPH_KIND_CLASSICAL_NLS: u32 = 5;

pub const XPH_STENCIL_FORWARD: u32 = 0;
pub const XPH_STENCIL_BACKWARD: u32 = 1;
pub const XPH_STENCIL_SYMMETRIC: u32 = 2;

pub const XPH_DISPERSION_FRACTIONAL: u32 = 0;
pub const XPH_DISPERSION_HILBERT: u32 = 1;
pub const XPH_DISPERSION_QUADRATIC: u32 = 2;
pub const XPH_DISPERSION_EXACT_GAP: u32 = 3;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> XphStatus {
    match e {
        Error::SelfCoupling(_) | Error::InvalidArgument(_) => XphStatus::InvalidArgument,
        Error::SumDivergence(_)
        | Error::OutOfDomain { .. }
        | Error::LogarithmicSingularity(_)
        | Error::UnsupportedRegime(_)
        | Error::Incompatible { .. } => XphStatus::OutOfDomain,
        Error::SonicSingularity { .. } => XphStatus::SonicSingularity,
        Error::Aliasing { .. } => XphStatus::Aliasing,
        Error::NumericalDivergence { .. } => XphStatus::Divergence,
        Error::StepTooLarge { .. } => XphStatus::StepTooLarge,
        Error::NoConvergence { .. } => XphStatus::NoConvergence,
        Error::TrivialAttractor { .. } => XphStatus::TrivialAttractor,
    }
}

struct Fail(XphStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(XphStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(XphStatus::InvalidArgument, msg.into())
}

/// Runs `f`, recording failures and converting panics.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> XphStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            XphStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            XphStatus::Panic
        }
    }
}

unsafe fn read<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, what: &str, value: T) -> Result<(), Fail> {
    let slot = p.as_mut().ok_or_else(|| null(what))?;
    *slot = value;
    Ok(())
}

unsafe fn complex_in(p: *const XphComplex, n: usize) -> Result<Vec<Complex64>, Fail> {
    if p.is_null() {
        return Err(null("input array"));
    }
    Ok(std::slice::from_raw_parts(p, n)
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect())
}

unsafe fn complex_out(p: *mut XphComplex, n: usize, values: &[Complex64]) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null("output array"));
    }
    if n != values.len() {
        return Err(invalid(format!("output length {n} != {}", values.len())));
    }
    let out = std::slice::from_raw_parts_mut(p, n);
    for (o, v) in out.iter_mut().zip(values) {
        *o = XphComplex { re: v.re, im: v.im };
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xph_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message (NUL-terminated, truncated
/// to `len`) into `buf` and returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn xph_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Default constants (`hbar = m = w = J = 1`, `chi = eps = 0`, `s = 2.5`).
///
/// # Safety
/// `out` must be null or point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn xph_params_default(out: *mut XphParams) -> XphStatus {
    guard(|| write(out, "out", ModelParams::default().into()))
}

/// Exact spectral gap `G(k) = J(0) - J(k)`.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xph_spectral_gap(params: *const XphParams, k: f64, out: *mut f64) -> XphStatus {
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        write(out, "out", model::spectral_gap(k, &p, DEFAULT_SUM_TOL)?)
    })
}

/// Lattice dispersion `J(k)`.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xph_lattice_dispersion(params: *const XphParams, k: f64, out: *mut f64) -> XphStatus {
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        write(out, "out", model::lattice_dispersion(k, &p, DEFAULT_SUM_TOL)?)
    })
}

/// Leading small-`k` asymptote of `G(k)`.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xph_asymptotic_gap(params: *const XphParams, k: f64, out: *mut f64) -> XphStatus {
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        write(out, "out", model::asymptotic_gap(k, &p)?)
    })
}

/// Traveling-wave nonlinearity `gamma(v)`.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xph_gamma_coefficient(params: *const XphParams, wave_speed: f64, out: *mut f64) -> XphStatus {
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        write(out, "out", traveling::gamma_coefficient(wave_speed, &p)?)
    })
}

/// `D_s` of the fractional regime.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xph_fractional_coefficient(params: *const XphParams, out: *mut f64) -> XphStatus {
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        write(out, "out", model::fractional_coefficient(&p)?)
    })
}

/// Cubic coefficient `g`: `2 chi^2 / w`, or `2 chi / w` when `literal`.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xph_effective_nonlinearity(
    params: *const XphParams,
    literal: bool,
    out: *mut f64,
) -> XphStatus {
    use exciton_core::continuum::{effective_nonlinearity, Coefficients};
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        let c = if literal {
            Coefficients::Literal
        } else {
            Coefficients::Corrected
        };
        write(out, "out", effective_nonlinearity(&p, c))
    })
}

/// Opaque lattice simulation.
pub struct XphLattice {
    system: LatticeSystem,
    state: LatticeState,
}

/// Creates a chain of `sites` at rest with zero amplitudes.
/// `cutoff = 0` couples all pairs. `stencil` is one of `XPH_STENCIL_*`.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xph_lattice_new(
    params: *const XphParams,
    sites: usize,
    periodic: bool,
    cutoff: usize,
    stencil: u32,
    source_factor: f64,
    out: *mut *mut XphLattice,
) -> XphStatus {
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        if out.is_null() {
            return Err(null("out"));
        }
        let stencil = match stencil {
            XPH_STENCIL_FORWARD => SourceStencil::Forward,
            XPH_STENCIL_BACKWARD => SourceStencil::Backward,
            XPH_STENCIL_SYMMETRIC => SourceStencil::Symmetric,
            s => return Err(invalid(format!("unknown stencil {s}"))),
        };
        let topology = LatticeTopology {
            boundary: if periodic {
                Boundary::Periodic
            } else {
                Boundary::Open
            },
            interaction_cutoff: (cutoff > 0).then_some(cutoff),
        };
        let options = LatticeOptions {
            stencil,
            source_factor,
            ..LatticeOptions::default()
        };
        let system = LatticeSystem::new(p, topology, sites, options)?;
        let state = LatticeState::zeros(sites)?;
        *out = Box::into_raw(Box::new(XphLattice { system, state }));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`xph_lattice_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xph_lattice_free(handle: *mut XphLattice) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Replaces the amplitudes (length `sites`) and resets phonons and time.
///
/// # Safety
/// `handle` must be valid; `psi` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn xph_lattice_set_psi(handle: *mut XphLattice, psi: *const XphComplex, n: usize) -> XphStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        if n != h.system.sites() {
            return Err(invalid(format!("expected {} amplitudes, got {n}", h.system.sites())));
        }
        h.state = LatticeState::from_psi(complex_in(psi, n)?)?;
        Ok(())
    })
}

/// Copies the amplitudes into `out` (length `n = sites`).
///
/// # Safety
/// `handle` must be valid; `out` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn xph_lattice_get_psi(handle: *const XphLattice, out: *mut XphComplex, n: usize) -> XphStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        complex_out(out, n, &h.state.psi)
    })
}

/// Takes `steps` RK4 steps of size `dt`. On divergence the state before the
/// failing step is kept.
///
/// # Safety
/// `handle` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xph_lattice_step(handle: *mut XphLattice, dt: f64, steps: u64) -> XphStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        for _ in 0..steps {
            h.state = h.system.step_rk4(&h.state, dt)?;
        }
        Ok(())
    })
}

/// Norm, total energy and time of the current state; any pointer may be null.
///
/// # Safety
/// `handle` must be valid; outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn xph_lattice_observables(
    handle: *const XphLattice,
    norm: *mut f64,
    energy: *mut f64,
    time: *mut f64,
) -> XphStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if !norm.is_null() {
            *norm = h.state.norm();
        }
        if !energy.is_null() {
            *energy = h.system.total_energy(&h.state)?;
        }
        if !time.is_null() {
            *time = h.state.time;
        }
        Ok(())
    })
}

/// Opaque continuum simulation.
pub struct XphContinuum {
    solver: ContinuumSolver,
    state: ContinuumState,
}

fn scenario_kind(kind: u32) -> Result<ScenarioKind, Fail> {
    Ok(match kind {
        XPH_KIND_GENERAL_NONLOCAL => ScenarioKind::GeneralNonlocal,
        XPH_KIND_FRACTIONAL_ZAKHAROV => ScenarioKind::FractionalZakharov,
        XPH_KIND_HILBERT_ZAKHAROV => ScenarioKind::HilbertZakharov,
        XPH_KIND_NLFSE => ScenarioKind::Nlfse,
        XPH_KIND_HILBERT_NLS => ScenarioKind::HilbertNls,
        XPH_KIND_CLASSICAL_NLS => ScenarioKind::ClassicalNls,
        k => return Err(invalid(format!("unknown scenario kind {k}"))),
    })
}

/// Creates a split-step solver for `kind` (one of `XPH_KIND_*`) with the
/// default scenario settings on a periodic grid.
///
/// # Safety
/// `params` and `out` must be null or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xph_continuum_new(
    params: *const XphParams,
    kind: u32,
    length: f64,
    points: usize,
    dt: f64,
    out: *mut *mut XphContinuum,
) -> XphStatus {
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = SpectralGrid::shared(length, points)?;
        let solver = ContinuumSolver::new(p, ScenarioSpec::new(scenario_kind(kind)?), grid.clone(), dt)?;
        let state = ContinuumState::from_psi(Field::zeros(grid));
        *out = Box::into_raw(Box::new(XphContinuum { solver, state }));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`xph_continuum_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xph_continuum_free(handle: *mut XphContinuum) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Replaces `psi` (length `points`) and resets the strain and time.
///
/// # Safety
/// `handle` must be valid; `psi` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn xph_continuum_set_psi(
    handle: *mut XphContinuum,
    psi: *const XphComplex,
    n: usize,
) -> XphStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        let field = Field::new(h.solver.grid().clone(), complex_in(psi, n)?)?;
        h.state = ContinuumState::from_psi(field);
        Ok(())
    })
}

/// # Safety
/// `handle` must be valid; `out` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn xph_continuum_get_psi(
    handle: *const XphContinuum,
    out: *mut XphComplex,
    n: usize,
) -> XphStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        complex_out(out, n, h.state.psi.values())
    })
}

/// # Safety
/// `handle` must be valid.
#[no_mangle]
pub unsafe extern "C" fn xph_continuum_step(handle: *mut XphContinuum, steps: u64) -> XphStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        for _ in 0..steps {
            h.state = h.solver.step(&h.state)?;
        }
        Ok(())
    })
}

/// Norm, conserved functional and time; any pointer may be null.
///
/// # Safety
/// `handle` must be valid; outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn xph_continuum_observables(
    handle: *const XphContinuum,
    norm: *mut f64,
    hamiltonian: *mut f64,
    time: *mut f64,
) -> XphStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let o = h.solver.observables(&h.state)?;
        if !norm.is_null() {
            *norm = o.norm;
        }
        if !hamiltonian.is_null() {
            *hamiltonian = o.hamiltonian;
        }
        if !time.is_null() {
            *time = h.state.time;
        }
        Ok(())
    })
}

/// Solves the traveling-wave profile equation on a periodic grid of
/// `points` samples over `length`, starting from `guess` and writing the
/// profile to `out`; `residual` (may be null) receives the max-norm residual.
/// `dispersion` is one of `XPH_DISPERSION_*`.
///
/// # Safety
/// Pointers must be valid; `guess` and `out` must hold `points` elements.
#[no_mangle]
pub unsafe extern "C" fn xph_solve_profile(
    params: *const XphParams,
    wave_speed: f64,
    dispersion: u32,
    length: f64,
    points: usize,
    frequency_shift: f64,
    guess: *const XphComplex,
    out: *mut XphComplex,
    residual: *mut f64,
) -> XphStatus {
    guard(|| {
        let p: ModelParams = (*read(params, "params")?).into();
        let dispersion = match dispersion {
            XPH_DISPERSION_FRACTIONAL => ProfileDispersion::Fractional,
            XPH_DISPERSION_HILBERT => ProfileDispersion::Hilbert,
            XPH_DISPERSION_QUADRATIC => ProfileDispersion::Quadratic,
            XPH_DISPERSION_EXACT_GAP => ProfileDispersion::ExactGap,
            d => return Err(invalid(format!("unknown dispersion {d}"))),
        };
        let grid: Arc<SpectralGrid> = SpectralGrid::shared(length, points)?;
        let problem = TravelingWaveProblem::new(p, wave_speed, grid.clone(), dispersion)?;
        let guess = Field::new(grid, complex_in(guess, points)?)?;
        let sol = traveling::solve_profile_with(&problem, &guess, frequency_shift, &SolverOptions::default())?;
        complex_out(out, points, sol.profile.values())?;
        if !residual.is_null() {
            *residual = sol.residual;
        }
        Ok(())
    })
}

/// Parses, validates and runs a JSON configuration into `directory`
/// (`outputs.directory` under the output root when null). `exit_code`
/// (may be null) receives the CLI exit code of the run.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `directory` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn xph_run_config_json(
    config_json: *const c_char,
    directory: *const c_char,
    exit_code: *mut i32,
) -> XphStatus {
    use exciton_core::config::parse_config;
    use exciton_core::runner::{output_dir, output_root, run, RunError};
    guard(|| {
        if config_json.is_null() {
            return Err(null("config_json"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|_| invalid("config_json is not UTF-8"))?;
        let set_code = |c: i32| {
            if !exit_code.is_null() {
                *exit_code = c;
            }
        };
        let config = parse_config(text).map_err(|e| {
            set_code(2);
            Fail(XphStatus::InvalidConfig, e.to_string())
        })?;
        let dir = if directory.is_null() {
            output_dir(&config, &output_root())
        } else {
            let d = CStr::from_ptr(directory)
                .to_str()
                .map_err(|_| invalid("directory is not UTF-8"))?;
            Path::new(d).to_path_buf()
        };
        match run(&config, &dir) {
            Ok(report) => {
                set_code(report.exit_code());
                match report.failure {
                    Some(f) => Err(Fail(XphStatus::Divergence, f.message)),
                    None => Ok(()),
                }
            }
            Err(RunError::Setup(e)) => {
                set_code(2);
                Err(e.into())
            }
            Err(e) => {
                set_code(1);
                Err(Fail(XphStatus::Io, e.to_string()))
            }
        }
    })
}
