use thiserror::Error;

/// Errors raised by the model, lattice, continuum and traveling-wave solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("self-coupling is undefined: n = m = {0}")]
    SelfCoupling(i64),

    #[error("lattice sum diverges for s = {0} (requires s > 1)")]
    SumDivergence(f64),

    #[error("s = {s} is outside the domain of {what} ({domain})")]
    OutOfDomain {
        what: &'static str,
        s: f64,
        domain: &'static str,
    },

    #[error("{0} is singular at s = 3 (sin(pi) = 0, logarithmic regime applies)")]
    LogarithmicSingularity(&'static str),

    #[error("unsupported regime for s = {0} (asymptotics require s >= 2)")]
    UnsupportedRegime(f64),

    #[error("sonic singularity: |v| = {speed} equals the sound velocity {sound}")]
    SonicSingularity { speed: f64, sound: f64 },

    #[error("grid wavenumber {k_max} exceeds the lattice Brillouin zone |k| <= pi")]
    Aliasing { k_max: f64 },

    #[error("non-finite value in `{field}` at step {step} (t = {time})")]
    NumericalDivergence {
        field: &'static str,
        step: u64,
        time: f64,
    },

    #[error("time step {dt} exceeds the stability limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("scenario {kind} is incompatible with s = {s}: {rule}")]
    Incompatible {
        kind: &'static str,
        s: f64,
        rule: &'static str,
    },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("iteration collapsed onto the zero solution after {iterations} iterations")]
    TrivialAttractor { iterations: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
