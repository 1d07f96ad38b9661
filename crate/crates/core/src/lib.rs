//! Exciton-phonon dynamics on a chain with power-law exciton coupling.
//!
//! * [`model`]: coupling, lattice dispersion `J(k)`, gap `G(k)` and its asymptotics.
//! * [`spectral`]: periodic grid, transforms and Fourier multipliers.
//! * [`lattice`]: RK4 integration of the discrete exciton-phonon chain.
//! * [`continuum`]: split-step integration of the continuum exciton-strain models.
//! * [`traveling`]: traveling-wave profiles, slaved strain and their solvers.
//! * [`config`] and [`runner`]: JSON run configurations and the drivers behind the `exciton` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod continuum;
pub mod error;
pub mod lattice;
pub mod model;
pub mod quadrature;
pub mod runner;
pub mod special;
pub mod spectral;
pub mod traveling;

pub use error::{Error, Result};
pub use model::ModelParams;
