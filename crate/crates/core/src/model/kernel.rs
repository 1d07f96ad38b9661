//! Real-space kernel `K(x) = (1/pi) int dk e^{ikx} G(k)/k^2`, diagnostics only.
//!
//! `G(k)/k^2` carries the non-analytic piece of the polylogarithm expansion,
//! `D k^{s-3}` with the generalised coefficient below or `-J ln k` at `s = 3`.
//! That piece is integrated on its own (a power-law substitution, or the sine
//! integral for the logarithm) and the smooth remainder is integrated by
//! Simpson on the grid wavenumbers.

use std::f64::consts::PI;

use super::{spectral_gap, ModelParams, DEFAULT_SUM_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, simpson};
use crate::spectral::SpectralGrid;
use crate::special::{gamma, zeta};

enum Singular {
    None,
    /// `c k^{s-3}`
    Power(f64),
    /// `c ln k`
    Log(f64),
}

fn is_odd_integer(s: f64) -> bool {
    s.fract() == 0.0 && (s as i64) % 2 == 1
}

fn singular_part(params: &ModelParams) -> Singular {
    let s = params.exponent_s;
    let j = params.interaction_j;
    if s == 3.0 {
        Singular::Log(-j)
    } else if is_odd_integer(s) {
        // k^{s-3} ln k is already smooth enough for Simpson.
        Singular::None
    } else {
        Singular::Power(PI * j / (gamma(s) * (PI * (s - 1.0) / 2.0).sin()))
    }
}

/// Limit of the remainder `G(k)/k^2 - singular` at `k = 0`.
fn remainder_at_zero(params: &ModelParams) -> f64 {
    let s = params.exponent_s;
    let j = params.interaction_j;
    if s == 3.0 {
        1.5 * j
    } else {
        j * zeta(s - 2.0)
    }
}

/// `int_0^kmax cos(kx) k^{a-1} dk` through `k = kmax t^{1/a}`.
fn power_integral(a: f64, kmax: f64, x: f64) -> f64 {
    let panels = 8 + (kmax * x.abs() / 2.0).ceil() as usize * 2;
    let inv_a = 1.0 / a;
    kmax.powf(a) / a * gauss_legendre(|t| (kmax * t.powf(inv_a) * x).cos(), 0.0, 1.0, panels)
}

fn sine_integral(z: f64) -> f64 {
    let panels = 4 + (z.abs() / 2.0).ceil() as usize;
    gauss_legendre(
        |t| if t == 0.0 { 1.0 } else { t.sin() / t },
        0.0,
        z,
        panels,
    )
}

/// `int_0^kmax cos(kx) ln k dk`
fn log_integral(kmax: f64, x: f64) -> f64 {
    if x == 0.0 {
        kmax * kmax.ln() - kmax
    } else {
        ((kmax * x).sin() * kmax.ln() - sine_integral(kmax * x)) / x
    }
}

/// Samples `K(x)` at each of `xs`, integrating up to the grid's Nyquist wavenumber.
pub fn kernel_profile(xs: &[f64], params: &ModelParams, grid: &SpectralGrid) -> Result<Vec<f64>> {
    params.require_convergent()?;
    let s = params.exponent_s;
    if s <= 2.0 {
        return Err(Error::OutOfDomain {
            what: "kernel K(x)",
            s,
            domain: "s > 2, where G(k)/k^2 is integrable",
        });
    }
    grid.require_lattice_zone()?;

    let half = grid.points() / 2;
    let dk = 2.0 * PI / grid.length();
    let kmax = half as f64 * dk;
    let singular = singular_part(params);
    let mut remainder = Vec::with_capacity(half + 1);
    remainder.push(remainder_at_zero(params));
    for j in 1..=half {
        let k = j as f64 * dk;
        let g = spectral_gap(k, params, DEFAULT_SUM_TOL)?;
        let sing = match singular {
            Singular::None => 0.0,
            Singular::Power(c) => c * k.powf(s - 3.0),
            Singular::Log(c) => c * k.ln(),
        };
        remainder.push(g / (k * k) - sing);
    }

    Ok(xs
        .iter()
        .map(|&x| {
            let samples: Vec<f64> = remainder
                .iter()
                .enumerate()
                .map(|(j, r)| r * (j as f64 * dk * x).cos())
                .collect();
            let smooth = simpson(&samples, dk);
            let sing = match singular {
                Singular::None => 0.0,
                Singular::Power(c) => c * power_integral(s - 2.0, kmax, x),
                Singular::Log(c) => c * log_integral(kmax, x),
            };
            2.0 / PI * (smooth + sing)
        })
        .collect())
}

/// `K(x)` on the grid's wavenumbers; see [`kernel_profile`].
pub fn kernel_k(x: f64, params: &ModelParams, grid: &SpectralGrid) -> Result<f64> {
    Ok(kernel_profile(&[x], params, grid)?[0])
}
