//! The long-range hopping operator `(C psi)_n = sum_{m != n} J_{n-m} psi_m`.
//!
//! `C` is circulant on a ring and Toeplitz on an open chain, so it is stored
//! by its first column `c_d` and applied either directly or through an FFT
//! (the Toeplitz case embedded in a circulant of twice the size).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{Boundary, LatticeTopology};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::special::{hurwitz_zeta, zeta};

/// How the coupling sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMethod {
    /// `O(L log L)` circulant product.
    #[default]
    Fft,
    /// `O(L R)` direct summation over the nonzero couplings.
    Direct,
}

#[derive(Clone)]
pub(crate) struct CouplingOperator {
    sites: usize,
    boundary: Boundary,
    /// `c_d` for `d = 0..L`, with `c_d = c_{L-d}` on a ring.
    column: Vec<f64>,
    /// Nonzero `(offset, c)` pairs for the direct path.
    taps: Vec<(usize, f64)>,
    method: CouplingMethod,
    eigen: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

/// First column of the ring operator.
///
/// Without a cutoff every periodic image contributes, so that a plane wave
/// with an allowed wavenumber sees exactly the infinite-chain `J(k)`:
/// `c_d = J L^{-s} (zeta(s, d/L) + zeta(s, 1 - d/L))`, `c_0 = 2 J L^{-s} zeta(s)`.
/// With a cutoff `R` only minimum-image distances `1..=R` couple.
fn ring_column(sites: usize, params: &ModelParams, cutoff: Option<usize>) -> Vec<f64> {
    let s = params.exponent_s;
    let j = params.interaction_j;
    let l = sites as f64;
    match cutoff {
        None => {
            let scale = j * l.powf(-s);
            (0..sites)
                .map(|d| {
                    if d == 0 {
                        2.0 * scale * zeta(s)
                    } else {
                        let a = d as f64 / l;
                        scale * (hurwitz_zeta(s, a) + hurwitz_zeta(s, 1.0 - a))
                    }
                })
                .collect()
        }
        Some(r) => (0..sites)
            .map(|d| {
                let dist = d.min(sites - d);
                if dist == 0 || dist > r {
                    0.0
                } else {
                    j * (dist as f64).powf(-s)
                }
            })
            .collect(),
    }
}

fn chain_column(sites: usize, params: &ModelParams, cutoff: Option<usize>) -> Vec<f64> {
    let r = cutoff.unwrap_or(sites);
    (0..sites)
        .map(|d| {
            if d == 0 || d > r {
                0.0
            } else {
                params.interaction_j * (d as f64).powf(-params.exponent_s)
            }
        })
        .collect()
}

impl CouplingOperator {
    pub(crate) fn new(
        sites: usize,
        params: &ModelParams,
        topo: &LatticeTopology,
        method: CouplingMethod,
    ) -> Result<Self> {
        topo.validate(sites)?;
        if topo.interaction_cutoff.is_none() {
            params.require_convergent()?;
        } else if !params.exponent_s.is_finite() {
            return Err(Error::InvalidArgument("exponent_s must be finite".into()));
        }
        let column = match topo.boundary {
            Boundary::Periodic => ring_column(sites, params, topo.interaction_cutoff),
            Boundary::Open => chain_column(sites, params, topo.interaction_cutoff),
        };
        let taps = column
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(d, c)| (d, *c))
            .collect();

        let fft_len = match topo.boundary {
            Boundary::Periodic => sites,
            Boundary::Open => 2 * sites,
        };
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(fft_len);
        let ifft = planner.plan_fft_inverse(fft_len);
        let mut embedded = vec![Complex64::new(0.0, 0.0); fft_len];
        match topo.boundary {
            Boundary::Periodic => {
                for (e, c) in embedded.iter_mut().zip(&column) {
                    e.re = *c;
                }
            }
            Boundary::Open => {
                for d in 1..sites {
                    embedded[d].re = column[d];
                    embedded[fft_len - d].re = column[d];
                }
            }
        }
        fft.process(&mut embedded);
        // The column is real and even, so the spectrum is real.
        let eigen = embedded.iter().map(|v| v.re).collect();

        Ok(Self {
            sites,
            boundary: topo.boundary,
            column,
            taps,
            method,
            eigen,
            fft,
            ifft,
        })
    }

    /// `sum_d |c_d|` over all couplings of one site; `J(0)` for the ring without cutoff.
    pub(crate) fn row_sum_abs(&self) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.column.iter().map(|c| c.abs()).sum(),
            Boundary::Open => 2.0 * self.column.iter().map(|c| c.abs()).sum::<f64>(),
        }
    }

    /// Eigenvalues of the ring operator in FFT order (`J(k_q)` without cutoff).
    pub(crate) fn ring_eigenvalues(&self) -> Option<&[f64]> {
        match self.boundary {
            Boundary::Periodic => Some(&self.eigen),
            Boundary::Open => None,
        }
    }

    pub(crate) fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        self.apply_with(self.method, psi, out)
    }

    pub(crate) fn apply_with(
        &self,
        method: CouplingMethod,
        psi: &[Complex64],
        out: &mut [Complex64],
    ) {
        match method {
            CouplingMethod::Fft => self.apply_fft(psi, out),
            CouplingMethod::Direct => self.apply_direct(psi, out),
        }
    }

    fn apply_direct(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let l = self.sites;
        for (n, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            match self.boundary {
                Boundary::Periodic => {
                    for &(d, c) in &self.taps {
                        acc += psi[(n + l - d) % l] * c;
                    }
                }
                Boundary::Open => {
                    for &(d, c) in &self.taps {
                        if n >= d {
                            acc += psi[n - d] * c;
                        }
                        if n + d < l {
                            acc += psi[n + d] * c;
                        }
                    }
                }
            }
            *o = acc;
        }
    }

    fn apply_fft(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let len = self.eigen.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        buf[..self.sites].copy_from_slice(psi);
        self.fft.process(&mut buf);
        for (b, e) in buf.iter_mut().zip(&self.eigen) {
            *b *= *e;
        }
        self.ifft.process(&mut buf);
        let scale = 1.0 / len as f64;
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b * scale;
        }
    }
}
