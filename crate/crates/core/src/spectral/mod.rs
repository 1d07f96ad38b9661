//! Periodic Fourier grid and Fourier-multiplier operators.
//!
//! Conventions: `f_hat_j = sum_n f(x_n) e^{-i k_j x_n}` (unnormalised) and the
//! inverse carries the `1/M`. Nodes are `x_n = -L/2 + n dx`; the spectrum is
//! stored in FFT order, so bin `b` holds `j = b` for `b < M/2` and `j = b - M`
//! otherwise, with the Nyquist mode `j = -M/2` at `b = M/2`.
//!
//! Multipliers:
//!
//! | operator               | symbol                 |
//! |------------------------|------------------------|
//! | first derivative       | `i k` (Nyquist zeroed) |
//! | second derivative      | `-k^2`                 |
//! | Riesz derivative       | `-abs(k)^alpha`        |
//! | Hilbert transform      | `i sgn(k)` (Nyquist zeroed) |
//! | exact gap              | `G(k)`                 |
//!
//! With this Hilbert normalisation `-pi J H(d/dx)` has symbol `pi J abs(k)`,
//! matching the `s = 2` limit of the lattice gap.

mod field;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::model::{spectral_gap, ModelParams, DEFAULT_SUM_TOL};

pub use field::Field;

/// Uniform periodic grid with cached FFT plans.
#[derive(Clone)]
pub struct SpectralGrid {
    length: f64,
    points: usize,
    dx: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("length", &self.length)
            .field("points", &self.points)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.length == other.length && self.points == other.points
    }
}

impl SpectralGrid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "grid length must be > 0, got {length}"
            )));
        }
        if points < 8 || !points.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "grid needs an even number of points >= 8, got {points}"
            )));
        }
        let dk = 2.0 * PI / length;
        let wavenumbers = (0..points)
            .map(|b| {
                let j = if b < points / 2 {
                    b as i64
                } else {
                    b as i64 - points as i64
                };
                j as f64 * dk
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            length,
            points,
            dx: length / points as f64,
            wavenumbers,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        })
    }

    pub fn shared(length: f64, points: usize) -> Result<Arc<Self>> {
        Self::new(length, points).map(Arc::new)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn nyquist_bin(&self) -> usize {
        self.points / 2
    }

    /// Largest resolved `|k|`, i.e. the Nyquist magnitude `pi / dx`.
    pub fn k_max(&self) -> f64 {
        PI / self.dx
    }

    pub fn position(&self, n: usize) -> f64 {
        -0.5 * self.length + n as f64 * self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|n| self.position(n)).collect()
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.points);
        self.forward.process(buf);
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.points);
        self.inverse.process(buf);
        let scale = 1.0 / self.points as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// Applies `symbol(k)` bin by bin; `symbol` receives the bin index and
    /// its wavenumber.
    pub fn apply_symbol<F>(&self, values: &[Complex64], symbol: F) -> Vec<Complex64>
    where
        F: Fn(usize, f64) -> Complex64,
    {
        let mut buf = values.to_vec();
        self.forward_in_place(&mut buf);
        for (b, v) in buf.iter_mut().enumerate() {
            *v *= symbol(b, self.wavenumbers[b]);
        }
        self.inverse_in_place(&mut buf);
        buf
    }

    /// Multiplies the spectrum by a precomputed real table.
    pub fn apply_table(&self, values: &[Complex64], table: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(table.len(), self.points);
        self.apply_symbol(values, |b, _| Complex64::new(table[b], 0.0))
    }

    /// Fails when the grid resolves wavenumbers beyond the lattice zone `|k| <= pi`.
    pub fn require_lattice_zone(&self) -> Result<()> {
        let k_max = self.k_max();
        if k_max > PI * (1.0 + 1e-12) {
            Err(Error::Aliasing { k_max })
        } else {
            Ok(())
        }
    }
}

pub fn forward_transform(f: &Field) -> Vec<Complex64> {
    let mut buf = f.values().to_vec();
    f.grid().forward_in_place(&mut buf);
    buf
}

pub fn inverse_transform(grid: &Arc<SpectralGrid>, spectrum: &[Complex64]) -> Result<Field> {
    let mut buf = spectrum.to_vec();
    if buf.len() != grid.points() {
        return Err(Error::InvalidArgument(format!(
            "spectrum has {} bins, grid has {}",
            buf.len(),
            grid.points()
        )));
    }
    grid.inverse_in_place(&mut buf);
    Field::new(grid.clone(), buf)
}

fn map_field<F>(f: &Field, symbol: F) -> Field
where
    F: Fn(usize, f64) -> Complex64,
{
    let values = f.grid().apply_symbol(f.values(), symbol);
    Field::from_parts(f.grid().clone(), values)
}

pub fn first_derivative(f: &Field) -> Field {
    let nyq = f.grid().nyquist_bin();
    map_field(f, |b, k| {
        if b == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k)
        }
    })
}

pub fn second_derivative(f: &Field) -> Field {
    map_field(f, |_, k| Complex64::new(-k * k, 0.0))
}

pub fn riesz_symbol(k: f64, alpha: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        -k.abs().powf(alpha)
    }
}

/// Riesz derivative of order `alpha`, symbol `-|k|^alpha`.
pub fn riesz_derivative(f: &Field, alpha: f64) -> Result<Field> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "Riesz order must lie in (0, 2], got {alpha}"
        )));
    }
    Ok(map_field(f, |_, k| Complex64::new(riesz_symbol(k, alpha), 0.0)))
}

/// Hilbert transform with symbol `i sgn(k)`; mean and Nyquist bins map to zero.
pub fn hilbert_transform(f: &Field) -> Field {
    hilbert_scaled(f, 1.0)
}

/// Principal-value transform with kernel `1/(y - x)`, symbol `i pi sgn(k)`.
pub fn hilbert_transform_unnormalized(f: &Field) -> Field {
    hilbert_scaled(f, PI)
}

fn hilbert_scaled(f: &Field, scale: f64) -> Field {
    let nyq = f.grid().nyquist_bin();
    map_field(f, |b, k| {
        if b == nyq || k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, scale * k.signum())
        }
    })
}

/// `G(k_j)` for every bin of `grid`, reading the grid spacing as the lattice constant.
pub fn gap_table(grid: &SpectralGrid, params: &ModelParams) -> Result<Vec<f64>> {
    grid.require_lattice_zone()?;
    params.require_convergent()?;
    // G is even, so evaluate each |k| once.
    let half = grid.points() / 2;
    let mut by_index = vec![0.0; half + 1];
    for (j, g) in by_index.iter_mut().enumerate() {
        let k = j as f64 * 2.0 * PI / grid.length();
        *g = spectral_gap(k, params, DEFAULT_SUM_TOL)?;
    }
    Ok((0..grid.points())
        .map(|b| {
            let j = if b <= half { b } else { grid.points() - b };
            by_index[j]
        })
        .collect())
}

/// Applies the exact lattice gap `G(k)`.
pub fn exact_gap_operator(f: &Field, params: &ModelParams) -> Result<Field> {
    let table = gap_table(f.grid(), params)?;
    let values = f.grid().apply_table(f.values(), &table);
    Ok(Field::from_parts(f.grid().clone(), values))
}
