use std::sync::Arc;

use num_complex::Complex64;

use super::SpectralGrid;
use crate::error::{Error, Result};

/// Complex samples bound to the grid they live on.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<SpectralGrid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Arc<SpectralGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::InvalidArgument(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.points()
            )));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Arc<SpectralGrid>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.points());
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let n = grid.points();
        Self::from_parts(grid, vec![Complex64::new(0.0, 0.0); n])
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Arc<SpectralGrid>, f: F) -> Self {
        let values = grid.positions().into_iter().map(f).collect();
        Self::from_parts(grid, values)
    }

    pub fn from_real<F: Fn(f64) -> f64>(grid: Arc<SpectralGrid>, f: F) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    /// `sum |f|^2 dx`
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Largest pointwise difference to `other`.
    pub fn max_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}
