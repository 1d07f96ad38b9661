use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exciton amplitudes `psi_n`, displacements `xi_n` and momenta `eta_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub psi: Vec<Complex64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub time: f64,
    /// Number of steps taken so far.
    pub steps: u64,
}

impl LatticeState {
    pub fn new(psi: Vec<Complex64>, xi: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        let l = psi.len();
        if l < 2 {
            return Err(Error::InvalidArgument(format!(
                "a lattice needs at least 2 sites, got {l}"
            )));
        }
        if xi.len() != l || eta.len() != l {
            return Err(Error::InvalidArgument(format!(
                "psi, xi and eta lengths differ ({l}, {}, {})",
                xi.len(),
                eta.len()
            )));
        }
        Ok(Self {
            psi,
            xi,
            eta,
            time: 0.0,
            steps: 0,
        })
    }

    pub fn zeros(sites: usize) -> Result<Self> {
        Self::new(
            vec![Complex64::new(0.0, 0.0); sites],
            vec![0.0; sites],
            vec![0.0; sites],
        )
    }

    /// Exciton-only state with the given amplitudes and a chain at rest.
    pub fn from_psi(psi: Vec<Complex64>) -> Result<Self> {
        let l = psi.len();
        Self::new(psi, vec![0.0; l], vec![0.0; l])
    }

    /// `A exp(-(n - c)^2 / (2 width^2) + i k0 n)` scaled to norm `total`.
    pub fn gaussian_packet(
        sites: usize,
        center: f64,
        width: f64,
        k0: f64,
        total: f64,
    ) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "packet width must be > 0, got {width}"
            )));
        }
        let mut psi: Vec<Complex64> = (0..sites)
            .map(|n| {
                let d = n as f64 - center;
                Complex64::from_polar((-d * d / (2.0 * width * width)).exp(), k0 * n as f64)
            })
            .collect();
        let n0: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
        let scale = (total / n0).sqrt();
        for v in psi.iter_mut() {
            *v *= scale;
        }
        Self::from_psi(psi)
    }

    pub fn sites(&self) -> usize {
        self.psi.len()
    }

    /// `N = sum |psi_n|^2`
    pub fn norm(&self) -> f64 {
        norm(&self.psi)
    }

    pub fn max_density(&self) -> f64 {
        self.psi.iter().fold(0.0, |m, v| m.max(v.norm_sqr()))
    }

    /// Name of the first field holding a non-finite value.
    pub(crate) fn non_finite_field(&self) -> Option<&'static str> {
        if self.psi.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            Some("psi")
        } else if self.xi.iter().any(|v| !v.is_finite()) {
            Some("xi")
        } else if self.eta.iter().any(|v| !v.is_finite()) {
            Some("eta")
        } else {
            None
        }
    }
}

/// `sum |psi_n|^2`
pub fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|v| v.norm_sqr()).sum()
}
