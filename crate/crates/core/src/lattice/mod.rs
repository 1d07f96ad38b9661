//! Semiclassical equations of motion on the chain:
//!
//! ```text
//! i hbar dpsi_n/dt = Lambda psi_n - sum_{m != n} J_{n-m} psi_m + chi (xi_{n+1} - xi_n) psi_n
//! dxi_n/dt  = eta_n / m
//! deta_n/dt = w (xi_{n+1} - 2 xi_n + xi_{n-1}) + f chi S_n[rho]
//! ```
//!
//! with `rho = |psi|^2`, `Lambda = eps + H_ph` recomputed at every RK4 stage
//! and the source stencil `S_n` chosen by [`SourceStencil`]. Only
//! [`SourceStencil::Backward`] is the force `-dH_int/dxi_n` of the interaction
//! energy `chi sum (xi_{n+1} - xi_n) rho_n`, so it is the one that conserves
//! the total energy and is the default.

mod coupling;
mod state;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use coupling::CouplingMethod;
pub use state::{norm, LatticeState};

use coupling::CouplingOperator;

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
    /// Free ends: the missing bonds carry neither spring nor coupling.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeTopology {
    pub boundary: Boundary,
    /// Largest coupled distance. `None` couples every pair, including all
    /// periodic images on a ring; `Some(R)` uses minimum-image distances `<= R`.
    pub interaction_cutoff: Option<usize>,
}

impl LatticeTopology {
    pub fn validate(&self, sites: usize) -> Result<()> {
        if sites < 2 {
            return Err(Error::InvalidArgument(format!(
                "a lattice needs at least 2 sites, got {sites}"
            )));
        }
        if let Some(r) = self.interaction_cutoff {
            if r == 0 {
                return Err(Error::InvalidArgument("interaction cutoff must be >= 1".into()));
            }
            if self.boundary == Boundary::Periodic && 2 * r >= sites {
                return Err(Error::InvalidArgument(format!(
                    "periodic cutoff R = {r} must satisfy R < L/2 = {}",
                    sites as f64 / 2.0
                )));
            }
        }
        Ok(())
    }
}

/// Discretisation of the phonon source `S_n[rho]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceStencil {
    /// `rho_{n+1} - rho_n`, the printed form of the phonon equation. It is
    /// shifted by one site against the interaction energy and does not
    /// conserve the total energy.
    Forward,
    /// `rho_n - rho_{n-1}`, the force derived from the interaction energy.
    #[default]
    Backward,
    /// `(rho_{n+1} - rho_{n-1}) / 2`
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeOptions {
    pub stencil: SourceStencil,
    /// Prefactor `f` of the phonon source; 2 reproduces the continuum `2 chi` source.
    pub source_factor: f64,
    pub coupling_method: CouplingMethod,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self {
            stencil: SourceStencil::default(),
            source_factor: 1.0,
            coupling_method: CouplingMethod::default(),
        }
    }
}

/// Time derivatives of a [`LatticeState`].
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub psi: Vec<Complex64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Energy split of Eqs. `H_ex`, `H_ph`, `H_int`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeEnergies {
    pub exciton: f64,
    pub phonon: f64,
    pub interaction: f64,
}

impl LatticeEnergies {
    pub fn total(&self) -> f64 {
        self.exciton + self.phonon + self.interaction
    }
}

/// A chain of fixed size with its precomputed coupling operator.
#[derive(Clone)]
pub struct LatticeSystem {
    params: ModelParams,
    topology: LatticeTopology,
    options: LatticeOptions,
    sites: usize,
    coupling: CouplingOperator,
}

impl LatticeSystem {
    pub fn new(
        params: ModelParams,
        topology: LatticeTopology,
        sites: usize,
        options: LatticeOptions,
    ) -> Result<Self> {
        params.validate()?;
        if !options.source_factor.is_finite() {
            return Err(Error::InvalidArgument("source_factor must be finite".into()));
        }
        let coupling = CouplingOperator::new(sites, &params, &topology, options.coupling_method)?;
        Ok(Self {
            params,
            topology,
            options,
            sites,
            coupling,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn topology(&self) -> &LatticeTopology {
        &self.topology
    }

    pub fn options(&self) -> &LatticeOptions {
        &self.options
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    fn check(&self, state: &LatticeState) -> Result<()> {
        if state.sites() != self.sites {
            return Err(Error::InvalidArgument(format!(
                "state has {} sites, system has {}",
                state.sites(),
                self.sites
            )));
        }
        Ok(())
    }

    /// `(C psi)_n = sum_{m != n} J_{n-m} psi_m`
    pub fn apply_coupling(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.coupling.apply(psi, &mut out);
        out
    }

    /// Same as [`Self::apply_coupling`] with an explicit evaluation path.
    pub fn apply_coupling_with(&self, method: CouplingMethod, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.coupling.apply_with(method, psi, &mut out);
        out
    }

    /// Eigenvalues of the ring coupling in FFT order; `None` on an open chain.
    pub fn coupling_eigenvalues(&self) -> Option<&[f64]> {
        self.coupling.ring_eigenvalues()
    }

    /// `xi_{n+1} - xi_n`, zero for the missing bond at the end of an open chain.
    fn bonds(&self, xi: &[f64]) -> Vec<f64> {
        let l = self.sites;
        (0..l)
            .map(|n| match self.topology.boundary {
                Boundary::Periodic => xi[(n + 1) % l] - xi[n],
                Boundary::Open if n + 1 < l => xi[n + 1] - xi[n],
                Boundary::Open => 0.0,
            })
            .collect()
    }

    fn phonon_energy_from(&self, bonds: &[f64], eta: &[f64]) -> f64 {
        let kinetic: f64 = eta.iter().map(|p| p * p).sum::<f64>() / (2.0 * self.params.mass);
        let potential: f64 = bonds.iter().map(|b| b * b).sum::<f64>() * 0.5 * self.params.elasticity;
        kinetic + potential
    }

    /// `Lambda = eps + sum (eta_n^2 / 2m + (w/2)(xi_{n+1} - xi_n)^2)`
    pub fn lambda_term(&self, state: &LatticeState) -> f64 {
        self.params.site_energy + self.phonon_energy_from(&self.bonds(&state.xi), &state.eta)
    }

    /// Source `S_n[rho]` before the `f chi` prefactor.
    fn source(&self, rho: &[f64]) -> Vec<f64> {
        let l = self.sites;
        let open = self.topology.boundary == Boundary::Open;
        let at = |i: isize| -> f64 { rho[i.rem_euclid(l as isize) as usize] };
        (0..l)
            .map(|n| {
                let i = n as isize;
                // On an open chain bond n exists for n < L-1 and bond n-1 for n > 0.
                let has_bond = !open || n + 1 < l;
                let has_prev = !open || n > 0;
                let forward = if has_bond { at(i + 1) - at(i) } else { 0.0 };
                let backward = (if has_bond { at(i) } else { 0.0 })
                    - (if has_prev { at(i - 1) } else { 0.0 });
                match self.options.stencil {
                    SourceStencil::Forward => forward,
                    SourceStencil::Backward => backward,
                    SourceStencil::Symmetric => 0.5 * (forward + backward),
                }
            })
            .collect()
    }

    /// Right-hand side of the equations of motion.
    pub fn rhs(&self, state: &LatticeState) -> Result<Derivative> {
        self.check(state)?;
        Ok(self.rhs_unchecked(&state.psi, &state.xi, &state.eta))
    }

    fn rhs_unchecked(&self, psi: &[Complex64], xi: &[f64], eta: &[f64]) -> Derivative {
        let p = &self.params;
        let bonds = self.bonds(xi);
        let lambda = p.site_energy + self.phonon_energy_from(&bonds, eta);
        let hop = self.apply_coupling(psi);
        let minus_i_over_hbar = Complex64::new(0.0, -1.0 / p.hbar);
        let dpsi = psi
            .iter()
            .zip(&hop)
            .zip(&bonds)
            .map(|((v, h), b)| minus_i_over_hbar * (v * (lambda + p.coupling_chi * b) - h))
            .collect();
        let dxi = eta.iter().map(|e| e / p.mass).collect();
        let rho: Vec<f64> = psi.iter().map(|v| v.norm_sqr()).collect();
        let src = self.source(&rho);
        let fchi = self.options.source_factor * p.coupling_chi;
        let l = self.sites;
        let deta = (0..l)
            .map(|n| {
                let prev = match self.topology.boundary {
                    Boundary::Periodic => bonds[(n + l - 1) % l],
                    Boundary::Open if n > 0 => bonds[n - 1],
                    Boundary::Open => 0.0,
                };
                p.elasticity * (bonds[n] - prev) + fchi * src[n]
            })
            .collect();
        Derivative {
            psi: dpsi,
            xi: dxi,
            eta: deta,
        }
    }

    /// One classical RK4 step of size `dt`.
    pub fn step_rk4(&self, state: &LatticeState, dt: f64) -> Result<LatticeState> {
        self.check(state)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
        }
        let stage = |base: &LatticeState, d: &Derivative, h: f64| {
            let psi: Vec<Complex64> = base.psi.iter().zip(&d.psi).map(|(a, b)| a + b * h).collect();
            let xi: Vec<f64> = base.xi.iter().zip(&d.xi).map(|(a, b)| a + b * h).collect();
            let eta: Vec<f64> = base.eta.iter().zip(&d.eta).map(|(a, b)| a + b * h).collect();
            self.rhs_unchecked(&psi, &xi, &eta)
        };
        let k1 = self.rhs_unchecked(&state.psi, &state.xi, &state.eta);
        let k2 = stage(state, &k1, 0.5 * dt);
        let k3 = stage(state, &k2, 0.5 * dt);
        let k4 = stage(state, &k3, dt);
        let w = dt / 6.0;
        let combine_c = |y: &[Complex64], a: &[Complex64], b: &[Complex64], c: &[Complex64], d: &[Complex64]| {
            (0..y.len())
                .map(|i| y[i] + (a[i] + (b[i] + c[i]) * 2.0 + d[i]) * w)
                .collect::<Vec<_>>()
        };
        let combine_r = |y: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| {
            (0..y.len())
                .map(|i| y[i] + (a[i] + 2.0 * (b[i] + c[i]) + d[i]) * w)
                .collect::<Vec<_>>()
        };
        let next = LatticeState {
            psi: combine_c(&state.psi, &k1.psi, &k2.psi, &k3.psi, &k4.psi),
            xi: combine_r(&state.xi, &k1.xi, &k2.xi, &k3.xi, &k4.xi),
            eta: combine_r(&state.eta, &k1.eta, &k2.eta, &k3.eta, &k4.eta),
            time: state.time + dt,
            steps: state.steps + 1,
        };
        if let Some(field) = next.non_finite_field() {
            return Err(Error::NumericalDivergence {
                field,
                step: next.steps,
                time: next.time,
            });
        }
        Ok(next)
    }

    pub fn energies(&self, state: &LatticeState) -> Result<LatticeEnergies> {
        self.check(state)?;
        let p = &self.params;
        let hop = self.apply_coupling(&state.psi);
        let exchange: f64 = state.psi.iter().zip(&hop).map(|(a, h)| (a.conj() * h).re).sum();
        let bonds = self.bonds(&state.xi);
        let interaction = p.coupling_chi
            * bonds
                .iter()
                .zip(&state.psi)
                .map(|(b, v)| b * v.norm_sqr())
                .sum::<f64>();
        Ok(LatticeEnergies {
            exciton: p.site_energy * state.norm() - exchange,
            phonon: self.phonon_energy_from(&bonds, &state.eta),
            interaction,
        })
    }

    /// `H_ex + H_ph + H_int`
    pub fn total_energy(&self, state: &LatticeState) -> Result<f64> {
        Ok(self.energies(state)?.total())
    }

    /// `0.5 min(hbar / (|eps| + sum|J_d| + |chi| max|dxi|), sqrt(m/w) / 2)`.
    pub fn stability_limit(&self, state: &LatticeState) -> f64 {
        let p = &self.params;
        let max_bond = self
            .bonds(&state.xi)
            .iter()
            .fold(0.0f64, |m, b| m.max(b.abs()));
        let exciton = p.hbar
            / (p.site_energy.abs() + self.coupling.row_sum_abs() + p.coupling_chi.abs() * max_bond);
        let phonon = (p.mass / p.elasticity).sqrt() / 2.0;
        0.5 * exciton.min(phonon)
    }
}
