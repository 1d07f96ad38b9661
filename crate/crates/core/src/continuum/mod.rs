//! Split-step Fourier integration of the continuum models.
//!
//! All kinds share the exciton equation
//!
//! ```text
//! i hbar psi_t = lambda psi + Omega(-i d_x) psi + chi sigma psi      (Zakharov type)
//! i hbar psi_t = lambda psi + Omega(-i d_x) psi - g |psi|^2 psi      (NLS type)
//! sigma_tt - v^2 sigma_xx = (f chi / m) d_xx |psi|^2
//! ```
//!
//! where `Omega(k)` is `G(k)`, `D_s |k|^{s-1}`, `pi J |k|` or `A k^2`. A
//! Strang step applies `exp(-i (lambda + Omega) dt / 2 hbar)` in Fourier
//! space, then the pointwise potential together with the strain update, then
//! the linear half step again. `|psi|^2` does not change during the middle
//! substep, so the strain modes are driven oscillators with a constant source
//! and are propagated exactly, including the time integral of `sigma` that
//! enters the potential phase.

mod scenario;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use scenario::{
    effective_nonlinearity, Coefficients, DispersionMode, PhononIntegrator, ScenarioKind,
    ScenarioSpec,
};

use crate::error::{Error, Result};
use crate::model::{asymptotic_gap, quadratic_coefficient, ModelParams};
use crate::spectral::{gap_table, Field, SpectralGrid};

/// Exciton envelope, strain `sigma = d_x xi` and its rate on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumState {
    pub psi: Field,
    pub sigma: Field,
    pub sigma_rate: Field,
    pub time: f64,
    pub steps: u64,
}

impl ContinuumState {
    pub fn new(psi: Field, sigma: Field, sigma_rate: Field) -> Result<Self> {
        if psi.grid() != sigma.grid() || psi.grid() != sigma_rate.grid() {
            return Err(Error::InvalidArgument(
                "psi, sigma and sigma_rate must share one grid".into(),
            ));
        }
        Ok(Self {
            psi,
            sigma,
            sigma_rate,
            time: 0.0,
            steps: 0,
        })
    }

    /// Exciton field with the strain at rest.
    pub fn from_psi(psi: Field) -> Self {
        let grid = psi.grid().clone();
        Self {
            psi,
            sigma: Field::zeros(grid.clone()),
            sigma_rate: Field::zeros(grid),
            time: 0.0,
            steps: 0,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.psi.grid()
    }

    /// `int |psi|^2 dx`
    pub fn norm(&self) -> f64 {
        self.psi.norm_sq()
    }

    fn non_finite_field(&self) -> Option<&'static str> {
        let bad = |f: &Field| f.values().iter().any(|v| !v.re.is_finite() || !v.im.is_finite());
        if bad(&self.psi) {
            Some("psi")
        } else if bad(&self.sigma) {
            Some("sigma")
        } else if bad(&self.sigma_rate) {
            Some("sigma_rate")
        } else {
            None
        }
    }
}

/// Scalar diagnostics of a continuum state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub norm: f64,
    /// Conserved functional of the scenario.
    pub hamiltonian: f64,
    /// `int Im(psi^* psi_x) dx`
    pub momentum: f64,
    pub max_density: f64,
}

/// Stationary strain `sigma = -(2 chi / w)(|psi|^2 - mean |psi|^2)`.
pub fn stationary_sigma(psi: &Field, params: &ModelParams) -> Field {
    let rho: Vec<f64> = psi.values().iter().map(|v| v.norm_sqr()).collect();
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    let c = -2.0 * params.coupling_chi / params.elasticity;
    let values = rho
        .iter()
        .map(|r| Complex64::new(c * (r - mean), 0.0))
        .collect();
    Field::new(psi.grid().clone(), values).expect("same grid")
}

/// Dispersion symbol `Omega(k_j)` in FFT order.
pub fn dispersion_symbol(
    spec: &ScenarioSpec,
    params: &ModelParams,
    grid: &SpectralGrid,
) -> Result<Vec<f64>> {
    spec.kind.check_exponent(params.exponent_s)?;
    match spec.dispersion_mode {
        DispersionMode::ExactGap => gap_table(grid, params),
        DispersionMode::Asymptotic => {
            let j = params.interaction_j;
            grid.wavenumbers()
                .iter()
                .map(|&k| match spec.kind {
                    ScenarioKind::HilbertZakharov | ScenarioKind::HilbertNls => {
                        Ok(PI * j * k.abs())
                    }
                    ScenarioKind::ClassicalNls => {
                        Ok(quadratic_coefficient(params) * k * k)
                    }
                    _ if k == 0.0 => Ok(0.0),
                    _ => asymptotic_gap(k, params),
                })
                .collect()
        }
    }
}

/// Integrator for one scenario on one grid with a fixed step.
#[derive(Debug, Clone)]
pub struct ContinuumSolver {
    params: ModelParams,
    spec: ScenarioSpec,
    grid: Arc<SpectralGrid>,
    dt: f64,
    omega: Vec<f64>,
    half_linear: Vec<Complex64>,
    g: f64,
}

impl ContinuumSolver {
    pub fn new(
        params: ModelParams,
        spec: ScenarioSpec,
        grid: Arc<SpectralGrid>,
        dt: f64,
    ) -> Result<Self> {
        spec.validate(&params)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
        }
        if spec.kind.has_phonons() {
            let limit = 0.5 / (params.sound_speed() * grid.k_max());
            if dt > limit {
                return Err(Error::StepTooLarge { dt, limit });
            }
        }
        let omega = dispersion_symbol(&spec, &params, &grid)?;
        let half_linear = omega
            .iter()
            .map(|w| Complex64::from_polar(1.0, -(spec.lambda_shift + w) * dt / (2.0 * params.hbar)))
            .collect();
        let g = spec.nonlinearity(&params);
        Ok(Self {
            params,
            spec,
            grid,
            dt,
            omega,
            half_linear,
            g,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Dispersion symbol in FFT order.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Cubic coefficient `g` used by the NLS-type kinds.
    pub fn nonlinearity(&self) -> f64 {
        self.g
    }

    fn check(&self, state: &ContinuumState) -> Result<()> {
        if state.grid().as_ref() != self.grid.as_ref() {
            return Err(Error::InvalidArgument("state lives on a different grid".into()));
        }
        Ok(())
    }

    fn linear_half(&self, psi: &mut [Complex64]) {
        self.grid.forward_in_place(psi);
        for (v, p) in psi.iter_mut().zip(&self.half_linear) {
            *v *= p;
        }
        self.grid.inverse_in_place(psi);
    }

    /// Advances `state` by one step.
    pub fn step(&self, state: &ContinuumState) -> Result<ContinuumState> {
        self.check(state)?;
        let mut next = if self.spec.kind.has_phonons() {
            self.zakharov_step(state)
        } else {
            self.nls_step(state)
        };
        next.time = state.time + self.dt;
        next.steps = state.steps + 1;
        if let Some(field) = next.non_finite_field() {
            return Err(Error::NumericalDivergence {
                field,
                step: next.steps,
                time: next.time,
            });
        }
        Ok(next)
    }

    fn nls_step(&self, state: &ContinuumState) -> ContinuumState {
        let mut psi = state.psi.values().to_vec();
        self.linear_half(&mut psi);
        let a = self.g * self.dt / self.params.hbar;
        for v in psi.iter_mut() {
            *v *= Complex64::from_polar(1.0, a * v.norm_sqr());
        }
        self.linear_half(&mut psi);
        let psi = Field::new(self.grid.clone(), psi).expect("grid length");
        let sigma = stationary_sigma(&psi, &self.params);
        ContinuumState {
            sigma,
            sigma_rate: Field::zeros(self.grid.clone()),
            psi,
            time: state.time,
            steps: state.steps,
        }
    }

    fn zakharov_step(&self, state: &ContinuumState) -> ContinuumState {
        let p = &self.params;
        let dt = self.dt;
        let mut psi = state.psi.values().to_vec();
        self.linear_half(&mut psi);

        let mut rho: Vec<Complex64> = psi.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
        let mut sig = state.sigma.values().to_vec();
        let mut rate = state.sigma_rate.values().to_vec();
        self.grid.forward_in_place(&mut rho);
        self.grid.forward_in_place(&mut sig);
        self.grid.forward_in_place(&mut rate);

        let v = p.sound_speed();
        let drive = self.spec.source_factor * p.coupling_chi / p.mass;
        let mut integral = vec![Complex64::new(0.0, 0.0); sig.len()];
        for (b, &k) in self.grid.wavenumbers().iter().enumerate() {
            let (s0, r0) = (sig[b], rate[b]);
            let k2 = k * k;
            if k == 0.0 {
                sig[b] = s0 + r0 * dt;
                integral[b] = s0 * dt + r0 * (0.5 * dt * dt);
                continue;
            }
            let w = v * k.abs();
            let force = -drive * k2 * rho[b];
            match self.spec.phonon_integrator {
                PhononIntegrator::Exact => {
                    // sigma'' = -w^2 sigma + force, force constant over the step.
                    let sp = force / (w * w);
                    let (sn, cs) = (w * dt).sin_cos();
                    let d = s0 - sp;
                    sig[b] = sp + d * cs + r0 * (sn / w);
                    rate[b] = -d * (w * sn) + r0 * cs;
                    integral[b] = sp * dt + d * (sn / w) + r0 * ((1.0 - cs) / (w * w));
                }
                PhononIntegrator::VelocityVerlet => {
                    let acc = |s: Complex64| -s * (w * w) + force;
                    let half = r0 + acc(s0) * (0.5 * dt);
                    let s1 = s0 + half * dt;
                    sig[b] = s1;
                    rate[b] = half + acc(s1) * (0.5 * dt);
                    integral[b] = (s0 + s1) * (0.5 * dt);
                }
            }
        }
        self.grid.inverse_in_place(&mut sig);
        self.grid.inverse_in_place(&mut rate);
        self.grid.inverse_in_place(&mut integral);

        let c = -p.coupling_chi / p.hbar;
        for (v, s) in psi.iter_mut().zip(&integral) {
            *v *= Complex64::from_polar(1.0, c * s.re);
        }
        self.linear_half(&mut psi);

        // The strain is real; drop the round-off imaginary parts.
        let real = |f: Vec<Complex64>| -> Vec<Complex64> {
            f.into_iter().map(|v| Complex64::new(v.re, 0.0)).collect()
        };
        ContinuumState {
            psi: Field::new(self.grid.clone(), psi).expect("grid length"),
            sigma: Field::new(self.grid.clone(), real(sig)).expect("grid length"),
            sigma_rate: Field::new(self.grid.clone(), real(rate)).expect("grid length"),
            time: state.time,
            steps: state.steps,
        }
    }

    /// Advances `steps` times, stopping at the first error.
    pub fn advance(&self, state: &ContinuumState, steps: usize) -> Result<ContinuumState> {
        let mut st = state.clone();
        for _ in 0..steps {
            st = self.step(&st)?;
        }
        Ok(st)
    }

    pub fn observables(&self, state: &ContinuumState) -> Result<Observables> {
        self.check(state)?;
        let p = &self.params;
        let dx = self.grid.dx();
        let m = self.grid.points() as f64;
        let mut spec = state.psi.values().to_vec();
        self.grid.forward_in_place(&mut spec);
        let mut linear = 0.0;
        let mut momentum = 0.0;
        for ((c, w), &k) in spec.iter().zip(&self.omega).zip(self.grid.wavenumbers()) {
            let e = c.norm_sqr() * dx / m;
            linear += (self.spec.lambda_shift + w) * e;
            if k != -self.grid.k_max() {
                momentum += k * e;
            }
        }
        let rho: Vec<f64> = state.psi.values().iter().map(|v| v.norm_sqr()).collect();
        let norm = rho.iter().sum::<f64>() * dx;
        let max_density = rho.iter().fold(0.0f64, |a, r| a.max(*r));

        let hamiltonian = if self.spec.kind.has_phonons() {
            let sigma = state.sigma.values();
            let coupling: f64 =
                p.coupling_chi * sigma.iter().zip(&rho).map(|(s, r)| s.re * r).sum::<f64>() * dx;
            let potential: f64 = 0.5 * p.elasticity * sigma.iter().map(|s| s.re * s.re).sum::<f64>() * dx;
            // xi_t = sigma_t / (i k) for k != 0.
            let mut rate = state.sigma_rate.values().to_vec();
            self.grid.forward_in_place(&mut rate);
            let kinetic: f64 = rate
                .iter()
                .zip(self.grid.wavenumbers())
                .filter(|(_, k)| **k != 0.0)
                .map(|(r, k)| r.norm_sqr() / (k * k))
                .sum::<f64>()
                * 0.5
                * p.mass
                * dx
                / m;
            let f = if self.spec.source_factor == 0.0 {
                1.0
            } else {
                self.spec.source_factor
            };
            linear + coupling + (potential + kinetic) / f
        } else {
            linear - 0.5 * self.g * rho.iter().map(|r| r * r).sum::<f64>() * dx
        };
        Ok(Observables {
            norm,
            hamiltonian,
            momentum,
            max_density,
        })
    }
}

fn require_kind(spec: &ScenarioSpec, phonons: bool, op: &str) -> Result<()> {
    if spec.kind.has_phonons() != phonons {
        return Err(Error::InvalidArgument(format!(
            "{op} does not integrate scenario {}",
            spec.kind.name()
        )));
    }
    Ok(())
}

/// One Strang step of a Zakharov-type scenario.
pub fn step_zakharov(
    state: &ContinuumState,
    params: &ModelParams,
    spec: &ScenarioSpec,
    dt: f64,
) -> Result<ContinuumState> {
    require_kind(spec, true, "step_zakharov")?;
    ContinuumSolver::new(*params, *spec, state.grid().clone(), dt)?.step(state)
}

/// One Strang step of an NLS-type scenario.
pub fn step_nlfse(
    state: &ContinuumState,
    params: &ModelParams,
    spec: &ScenarioSpec,
    dt: f64,
) -> Result<ContinuumState> {
    require_kind(spec, false, "step_nlfse")?;
    ContinuumSolver::new(*params, *spec, state.grid().clone(), dt)?.step(state)
}

pub fn observables(
    state: &ContinuumState,
    params: &ModelParams,
    spec: &ScenarioSpec,
) -> Result<Observables> {
    // dt only enters the propagators; any admissible value will do.
    let dt = 1e-3 / (params.sound_speed() * state.grid().k_max());
    ContinuumSolver::new(*params, *spec, state.grid().clone(), dt)?.observables(state)
}

#[cfg(test)]
mod tests;
