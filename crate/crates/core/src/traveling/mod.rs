//! Traveling waves `psi(x, t) = phi(x - v t) e^{i mu t / hbar}` of the
//! exciton-strain system.
//!
//! Substituting the ansatz into the strain wave equation slaves the strain,
//! `sigma = 2 chi / (m (v^2 - v_s^2)) (|phi|^2 - mean)`, and the exciton
//! equation becomes the Ginzburg-Landau type profile equation
//!
//! `i hbar v phi' + mu phi + Omega phi + gamma |phi|^2 phi = 0`
//!
//! with `Omega` the fractional (`D_s |k|^{s-1}`) or Hilbert (`pi J |k|`)
//! dispersion and `gamma = 2 chi^2 / (m (v^2 - v_s^2))`.

mod gmres;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    fractional_coefficient, quadratic_coefficient, spectral_gap, ModelParams, DEFAULT_SUM_TOL,
};
use crate::spectral::{gap_table, Field, SpectralGrid};

/// Dispersion of the profile equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileDispersion {
    /// `D_s |k|^{s-1}`, `2 < s < 3`.
    Fractional,
    /// `pi J |k|`, `s = 2`.
    Hilbert,
    /// `J zeta(s-2) k^2 / 2`, `s > 3`; the classical NLS limit.
    Quadratic,
    /// Exact lattice gap `G(k)`.
    ExactGap,
}

impl ProfileDispersion {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fractional => "fractional",
            Self::Hilbert => "hilbert",
            Self::Quadratic => "quadratic",
            Self::ExactGap => "exact_gap",
        }
    }

    /// `Omega(k)` at an arbitrary wavenumber.
    pub fn value(self, k: f64, params: &ModelParams) -> Result<f64> {
        let ak = k.abs();
        match self {
            Self::Fractional => Ok(fractional_coefficient(params)? * ak.powf(params.exponent_s - 1.0)),
            Self::Hilbert => Ok(PI * params.interaction_j * ak),
            Self::Quadratic => Ok(quadratic_coefficient(params) * k * k),
            Self::ExactGap => spectral_gap(k, params, DEFAULT_SUM_TOL),
        }
    }

    fn check_exponent(self, s: f64) -> Result<()> {
        let rule = match self {
            Self::Fractional if s > 2.0 && s < 3.0 => return Ok(()),
            Self::Fractional if s == 3.0 => "requires 2 < s < 3; D_s is singular at s = 3",
            Self::Fractional => "requires 2 < s < 3",
            Self::Hilbert if s == 2.0 => return Ok(()),
            Self::Hilbert => "requires s = 2",
            Self::Quadratic if s > 3.0 => return Ok(()),
            Self::Quadratic => "requires s > 3",
            Self::ExactGap if s > 1.0 => return Ok(()),
            Self::ExactGap => return Err(Error::SumDivergence(s)),
        };
        Err(Error::Incompatible {
            kind: self.name(),
            s,
            rule,
        })
    }
}

fn sonic_check(v: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if !v.is_finite() {
        return Err(Error::InvalidArgument(format!("wave speed must be finite, got {v}")));
    }
    let vs2 = params.elasticity / params.mass;
    let denom = params.mass * (v * v - vs2);
    if (v * v - vs2).abs() <= 1e-12 * vs2 {
        return Err(Error::SonicSingularity {
            speed: v.abs(),
            sound: vs2.sqrt(),
        });
    }
    Ok(denom)
}

/// `gamma = 2 chi^2 / (m (v^2 - v_s^2))`, `v_s = sqrt(w / m)`.
pub fn gamma_coefficient(v: f64, params: &ModelParams) -> Result<f64> {
    let denom = sonic_check(v, params)?;
    let chi = params.coupling_chi;
    Ok(2.0 * chi * chi / denom)
}

/// Slaved strain `2 chi / (m (v^2 - v_s^2)) (|psi|^2 - mean)`.
pub fn sigma_profile(psi: &Field, v: f64, params: &ModelParams) -> Result<Field> {
    let c = 2.0 * params.coupling_chi / sonic_check(v, params)?;
    let rho: Vec<f64> = psi.values().iter().map(|z| z.norm_sqr()).collect();
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    Ok(Field::from_parts(
        psi.grid().clone(),
        rho.iter().map(|r| Complex64::new(c * (r - mean), 0.0)).collect(),
    ))
}

/// Profile equation at wave speed `v` on a periodic `zeta` grid.
#[derive(Debug, Clone)]
pub struct TravelingWaveProblem {
    pub wave_speed: f64,
    pub params: ModelParams,
    pub grid: Arc<SpectralGrid>,
    pub gamma: f64,
    pub dispersion: ProfileDispersion,
    omega: Vec<f64>,
}

impl TravelingWaveProblem {
    pub fn new(
        params: ModelParams,
        wave_speed: f64,
        grid: Arc<SpectralGrid>,
        dispersion: ProfileDispersion,
    ) -> Result<Self> {
        let gamma = gamma_coefficient(wave_speed, &params)?;
        dispersion.check_exponent(params.exponent_s)?;
        let omega = match dispersion {
            ProfileDispersion::ExactGap => gap_table(&grid, &params)?,
            d => grid
                .wavenumbers()
                .iter()
                .map(|&k| d.value(k, &params))
                .collect::<Result<_>>()?,
        };
        Ok(Self {
            wave_speed,
            params,
            grid,
            gamma,
            dispersion,
            omega,
        })
    }

    /// Replaces the nonlinearity, e.g. to explore the repulsive branch.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// `Omega(k_j)` in FFT order.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Linear symbol `Omega(k) - hbar v k + mu`; the Nyquist bin carries no
    /// first derivative.
    pub fn linear_symbol(&self, mu: f64) -> Vec<f64> {
        let hv = self.params.hbar * self.wave_speed;
        let nyq = self.grid.nyquist_bin();
        self.omega
            .iter()
            .zip(self.grid.wavenumbers())
            .enumerate()
            .map(|(b, (w, k))| w + mu - if b == nyq { 0.0 } else { hv * k })
            .collect()
    }

    /// Squared amplitude of the plane wave `a e^{i q zeta}` solving the profile
    /// equation: `a^2 = (Omega(q) - hbar v q + mu) / (-gamma)`.
    pub fn plane_wave_amplitude(&self, q: f64, mu: f64) -> Result<f64> {
        let lin = self.dispersion.value(q, &self.params)? - self.params.hbar * self.wave_speed * q + mu;
        let a2 = lin / -self.gamma;
        if !(a2 > 0.0 && a2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "no plane wave at q = {q}: a^2 = {a2}"
            )));
        }
        Ok(a2.sqrt())
    }
}

fn residual_values(phi: &[Complex64], problem: &TravelingWaveProblem, lin: &[f64]) -> Vec<Complex64> {
    let mut r = problem.grid.apply_table(phi, lin);
    for (r, p) in r.iter_mut().zip(phi) {
        *r += problem.gamma * p.norm_sqr() * p;
    }
    r
}

/// `R = i hbar v phi' + Omega phi + gamma |phi|^2 phi`.
pub fn fgl_residual(phi: &Field, problem: &TravelingWaveProblem) -> Field {
    fgl_residual_shifted(phi, problem, 0.0)
}

/// `R = i hbar v phi' + mu phi + Omega phi + gamma |phi|^2 phi`.
pub fn fgl_residual_shifted(phi: &Field, problem: &TravelingWaveProblem, mu: f64) -> Field {
    let lin = problem.linear_symbol(mu);
    Field::from_parts(phi.grid().clone(), residual_values(phi.values(), problem, &lin))
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Petviashvili when the linear symbol is positive, Newton otherwise or on stall.
    #[default]
    Auto,
    Petviashvili,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Target for the max-norm residual.
    pub tolerance: f64,
    pub petviashvili_max_iter: usize,
    pub newton_max_iter: usize,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::Auto,
            tolerance: 1e-8,
            petviashvili_max_iter: 2000,
            newton_max_iter: 60,
            gmres_restart: 80,
            gmres_max_iter: 800,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProfileSolution {
    pub profile: Field,
    pub frequency_shift: f64,
    /// Max-norm residual of the returned profile.
    pub residual: f64,
    pub iterations: usize,
    /// Method that produced the profile.
    pub method: SolverMethod,
    /// `max |phi|` on the outer tenth of the domain over `max |phi|`.
    pub edge_ratio: f64,
}

/// Solves the profile equation from `initial_guess` with default options.
pub fn solve_profile(
    problem: &TravelingWaveProblem,
    initial_guess: &Field,
    frequency_shift: f64,
) -> Result<Field> {
    solve_profile_with(problem, initial_guess, frequency_shift, &SolverOptions::default())
        .map(|s| s.profile)
}

pub fn solve_profile_with(
    problem: &TravelingWaveProblem,
    initial_guess: &Field,
    mu: f64,
    options: &SolverOptions,
) -> Result<ProfileSolution> {
    if initial_guess.grid().as_ref() != problem.grid.as_ref() {
        return Err(Error::InvalidArgument("guess lives on a different grid".into()));
    }
    if !mu.is_finite() || !(options.tolerance > 0.0) {
        return Err(Error::InvalidArgument("frequency shift and tolerance must be finite".into()));
    }
    let scale = max_abs(initial_guess.values());
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::InvalidArgument("initial guess must be nonzero and finite".into()));
    }
    let lin = problem.linear_symbol(mu);
    let positive = lin.iter().all(|&l| l > 0.0);

    let (values, iterations, method) = match options.method {
        SolverMethod::Petviashvili => {
            let (v, it) = petviashvili(problem, &lin, initial_guess.values(), options)?;
            (v, it, SolverMethod::Petviashvili)
        }
        SolverMethod::Newton => {
            let (v, it) = newton(problem, &lin, initial_guess.values().to_vec(), options)?;
            (v, it, SolverMethod::Newton)
        }
        SolverMethod::Auto if positive => {
            match petviashvili(problem, &lin, initial_guess.values(), options) {
                Ok((v, it)) => (v, it, SolverMethod::Petviashvili),
                Err(Error::NoConvergence { .. }) => {
                    let (v, it) = newton(problem, &lin, initial_guess.values().to_vec(), options)?;
                    (v, it, SolverMethod::Newton)
                }
                Err(e) => return Err(e),
            }
        }
        SolverMethod::Auto => {
            let (v, it) = newton(problem, &lin, initial_guess.values().to_vec(), options)?;
            (v, it, SolverMethod::Newton)
        }
    };
    let residual = max_abs(&residual_values(&values, problem, &lin));
    let m = values.len();
    let edge = m / 10;
    let peak = max_abs(&values);
    let edge_ratio = max_abs(&values[..edge]).max(max_abs(&values[m - edge..])) / peak;
    Ok(ProfileSolution {
        profile: Field::from_parts(problem.grid.clone(), values),
        frequency_shift: mu,
        residual,
        iterations,
        method,
        edge_ratio,
    })
}

/// Petviashvili iteration for `L phi = -gamma |phi|^2 phi` with stabilising
/// exponent 3/2. Needs `L > 0`.
fn petviashvili(
    problem: &TravelingWaveProblem,
    lin: &[f64],
    guess: &[Complex64],
    options: &SolverOptions,
) -> Result<(Vec<Complex64>, usize)> {
    if lin.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidArgument(
            "Petviashvili iteration needs a positive linear symbol; raise the frequency shift".into(),
        ));
    }
    let grid = &problem.grid;
    let initial_size = max_abs(guess);
    let mut u_hat = guess.to_vec();
    grid.forward_in_place(&mut u_hat);
    let mut u = guess.to_vec();
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    for it in 1..=options.petviashvili_max_iter {
        let mut n_hat: Vec<Complex64> = u.iter().map(|z| -problem.gamma * z.norm_sqr() * z).collect();
        grid.forward_in_place(&mut n_hat);
        let num: f64 = u_hat.iter().zip(lin).map(|(z, l)| l * z.norm_sqr()).sum();
        let den: f64 = u_hat.iter().zip(&n_hat).map(|(a, b)| (a.conj() * b).re).sum();
        let stab = num / den;
        if !(stab > 0.0) || !stab.is_finite() {
            return Err(Error::TrivialAttractor { iterations: it });
        }
        let factor = stab.powf(1.5);
        for ((uh, nh), l) in u_hat.iter_mut().zip(&n_hat).zip(lin) {
            *uh = nh * (factor / l);
        }
        u.copy_from_slice(&u_hat);
        grid.inverse_in_place(&mut u);
        let size = max_abs(&u);
        if !(size > 1e-12 * initial_size) {
            return Err(Error::TrivialAttractor { iterations: it });
        }
        let res = max_abs(&residual_values(&u, problem, lin));
        if res <= 1e-3 * options.tolerance {
            return Ok((u, it));
        }
        if res < 0.5 * best {
            best = res;
            since_best = 0;
        } else {
            since_best += 1;
            // converged to round-off, or stalled
            if since_best >= 50 {
                if best <= options.tolerance && res <= options.tolerance {
                    return Ok((u, it));
                }
                return Err(Error::NoConvergence {
                    iterations: it,
                    residual: res,
                });
            }
        }
    }
    let res = max_abs(&residual_values(&u, problem, lin));
    if res <= options.tolerance {
        Ok((u, options.petviashvili_max_iter))
    } else {
        Err(Error::NoConvergence {
            iterations: options.petviashvili_max_iter,
            residual: res,
        })
    }
}

/// Newton iteration with GMRES inner solves, right-preconditioned by
/// `1 / (|L| + |gamma| max |phi|^2)`, and backtracking on the residual norm.
fn newton(
    problem: &TravelingWaveProblem,
    lin: &[f64],
    mut phi: Vec<Complex64>,
    options: &SolverOptions,
) -> Result<(Vec<Complex64>, usize)> {
    let grid = &problem.grid;
    let gamma = problem.gamma;
    let initial_size = max_abs(&phi);
    let l2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut f = residual_values(&phi, problem, lin);
    for it in 1..=options.newton_max_iter {
        let res = max_abs(&f);
        if res <= 1e-3 * options.tolerance {
            return Ok((phi, it - 1));
        }
        let shift = gamma.abs() * max_abs(&phi).powi(2);
        let precond: Vec<f64> = lin.iter().map(|l| 1.0 / (l.abs() + shift.max(1e-12))).collect();
        let apply_p = |v: &[Complex64]| grid.apply_table(v, &precond);
        let jac = |d: &[Complex64]| -> Vec<Complex64> {
            let mut out = grid.apply_table(d, lin);
            for ((o, p), d) in out.iter_mut().zip(&phi).zip(d) {
                *o += gamma * (2.0 * p.norm_sqr() * d + p * p * d.conj());
            }
            out
        };
        let rhs: Vec<Complex64> = f.iter().map(|z| -z).collect();
        let forcing = (0.1f64).min(res).max(1e-13);
        let y = gmres::gmres(
            |v| jac(&apply_p(v)),
            &rhs,
            forcing,
            options.gmres_restart,
            options.gmres_max_iter,
        );
        let delta = apply_p(&y);
        let f_norm = l2(&f);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<Complex64> = phi.iter().zip(&delta).map(|(p, d)| p + d * step).collect();
            let ft = residual_values(&trial, problem, lin);
            if l2(&ft) < (1.0 - 1e-4 * step) * f_norm {
                phi = trial;
                f = ft;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !(max_abs(&phi) > 1e-12 * initial_size) {
            return Err(Error::TrivialAttractor { iterations: it });
        }
        if !accepted {
            let res = max_abs(&f);
            if res <= options.tolerance {
                return Ok((phi, it));
            }
            return Err(Error::NoConvergence {
                iterations: it,
                residual: res,
            });
        }
    }
    let res = max_abs(&f);
    if res <= options.tolerance {
        Ok((phi, options.newton_max_iter))
    } else {
        Err(Error::NoConvergence {
            iterations: options.newton_max_iter,
            residual: res,
        })
    }
}
