//! Physical constants, the power-law coupling and its lattice dispersion.
//!
//! `J(k) = sum_{n != 0} e^{-ikn} J/|n|^s = 2J sum_{n>=1} cos(kn)/n^s` and the
//! spectral gap `G(k) = J(0) - J(k)`. Their small-`k` behaviour selects the
//! continuum model:
//!
//! | s         | G(k) as k -> 0          |
//! |-----------|-------------------------|
//! | 2         | pi J abs(k)             |
//! | (2, 3)    | D_s abs(k)^(s-1)        |
//! | 3         | -J k^2 ln abs(k)        |
//! | > 3       | J zeta(s-2) k^2 / 2     |
//!
//! The last row is the conventional continuum coefficient used by the
//! classical NLS scenario. The two-sided lattice sum itself behaves as
//! `J zeta(s-2) k^2`, so `spectral_gap` and `asymptotic_gap` differ by a factor
//! of two in that regime.

mod kernel;
pub(crate) mod lattice_sum;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, zeta};

pub use kernel::{kernel_k, kernel_profile};

/// Default accuracy target for the lattice sums.
pub const DEFAULT_SUM_TOL: f64 = 1e-12;

/// Physical constants shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    /// Reduced Planck constant.
    pub hbar: f64,
    /// Molecular mass per site.
    pub mass: f64,
    /// Elasticity constant `w` of the chain.
    pub elasticity: f64,
    /// Exciton-phonon coupling `chi`.
    pub coupling_chi: f64,
    /// On-site exciton energy `epsilon`.
    pub site_energy: f64,
    /// Interaction constant `J`.
    pub interaction_j: f64,
    /// Power-law exponent `s`.
    pub exponent_s: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            elasticity: 1.0,
            coupling_chi: 0.0,
            site_energy: 0.0,
            interaction_j: 1.0,
            exponent_s: 2.5,
        }
    }
}

impl ModelParams {
    pub fn with_exponent(mut self, s: f64) -> Self {
        self.exponent_s = s;
        self
    }

    /// Checks the invariants every solver relies on; `s > 1` is checked by
    /// the operations that need it.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("elasticity", self.elasticity),
            ("coupling_chi", self.coupling_chi),
            ("site_energy", self.site_energy),
            ("interaction_j", self.interaction_j),
            ("exponent_s", self.exponent_s),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        for (name, v) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("elasticity", self.elasticity),
        ] {
            if v <= 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Sound velocity `sqrt(w / m)`.
    pub fn sound_speed(&self) -> f64 {
        (self.elasticity / self.mass).sqrt()
    }

    pub(crate) fn require_convergent(&self) -> Result<()> {
        if self.exponent_s.is_nan() || self.exponent_s <= 1.0 {
            Err(Error::SumDivergence(self.exponent_s))
        } else {
            Ok(())
        }
    }
}

/// Small-`k` regime of the spectral gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    /// 1 < s < 2: convergent sums but outside the modelled window.
    Sublinear,
    /// s = 2, Hilbert-transform dispersion.
    Hilbert,
    /// 2 < s < 3, Riesz fractional dispersion.
    Fractional,
    /// s = 3, logarithmic correction.
    Logarithmic,
    /// s > 3, ordinary second derivative.
    Quadratic,
}

/// Regime tag together with its leading-order coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub kind: RegimeKind,
    /// `pi J`, `D_s`, `J` (multiplying `-k^2 ln|k|`) or `J zeta(s-2)/2`;
    /// `None` in the sublinear window.
    pub coefficient: Option<f64>,
}

pub fn classify_regime(s: f64) -> Result<RegimeKind> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::SumDivergence(s));
    }
    Ok(if s < 2.0 {
        RegimeKind::Sublinear
    } else if s == 2.0 {
        RegimeKind::Hilbert
    } else if s < 3.0 {
        RegimeKind::Fractional
    } else if s == 3.0 {
        RegimeKind::Logarithmic
    } else {
        RegimeKind::Quadratic
    })
}

pub fn regime(params: &ModelParams) -> Result<Regime> {
    let kind = classify_regime(params.exponent_s)?;
    let j = params.interaction_j;
    let coefficient = match kind {
        RegimeKind::Sublinear => None,
        RegimeKind::Hilbert | RegimeKind::Fractional => Some(fractional_coefficient(params)?),
        RegimeKind::Logarithmic => Some(j),
        RegimeKind::Quadratic => Some(quadratic_coefficient(params)),
    };
    Ok(Regime { kind, coefficient })
}

/// `J_{n-m} = J / |n - m|^s`.
pub fn coupling(n: i64, m: i64, params: &ModelParams) -> Result<f64> {
    if n == m {
        return Err(Error::SelfCoupling(n));
    }
    let d = (n - m).unsigned_abs() as f64;
    Ok(params.interaction_j * d.powf(-params.exponent_s))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be > 0, got {tol}")))
    }
}

/// Exact lattice dispersion `J(k)`, accurate to about `tol * J(0)`.
pub fn lattice_dispersion(k: f64, params: &ModelParams, tol: f64) -> Result<f64> {
    params.require_convergent()?;
    check_tol(tol)?;
    let sums = lattice_sum::lattice_sums(k, params.exponent_s, tol);
    Ok(2.0 * params.interaction_j * sums.cosine)
}

/// `J(0) = 2 J zeta(s)`.
pub fn dispersion_at_zero(params: &ModelParams) -> Result<f64> {
    params.require_convergent()?;
    Ok(2.0 * params.interaction_j * zeta(params.exponent_s))
}

/// Spectral gap `G(k) = J(0) - J(k)`, summed from non-negative terms.
pub fn spectral_gap(k: f64, params: &ModelParams, tol: f64) -> Result<f64> {
    params.require_convergent()?;
    check_tol(tol)?;
    let sums = lattice_sum::lattice_sums(k, params.exponent_s, tol);
    Ok(2.0 * params.interaction_j * sums.gap)
}

/// `D_s = pi J / (Gamma(s) sin(pi (s - 1) / 2))` on `2 <= s < 3`.
pub fn fractional_coefficient(params: &ModelParams) -> Result<f64> {
    let s = params.exponent_s;
    if s == 3.0 {
        return Err(Error::LogarithmicSingularity("D_s"));
    }
    if !(2.0..3.0).contains(&s) {
        return Err(Error::OutOfDomain {
            what: "D_s",
            s,
            domain: "2 <= s < 3",
        });
    }
    Ok(PI * params.interaction_j / (gamma(s) * (PI * (s - 1.0) / 2.0).sin()))
}

/// `J zeta(s - 2) / 2`, the printed coefficient of the s > 3 asymptote.
pub fn quadratic_coefficient(params: &ModelParams) -> f64 {
    params.interaction_j * zeta(params.exponent_s - 2.0) / 2.0
}

/// Leading small-`k` asymptote of `G(k)` for the regime of `s`.
pub fn asymptotic_gap(k: f64, params: &ModelParams) -> Result<f64> {
    let s = params.exponent_s;
    let j = params.interaction_j;
    let kind = classify_regime(s)?;
    let ak = k.abs();
    match kind {
        RegimeKind::Sublinear => Err(Error::UnsupportedRegime(s)),
        RegimeKind::Hilbert => Ok(PI * j * ak),
        RegimeKind::Fractional => Ok(fractional_coefficient(params)? * ak.powf(s - 1.0)),
        RegimeKind::Logarithmic => {
            if ak == 0.0 {
                Err(Error::InvalidArgument(
                    "the logarithmic asymptote is singular at k = 0".into(),
                ))
            } else {
                Ok(-j * k * k * ak.ln())
            }
        }
        RegimeKind::Quadratic => Ok(quadratic_coefficient(params) * k * k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(j: f64, s: f64) -> ModelParams {
        ModelParams {
            interaction_j: j,
            exponent_s: s,
            ..ModelParams::default()
        }
    }

    /// Brute-force oracle: direct sum with the integral tail estimate.
    fn brute_cos_sum(k: f64, s: f64, terms: usize) -> f64 {
        let head: f64 = (1..=terms)
            .map(|n| (k * n as f64).cos() * (n as f64).powf(-s))
            .sum();
        head
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(coupling(0, 1, &params(1.0, 2.5)).unwrap(), 1.0);
        assert_eq!(coupling(0, 2, &params(1.0, 2.0)).unwrap(), 0.25);
        let c = coupling(3, 0, &params(2.0, 3.0)).unwrap();
        assert!((c - 2.0 / 27.0).abs() < 1e-16);
        assert_eq!(
            coupling(4, 4, &params(1.0, 2.0)),
            Err(Error::SelfCoupling(4))
        );
    }

    #[test]
    fn dispersion_closed_forms_s4() {
        let p = params(1.0, 4.0);
        let j0 = lattice_dispersion(0.0, &p, DEFAULT_SUM_TOL).unwrap();
        assert!((j0 - PI.powi(4) / 45.0).abs() < 1e-13);
        let jpi = lattice_dispersion(PI, &p, DEFAULT_SUM_TOL).unwrap();
        assert!((jpi + 7.0 * PI.powi(4) / 360.0).abs() < 1e-13);
        // cross-check with a 10^6-term brute-force sum
        let brute = 2.0 * brute_cos_sum(PI, 4.0, 1_000_000);
        assert!((jpi - brute).abs() < 1e-12);
    }

    #[test]
    fn nearest_neighbour_limit() {
        let p = params(1.0, 50.0);
        let jpi = lattice_dispersion(PI, &p, DEFAULT_SUM_TOL).unwrap();
        assert!((jpi + 2.0).abs() < 1e-12);
    }

    #[test]
    fn gap_examples() {
        let p = params(1.0, 4.0);
        assert_eq!(spectral_gap(0.0, &p, DEFAULT_SUM_TOL).unwrap(), 0.0);
        let g = spectral_gap(PI, &p, DEFAULT_SUM_TOL).unwrap();
        assert!((g - (PI.powi(4) / 45.0 + 7.0 * PI.powi(4) / 360.0)).abs() < 1e-12);
    }

    #[test]
    fn divergent_exponent_rejected() {
        for s in [1.0, 0.5, -2.0] {
            let p = params(1.0, s);
            assert_eq!(
                lattice_dispersion(0.3, &p, 1e-12),
                Err(Error::SumDivergence(s))
            );
            assert!(spectral_gap(0.3, &p, 1e-12).is_err());
            assert!(classify_regime(s).is_err());
        }
        assert!(lattice_dispersion(0.3, &params(1.0, 2.5), 0.0).is_err());
    }

    #[test]
    fn fractional_coefficient_values() {
        let d2 = fractional_coefficient(&params(1.0, 2.0)).unwrap();
        assert!((d2 - PI).abs() < 1e-14);
        let d25 = fractional_coefficient(&params(1.0, 2.5)).unwrap();
        let expected = PI / (0.75 * PI.sqrt() * (2f64.sqrt() / 2.0));
        assert!((d25 - expected).abs() < 1e-13);
        assert!((d25 - 3.342_171_03).abs() < 1e-7);
        let d25j2 = fractional_coefficient(&params(2.0, 2.5)).unwrap();
        assert!((d25j2 - 2.0 * d25).abs() < 1e-13);
        assert_eq!(
            fractional_coefficient(&params(1.0, 3.0)),
            Err(Error::LogarithmicSingularity("D_s"))
        );
        assert!(matches!(
            fractional_coefficient(&params(1.0, 1.9)),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            fractional_coefficient(&params(1.0, 3.5)),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn continuity_of_coefficient_at_two() {
        let d = fractional_coefficient(&params(1.0, 2.001)).unwrap();
        assert!((d / PI - 1.0).abs() < 0.005);
    }

    #[test]
    fn asymptote_examples() {
        let q = asymptotic_gap(0.01, &params(1.0, 4.0)).unwrap();
        assert!((q - PI * PI / 12.0 * 1e-4).abs() < 1e-15);
        assert!((q - 8.224_670e-5).abs() < 1e-11);
        let h = asymptotic_gap(0.1, &params(1.0, 2.0)).unwrap();
        assert!((h - 0.314_159_3).abs() < 1e-7);
        let l = asymptotic_gap(0.01, &params(1.0, 3.0)).unwrap();
        assert!((l - 4.605_170e-4).abs() < 1e-10);
        // evenness of the logarithmic branch
        let lm = asymptotic_gap(-0.01, &params(1.0, 3.0)).unwrap();
        assert_eq!(l, lm);
        assert_eq!(
            asymptotic_gap(0.01, &params(1.0, 1.5)),
            Err(Error::UnsupportedRegime(1.5))
        );
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(2.0).unwrap(), RegimeKind::Hilbert);
        assert_eq!(classify_regime(2.5).unwrap(), RegimeKind::Fractional);
        assert_eq!(classify_regime(3.0).unwrap(), RegimeKind::Logarithmic);
        assert_eq!(classify_regime(7.0).unwrap(), RegimeKind::Quadratic);
        assert_eq!(classify_regime(1.5).unwrap(), RegimeKind::Sublinear);
        let r = regime(&params(1.0, 2.0)).unwrap();
        assert!((r.coefficient.unwrap() - PI).abs() < 1e-14);
        assert_eq!(regime(&params(1.0, 1.5)).unwrap().coefficient, None);
    }

    #[test]
    fn nearest_neighbour_gap_bound_is_attained_near_half_pi() {
        // At k = pi/2 the n = 2 term alone contributes 4 J 2^{-s}.
        let p = params(1.0, 10.0);
        let g = spectral_gap(PI / 2.0, &p, DEFAULT_SUM_TOL).unwrap();
        assert!(g - 2.0 > 3.9 * 2f64.powf(-10.0));
    }

    #[test]
    fn nearest_neighbour_gap_for_large_s() {
        for s in [10.0, 14.0, 20.0] {
            let p = params(1.0, s);
            for i in 0..=64 {
                let k = -PI + 2.0 * PI * i as f64 / 64.0;
                let g = spectral_gap(k, &p, DEFAULT_SUM_TOL).unwrap();
                let nn = 2.0 * (1.0 - k.cos());
                // sum over n >= 2 of 2 (1 - cos kn) / n^s is at most 4 (zeta(s) - 1)
                let bound = 4.0 * (zeta(s) - 1.0);
                assert!((g - nn).abs() <= bound, "s={s} k={k}");
            }
        }
    }
}
