use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Continuum model being integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Nonlocal exciton equation with the full `G(k)` plus the strain wave equation.
    GeneralNonlocal,
    /// Riesz dispersion `D_s |k|^{s-1}` plus the strain wave equation, `2 < s < 3`.
    FractionalZakharov,
    /// Hilbert dispersion `pi J |k|` plus the strain wave equation, `s = 2`.
    HilbertZakharov,
    /// Nonlinear fractional Schroedinger equation, `2 < s < 3`.
    Nlfse,
    /// Nonlinear Hilbert-Schroedinger equation, `s = 2`.
    HilbertNls,
    /// Cubic NLS with `A k^2` dispersion, `s > 3`.
    ClassicalNls,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::GeneralNonlocal => "general_nonlocal",
            Self::FractionalZakharov => "fractional_zakharov",
            Self::HilbertZakharov => "hilbert_zakharov",
            Self::Nlfse => "nlfse",
            Self::HilbertNls => "hilbert_nls",
            Self::ClassicalNls => "classical_nls",
        }
    }

    pub const ALL: [ScenarioKind; 6] = [
        Self::GeneralNonlocal,
        Self::FractionalZakharov,
        Self::HilbertZakharov,
        Self::Nlfse,
        Self::HilbertNls,
        Self::ClassicalNls,
    ];

    /// Whether the strain field is dynamic (Zakharov type) or slaved.
    pub fn has_phonons(self) -> bool {
        matches!(
            self,
            Self::GeneralNonlocal | Self::FractionalZakharov | Self::HilbertZakharov
        )
    }

    /// Exponent window of the reduced model.
    pub fn check_exponent(self, s: f64) -> Result<()> {
        let incompatible = |rule| {
            Err(Error::Incompatible {
                kind: self.name(),
                s,
                rule,
            })
        };
        match self {
            Self::GeneralNonlocal => {
                if s.is_nan() || s <= 1.0 {
                    return Err(Error::SumDivergence(s));
                }
            }
            Self::FractionalZakharov | Self::Nlfse => {
                if s == 3.0 {
                    return incompatible("requires 2 < s < 3; D_s is singular at s = 3");
                }
                if !(s > 2.0 && s < 3.0) {
                    return incompatible("requires 2 < s < 3");
                }
            }
            Self::HilbertZakharov | Self::HilbertNls => {
                if s != 2.0 {
                    return incompatible("requires s = 2");
                }
            }
            Self::ClassicalNls => {
                if !(s > 3.0) {
                    return incompatible("requires s > 3");
                }
            }
        }
        Ok(())
    }
}

/// Which dispersion symbol drives the exciton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionMode {
    /// Exact lattice gap `G(k)`; the grid spacing is the lattice constant.
    ExactGap,
    /// Leading small-`k` asymptote of the regime.
    Asymptotic,
}

/// Nonlinear and source coefficients of the reduced equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    /// `g = 2 chi^2 / w`, from substituting the stationary strain into `chi sigma psi`.
    #[default]
    Corrected,
    /// `g = 2 chi / w` as printed.
    Literal,
}

/// Per-mode integrator of the strain wave equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhononIntegrator {
    /// Exact driven-oscillator propagator; `|psi|^2` is constant over the substep.
    #[default]
    Exact,
    /// Velocity Verlet with the source frozen over the step.
    VelocityVerlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub dispersion_mode: DispersionMode,
    /// Overrides the nonlinearity `g` of the NLS-type kinds.
    pub nonlinearity_g: Option<f64>,
    pub coefficients: Coefficients,
    /// `lambda = Lambda - J(0)`; zero evolves the gauge-transformed field.
    pub lambda_shift: f64,
    /// Prefactor `f` of the strain source `f chi / m d_xx |psi|^2`.
    pub source_factor: f64,
    pub phonon_integrator: PhononIntegrator,
}

impl ScenarioSpec {
    /// Defaults: exact gap for the general system, asymptotic dispersion for
    /// the reduced models, source prefactor 2.
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            dispersion_mode: if kind == ScenarioKind::GeneralNonlocal {
                DispersionMode::ExactGap
            } else {
                DispersionMode::Asymptotic
            },
            nonlinearity_g: None,
            coefficients: Coefficients::Corrected,
            lambda_shift: 0.0,
            source_factor: 2.0,
            phonon_integrator: PhononIntegrator::Exact,
        }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        params.validate()?;
        self.kind.check_exponent(params.exponent_s)?;
        for (name, v) in [
            ("lambda_shift", self.lambda_shift),
            ("source_factor", self.source_factor),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        if let Some(g) = self.nonlinearity_g {
            if !g.is_finite() {
                return Err(Error::InvalidArgument("nonlinearity_g must be finite".into()));
            }
        }
        Ok(())
    }

    /// `g` of the NLS-type kinds.
    pub fn nonlinearity(&self, params: &ModelParams) -> f64 {
        self.nonlinearity_g
            .unwrap_or_else(|| effective_nonlinearity(params, self.coefficients))
    }
}

/// Cubic coefficient `g` in `i hbar phi_t = ... - g |phi|^2 phi`.
pub fn effective_nonlinearity(params: &ModelParams, coefficients: Coefficients) -> f64 {
    let chi = params.coupling_chi;
    match coefficients {
        Coefficients::Corrected => 2.0 * chi * chi / params.elasticity,
        Coefficients::Literal => 2.0 * chi / params.elasticity,
    }
}
