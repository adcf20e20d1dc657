//! The four lifetime model families handled by the fitting and comparison
//! machinery: exponential (ED), gamma (GD), xgamma (Xg), and extended
//! xgamma (EXg).
//!
//! ED, GD, and Xg carry their own closed-form densities and distribution
//! functions rather than routing through the EXg kernel, so the nesting
//! reductions (β = 0, α = 1) can be cross-checked between two independent
//! code paths.

use std::fmt;

use crate::error::Error;
use crate::exg::ExgParams;
use crate::specfn::{ln_gamma, reg_lower_gamma};

/// Model family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Exponential with rate θ.
    Exponential,
    /// Gamma with shape α and rate θ.
    Gamma,
    /// xgamma with rate θ (the EXg sub-model α = β = 1).
    Xgamma,
    /// Extended xgamma with shape α, rate θ, and weight β.
    ExtendedXgamma,
}

impl ModelKind {
    /// All four families, in the conventional comparison order.
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Exponential,
        ModelKind::Gamma,
        ModelKind::Xgamma,
        ModelKind::ExtendedXgamma,
    ];

    /// Number of free parameters (the k in AIC/BIC penalties).
    pub fn param_count(self) -> usize {
        match self {
            ModelKind::Exponential | ModelKind::Xgamma => 1,
            ModelKind::Gamma => 2,
            ModelKind::ExtendedXgamma => 3,
        }
    }

    /// Short machine name used on the command line and in JSON output.
    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::Exponential => "ed",
            ModelKind::Gamma => "gd",
            ModelKind::Xgamma => "xg",
            ModelKind::ExtendedXgamma => "exg",
        }
    }

    /// Human-readable name used in tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Exponential => "Exponential",
            ModelKind::Gamma => "Gamma",
            ModelKind::Xgamma => "xgamma",
            ModelKind::ExtendedXgamma => "Extended xgamma",
        }
    }

    /// Parses the short machine name. Lowercase exact match only — the
    /// accepted spellings are the stable external contract.
    pub fn from_short_name(name: &str) -> Option<Self> {
        match name {
            "ed" => Some(ModelKind::Exponential),
            "gd" => Some(ModelKind::Gamma),
            "xg" => Some(ModelKind::Xgamma),
            "exg" => Some(ModelKind::ExtendedXgamma),
            _ => None,
        }
    }

    /// Parameter names in declaration order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Exponential | ModelKind::Xgamma => &["theta"],
            ModelKind::Gamma => &["alpha", "theta"],
            ModelKind::ExtendedXgamma => &["alpha", "theta", "beta"],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// A validated parameter vector for one model family.
///
/// Parameter order follows [`ModelKind::param_names`]: ED/Xg hold `[θ]`,
/// GD `[α, θ]`, EXg `[α, θ, β]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    kind: ModelKind,
    values: Vec<f64>,
}

impl ModelParams {
    /// Validates a parameter vector against its family's constraints.
    pub fn new(kind: ModelKind, values: Vec<f64>) -> Result<Self, Error> {
        if values.len() != kind.param_count() {
            return Err(Error::InvalidParam("wrong number of parameters for model"));
        }
        match kind {
            ModelKind::Exponential | ModelKind::Xgamma => {
                if !values[0].is_finite() || values[0] <= 0.0 {
                    return Err(Error::InvalidParam("rate theta must be finite and > 0"));
                }
            }
            ModelKind::Gamma => {
                if !values[0].is_finite() || values[0] <= 0.0 {
                    return Err(Error::InvalidParam("shape alpha must be finite and > 0"));
                }
                if !values[1].is_finite() || values[1] <= 0.0 {
                    return Err(Error::InvalidParam("rate theta must be finite and > 0"));
                }
            }
            ModelKind::ExtendedXgamma => {
                // Full validation, including θ + β overflow.
                ExgParams::new(values[0], values[1], values[2])?;
            }
        }
        Ok(Self { kind, values })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Parameter values in declaration order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The equivalent EXg parameter triple.
    ///
    /// ED(θ) ↦ (1, θ, 0); GD(α, θ) ↦ (α, θ, 0); Xg(θ) ↦ (1, θ, 1); EXg is
    /// itself. Used by the sampler and curve evaluation so that every family
    /// shares one kernel.
    pub fn as_exg(&self) -> ExgParams {
        let triple = match self.kind {
            ModelKind::Exponential => (1.0, self.values[0], 0.0),
            ModelKind::Gamma => (self.values[0], self.values[1], 0.0),
            ModelKind::Xgamma => (1.0, self.values[0], 1.0),
            ModelKind::ExtendedXgamma => (self.values[0], self.values[1], self.values[2]),
        };
        ExgParams::new(triple.0, triple.1, triple.2)
            .expect("validated model parameters embed into the EXg family")
    }

    /// Log-density at x > 0, using each family's own closed form.
    pub fn log_pdf(&self, x: f64) -> Result<f64, Error> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::Domain("argument must be finite and > 0"));
        }
        match self.kind {
            ModelKind::Exponential => {
                let t = self.values[0];
                Ok(t.ln() - t * x)
            }
            ModelKind::Gamma => {
                let (a, t) = (self.values[0], self.values[1]);
                Ok(a * t.ln() - ln_gamma(a)? + (a - 1.0) * x.ln() - t * x)
            }
            ModelKind::Xgamma => {
                // f(x) = θ²/(1 + θ) · (1 + θx²/2) · e^{−θx}
                let t = self.values[0];
                Ok(2.0 * t.ln() - t.ln_1p() + (0.5 * t * x * x).ln_1p() - t * x)
            }
            ModelKind::ExtendedXgamma => self.as_exg().log_pdf(x),
        }
    }

    /// Distribution function at x ≥ 0, using each family's own closed form.
    pub fn cdf(&self, x: f64) -> Result<f64, Error> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Domain("argument must be finite and >= 0"));
        }
        match self.kind {
            ModelKind::Exponential => Ok(-(-self.values[0] * x).exp_m1()),
            ModelKind::Gamma => reg_lower_gamma(self.values[0], self.values[1] * x)
                .map_err(Error::from),
            ModelKind::Xgamma => {
                // F(x) = 1 − (1 + θ + θx + θ²x²/2) e^{−θx} / (1 + θ)
                let t = self.values[0];
                let head = (1.0 + t + t * x + 0.5 * t * t * x * x) / (1.0 + t);
                Ok(1.0 - head * (-t * x).exp())
            }
            ModelKind::ExtendedXgamma => self.as_exg().cdf(x),
        }
    }

    /// Model mean, evaluated through the EXg embedding.
    pub fn mean(&self) -> f64 {
        self.as_exg().mean()
    }
}
