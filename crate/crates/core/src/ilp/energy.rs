use serde::{Deserialize, Serialize};

use super::IlpInstance;
use crate::error::{Error, Result};

/// Power applied to each row's constraint violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(try_from = "u32", into = "u32")]
pub enum PenaltyExponent {
    #[default]
    Linear,
    Squared,
}

impl PenaltyExponent {
    /// `max(0, excess)^p`.
    #[inline]
    pub fn penalty(self, excess: f64) -> f64 {
        if excess <= 0.0 {
            return 0.0;
        }
        match self {
            PenaltyExponent::Linear => excess,
            PenaltyExponent::Squared => excess * excess,
        }
    }
}

impl TryFrom<u32> for PenaltyExponent {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        match p {
            1 => Ok(PenaltyExponent::Linear),
            2 => Ok(PenaltyExponent::Squared),
            other => Err(Error::InvalidExponent(other)),
        }
    }
}

impl From<PenaltyExponent> for u32 {
    fn from(p: PenaltyExponent) -> u32 {
        match p {
            PenaltyExponent::Linear => 1,
            PenaltyExponent::Squared => 2,
        }
    }
}

/// Penalty weight and exponent of the energy `c·x + λ·P(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct EnergyParams {
    lambda: f64,
    #[serde(default)]
    exponent: PenaltyExponent,
}

#[derive(Deserialize)]
struct RawParams {
    lambda: f64,
    #[serde(default)]
    exponent: PenaltyExponent,
}

impl TryFrom<RawParams> for EnergyParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        EnergyParams::new(raw.lambda, raw.exponent)
    }
}

impl EnergyParams {
    pub fn new(lambda: f64, exponent: PenaltyExponent) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::NonPositivePenalty(lambda));
        }
        Ok(EnergyParams { lambda, exponent })
    }

    pub fn linear(lambda: f64) -> Result<Self> {
        Self::new(lambda, PenaltyExponent::Linear)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn exponent(&self) -> PenaltyExponent {
        self.exponent
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.exponent)
    }
}

/// Absolute slack allowed on each row when deciding feasibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasTolerance(f64);

impl FeasTolerance {
    pub const DEFAULT_EPS: f64 = 1e-6;

    pub fn new(eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::ConfigInvalid(format!(
                "feasibility tolerance must be finite and nonnegative, got {eps}"
            )));
        }
        Ok(FeasTolerance(eps))
    }

    pub fn exact() -> Self {
        FeasTolerance(0.0)
    }

    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for FeasTolerance {
    fn default() -> Self {
        FeasTolerance(Self::DEFAULT_EPS)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub total: f64,
    pub per_row: Vec<f64>,
}

impl IlpInstance {
    pub fn violation(&self, x: &[bool], exponent: PenaltyExponent) -> Result<Violation> {
        let act = self.activities(x)?;
        let per_row: Vec<f64> = act
            .iter()
            .zip(self.rhs())
            .map(|(a, b)| exponent.penalty(a - b))
            .collect();
        Ok(Violation {
            total: per_row.iter().sum(),
            per_row,
        })
    }

    /// `c·x + λ·Σ_k max(0, A_k x − b_k)^p`.
    pub fn energy(&self, x: &[bool], params: EnergyParams) -> Result<f64> {
        let viol = self.violation(x, params.exponent())?;
        Ok(self.objective_unchecked(x) + params.lambda() * viol.total)
    }

    pub fn is_feasible(&self, x: &[bool], tol: FeasTolerance) -> Result<bool> {
        let act = self.activities(x)?;
        Ok(act.iter().zip(self.rhs()).all(|(a, b)| *a <= b + tol.eps()))
    }
}
