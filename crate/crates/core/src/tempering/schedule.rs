use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponential cooling `τ(t) = τ₀·γ^t`, optionally reset to `τ₀` every
/// `reheat_period` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct AnnealSchedule {
    tau0: f64,
    gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    reheat_period: Option<u64>,
}

#[derive(Deserialize)]
struct RawSchedule {
    tau0: f64,
    gamma: Option<f64>,
    halving_steps: Option<f64>,
    reheat_period: Option<u64>,
}

impl TryFrom<RawSchedule> for AnnealSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        let schedule = match (raw.gamma, raw.halving_steps) {
            (Some(g), None) => AnnealSchedule::new(raw.tau0, g)?,
            (None, Some(h)) => AnnealSchedule::from_halving_steps(raw.tau0, h)?,
            (None, None) => AnnealSchedule::constant(raw.tau0)?,
            (Some(_), Some(_)) => {
                return Err(Error::ConfigInvalid(
                    "give either gamma or halving_steps, not both".into(),
                ))
            }
        };
        match raw.reheat_period {
            Some(p) => schedule.with_reheat(p),
            None => Ok(schedule),
        }
    }
}

impl AnnealSchedule {
    pub fn new(tau0: f64, gamma: f64) -> Result<Self> {
        if !(tau0 > 0.0 && tau0.is_finite()) {
            return Err(Error::NonPositiveTemperature(tau0));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::ConfigInvalid(format!(
                "decay rate must lie in (0, 1], got {gamma}"
            )));
        }
        Ok(AnnealSchedule {
            tau0,
            gamma,
            reheat_period: None,
        })
    }

    /// Fixed temperature (`γ = 1`).
    pub fn constant(tau0: f64) -> Result<Self> {
        Self::new(tau0, 1.0)
    }

    /// `γ = 0.5^{1/steps}`: the temperature halves every `steps` steps.
    pub fn from_halving_steps(tau0: f64, steps: f64) -> Result<Self> {
        if steps.is_nan() || steps <= 0.0 {
            return Err(Error::ConfigInvalid(format!(
                "halving horizon must be positive, got {steps}"
            )));
        }
        Self::new(tau0, 0.5f64.powf(1.0 / steps))
    }

    pub fn with_reheat(mut self, period: u64) -> Result<Self> {
        if period == 0 {
            return Err(Error::ConfigInvalid("reheat period must be at least 1".into()));
        }
        self.reheat_period = Some(period);
        Ok(self)
    }

    pub fn without_reheat(mut self) -> Self {
        self.reheat_period = None;
        self
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn reheat_period(&self) -> Option<u64> {
        self.reheat_period
    }

    fn effective_step(&self, t: u64) -> u64 {
        match self.reheat_period {
            Some(p) => t % p,
            None => t,
        }
    }

    /// Temperature at step `t` for a chain starting at `start`, in log form
    /// `exp(ln start + t·ln γ)`.
    pub fn tau_from(&self, start: f64, t: u64) -> f64 {
        let t = self.effective_step(t) as f64;
        (start.ln() + t * self.gamma.ln()).exp()
    }

    /// `τ(t)`.
    pub fn anneal(&self, t: u64) -> f64 {
        self.tau_from(self.tau0, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderKind {
    Temperature,
    Penalty,
}

/// Per-chain tempering values (temperatures or penalty weights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLadder")]
pub struct Ladder {
    values: Vec<f64>,
    kind: LadderKind,
}

#[derive(Deserialize)]
struct RawLadder {
    values: Vec<f64>,
    kind: LadderKind,
}

impl TryFrom<RawLadder> for Ladder {
    type Error = Error;

    fn try_from(raw: RawLadder) -> Result<Self> {
        Ladder::from_values(raw.values, raw.kind)
    }
}

impl Ladder {
    /// Accepts any positive, monotone (non-strict) sequence. Equal values are
    /// allowed so degenerate ensembles can be expressed.
    pub fn from_values(values: Vec<f64>, kind: LadderKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ZeroChains);
        }
        if let Some(&bad) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(match kind {
                LadderKind::Temperature => Error::NonPositiveTemperature(bad),
                LadderKind::Penalty => Error::NonPositivePenalty(bad),
            });
        }
        let up = values.windows(2).all(|w| w[0] <= w[1]);
        let down = values.windows(2).all(|w| w[0] >= w[1]);
        if !(up || down) {
            return Err(Error::ConfigInvalid("ladder values must be monotone".into()));
        }
        Ok(Ladder { values, kind })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> LadderKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Geometric ladder `lo·(hi/lo)^{i/(B−1)}`, `i = 0..B`.
pub fn make_ladder(lo: f64, hi: f64, chains: usize, kind: LadderKind) -> Result<Ladder> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidRange { lo, hi });
    }
    if chains == 0 {
        return Err(Error::ZeroChains);
    }
    let values = if chains == 1 {
        vec![lo]
    } else {
        let last = (chains - 1) as f64;
        (0..chains)
            .map(|i| {
                if i == 0 {
                    lo
                } else if i == chains - 1 {
                    hi
                } else {
                    lo * (hi / lo).powf(i as f64 / last)
                }
            })
            .collect()
    };
    Ladder::from_values(values, kind)
}
