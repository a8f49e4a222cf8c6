use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tempering::Mode;

/// Tuned hyperparameters for one problem family and schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPreset {
    pub mode: Mode,
    /// Start temperature (SA, λ-PT) or, for τ-PT, the ladder endpoints.
    pub tau: (f64, f64),
    /// Penalty weight (SA, τ-PT) or, for λ-PT, the ladder endpoints.
    pub lambda: (f64, f64),
}

pub const PARAM_PRESETS: &[&str] = &[
    "mvc-sa",
    "mis-sa",
    "sc-sa",
    "ca-sa",
    "mvc-tau-pt",
    "mis-tau-pt",
    "sc-tau-pt",
    "ca-tau-pt",
    "mvc-lambda-pt",
    "mis-lambda-pt",
    "sc-lambda-pt",
    "ca-lambda-pt",
];

/// Final tuned settings per family. The τ-PT and λ-PT entries are the
/// published ones, which mostly but not always follow [`ladder_rule`]
/// applied to the SA values.
///
/// [`ladder_rule`]: super::ladder_rule
pub fn param_preset(name: &str) -> Result<ParamPreset> {
    let sa = |t, l| ParamPreset {
        mode: Mode::Sa,
        tau: (t, t),
        lambda: (l, l),
    };
    let tpt = |lo, hi, l| ParamPreset {
        mode: Mode::TauPt,
        tau: (lo, hi),
        lambda: (l, l),
    };
    let lpt = |t, lo, hi| ParamPreset {
        mode: Mode::LambdaPt,
        tau: (t, t),
        lambda: (lo, hi),
    };
    Ok(match name {
        "mvc-sa" => sa(0.2, 1.0),
        "mis-sa" => sa(0.2, 2.0),
        "sc-sa" => sa(1.0, 5.0),
        "ca-sa" => sa(50.0, 300.0),
        "mvc-tau-pt" => tpt(0.1, 0.2, 1.0),
        "mis-tau-pt" => tpt(0.2, 0.4, 2.0),
        "sc-tau-pt" => tpt(1.0, 2.0, 5.0),
        "ca-tau-pt" => tpt(50.0, 100.0, 300.0),
        "mvc-lambda-pt" => lpt(0.2, 0.5, 1.0),
        "mis-lambda-pt" => lpt(0.2, 1.0, 2.0),
        "sc-lambda-pt" => lpt(1.0, 2.5, 5.0),
        "ca-lambda-pt" => lpt(50.0, 200.0, 400.0),
        other => {
            return Err(Error::ConfigInvalid(format!(
                "unknown parameter preset {other:?}; known: {}",
                PARAM_PRESETS.join(", ")
            )))
        }
    })
}

/// Candidate `(τ, λ)` lists searched per family during tuning.
pub fn grid_preset(family: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(match family {
        "mvc" | "mis" | "sc" => (vec![0.1, 0.2, 0.5, 1.0], vec![1.0, 2.0, 5.0]),
        "ca" => (vec![10.0, 20.0, 50.0, 100.0], vec![300.0, 400.0, 500.0]),
        other => return Err(Error::ConfigInvalid(format!("no tuning grid for {other:?}"))),
    })
}
