use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative gap in percent, `(obj − bks)/|bks| × 100`; negative means the
/// objective beats the baseline.
pub fn relative_gap(obj: f64, bks: f64) -> Result<f64> {
    if bks == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok((obj - bks) / bks.abs() * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub obj: f64,
    pub bks: f64,
    pub gap_percent: f64,
}

impl GapReport {
    pub fn new(obj: f64, bks: f64) -> Result<Self> {
        Ok(GapReport {
            obj,
            bks,
            gap_percent: relative_gap(obj, bks)?,
        })
    }
}
