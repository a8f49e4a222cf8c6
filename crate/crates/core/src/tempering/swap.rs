use crate::error::{Error, Result};

fn positive(v: f64, err: fn(f64) -> Error) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(err(v))
    }
}

/// Log acceptance of exchanging states between temperatures `tau_i` and
/// `tau_j` at a shared penalty: `(1/τ_i − 1/τ_j)(E_i − E_j)`.
pub fn log_swap_ratio_tau(e_i: f64, e_j: f64, tau_i: f64, tau_j: f64) -> Result<f64> {
    positive(tau_i, Error::NonPositiveTemperature)?;
    positive(tau_j, Error::NonPositiveTemperature)?;
    let d_beta = 1.0 / tau_i - 1.0 / tau_j;
    if d_beta == 0.0 {
        return Ok(0.0);
    }
    Ok(d_beta * (e_i - e_j))
}

/// Temperature-swap acceptance `min(1, exp(Δβ·ΔE))`. The expression is
/// symmetric under exchanging the two chains, so the argument order only
/// needs to pair each energy with its own temperature.
pub fn swap_prob_tau(e_i: f64, e_j: f64, tau_i: f64, tau_j: f64) -> Result<f64> {
    Ok(log_swap_ratio_tau(e_i, e_j, tau_i, tau_j)?.min(0.0).exp())
}

/// Log acceptance of exchanging states between penalty weights `lam_i` and
/// `lam_j` at a shared temperature: `(λ_j − λ_i)(P_j − P_i)/τ`, where the
/// `P` are total violations under the same exponent as the energy.
pub fn log_swap_ratio_lambda(p_i: f64, p_j: f64, lam_i: f64, lam_j: f64, tau: f64) -> Result<f64> {
    positive(tau, Error::NonPositiveTemperature)?;
    positive(lam_i, Error::NonPositivePenalty)?;
    positive(lam_j, Error::NonPositivePenalty)?;
    let d_lambda = lam_j - lam_i;
    let d_p = p_j - p_i;
    if d_lambda == 0.0 || d_p == 0.0 {
        return Ok(0.0);
    }
    Ok(d_lambda * d_p / tau)
}

/// Penalty-swap acceptance `min(1, exp(Δλ·ΔP/τ))`.
pub fn swap_prob_lambda(p_i: f64, p_j: f64, lam_i: f64, lam_j: f64, tau: f64) -> Result<f64> {
    Ok(log_swap_ratio_lambda(p_i, p_j, lam_i, lam_j, tau)?.min(0.0).exp())
}

/// Adjacent pairs (0-based) attempted in swap round `round` of the
/// deterministic even/odd scheme: even rounds `(0,1), (2,3), …`, odd rounds
/// `(1,2), (3,4), …`. Pairs within a round are disjoint.
pub fn deo_pairs(round: u64, chains: usize) -> Vec<(usize, usize)> {
    let start = (round % 2) as usize;
    (start..chains.saturating_sub(1))
        .step_by(2)
        .map(|i| (i, i + 1))
        .collect()
}
