//! Proposal kernels over a [`ChainState`]: exact locally-balanced proposals on
//! the 1-Hamming sphere, the multi-flip MLBP-L variant, and uniform
//! random-walk Metropolis.
//!
//! Balancing function is fixed to `g(t) = √t`, so the log-weight of flipping
//! `j` is `d_j / 2` with `d_j = (E(x) − E(x^{-j})) / τ`. All weight
//! arithmetic stays in the log domain.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ilp::{ChainState, FlipLog, IlpInstance};

/// Which move a chain proposes at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Proposal {
    /// Uniform single flip with Metropolis acceptance.
    Rwm,
    /// `steps` indices drawn without replacement from the locally-balanced
    /// weights; `steps = 1` is the exact LBP kernel.
    Mlbp { steps: usize },
}

impl Proposal {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Proposal::Rwm => Ok(()),
            Proposal::Mlbp { steps } if (1..=n).contains(&steps) => Ok(()),
            Proposal::Mlbp { steps } => Err(Error::ConfigInvalid(format!(
                "MLBP step count {steps} must lie in 1..={n}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProposalOutcome {
    pub flips: Vec<usize>,
    pub log_ratio: f64,
    pub accepted: bool,
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(tau))
    }
}

/// `log Σ exp(v)`, `−∞` for an empty or all-`−∞` slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Unnormalized LBP log-weights `−delta_j / (2τ)` where `delta_j` is the
/// energy change of flipping `j`.
pub fn lbp_log_weights(deltas: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_tau(tau)?;
    let mut out = Vec::with_capacity(deltas.len());
    fill_log_weights(deltas, tau, &mut out);
    Ok(out)
}

fn fill_log_weights(deltas: &[f64], tau: f64, out: &mut Vec<f64>) {
    let scale = -0.5 / tau;
    out.clear();
    out.extend(deltas.iter().map(|d| d * scale));
}

/// Log-weights shifted so that their exponentials sum to one.
pub fn normalize_log_weights(log_weights: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(log_weights);
    log_weights.iter().map(|w| w - lse).collect()
}

/// Draws `count` distinct indices by sequential categorical sampling with
/// renormalization over the not-yet-chosen atoms (inverse CDF in index
/// order). Consumes exactly `count` uniforms from `rng`.
pub fn sample_indices<R: Rng + ?Sized>(
    log_weights: &[f64],
    count: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(count);
    let mut buf = Vec::with_capacity(log_weights.len());
    sample_into(log_weights, count, rng, &mut out, &mut buf)?;
    Ok(out)
}

fn sample_into<R: Rng + ?Sized>(
    log_weights: &[f64],
    count: usize,
    rng: &mut R,
    out: &mut Vec<usize>,
    weights: &mut Vec<f64>,
) -> Result<()> {
    out.clear();
    let support = log_weights.iter().filter(|w| **w > f64::NEG_INFINITY).count();
    if count > support {
        return Err(Error::InsufficientSupport {
            requested: count,
            available: support,
        });
    }
    let rescale = |weights: &mut Vec<f64>, chosen: &[usize]| {
        let max = log_weights
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(_, w)| *w)
            .fold(f64::NEG_INFINITY, f64::max);
        weights.clear();
        weights.extend(log_weights.iter().map(|w| (w - max).exp()));
        for &i in chosen {
            weights[i] = 0.0;
        }
    };
    rescale(weights, out);

    for _ in 0..count {
        let mut total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            // every remaining atom underflowed relative to an earlier pick
            rescale(weights, out);
            total = weights.iter().sum();
        }
        let u = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        let mut last_positive = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                last_positive = i;
                acc += w;
                if u < acc {
                    pick = Some(i);
                    break;
                }
            }
        }
        let pick = pick.unwrap_or(last_positive);
        weights[pick] = 0.0;
        out.push(pick);
    }
    Ok(())
}

/// MH log acceptance ratio of the MLBP move flipping `flips` from `state`,
/// evaluated from scratch:
///
/// `log R = Σ_{j∈J} d_j(x) + Σ_{j∈J} [log w̄_j(y) − log w̄_j(x)]`
///
/// with `w̄` the LBP weights normalized over all `n` indices at each state.
/// For a single flip this is the exact LBP ratio; for several flips it is
/// the product-of-single-draws form, which is not the exact
/// without-replacement proposal ratio.
pub fn mh_log_ratio_mlbp(
    inst: &IlpInstance,
    state: &ChainState,
    flips: &[usize],
    tau: f64,
) -> Result<f64> {
    check_tau(tau)?;
    let deltas_x = state.flip_deltas(inst);
    let mut y = state.clone();
    y.apply_flips(inst, flips)?;
    let deltas_y = y.flip_deltas(inst);
    let lw_x = lbp_log_weights(&deltas_x, tau)?;
    let lw_y = lbp_log_weights(&deltas_y, tau)?;
    Ok(assemble_log_ratio(
        flips,
        &deltas_x,
        tau,
        &lw_x,
        log_sum_exp(&lw_x),
        &lw_y,
        log_sum_exp(&lw_y),
    ))
}

fn assemble_log_ratio(
    flips: &[usize],
    deltas_x: &[f64],
    tau: f64,
    lw_x: &[f64],
    lse_x: f64,
    lw_y: &[f64],
    lse_y: f64,
) -> f64 {
    flips
        .iter()
        .map(|&j| -deltas_x[j] / tau + (lw_y[j] - lse_y) - (lw_x[j] - lse_x))
        .sum()
}

#[inline]
fn metropolis<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    let u: f64 = rng.gen();
    log_ratio >= 0.0 || u < log_ratio.exp()
}

/// Reusable proposal kernel. Holds scratch buffers so the hot loop does not
/// allocate.
#[derive(Debug, Clone)]
pub struct Kernel {
    proposal: Proposal,
    deltas_x: Vec<f64>,
    deltas_y: Vec<f64>,
    lw_x: Vec<f64>,
    lw_y: Vec<f64>,
    weights: Vec<f64>,
    flips: Vec<usize>,
    log: FlipLog,
    log_ratio: f64,
}

impl Kernel {
    pub fn new(proposal: Proposal) -> Self {
        Kernel {
            proposal,
            deltas_x: Vec::new(),
            deltas_y: Vec::new(),
            lw_x: Vec::new(),
            lw_y: Vec::new(),
            weights: Vec::new(),
            flips: Vec::new(),
            log: FlipLog::default(),
            log_ratio: 0.0,
        }
    }

    pub fn proposal(&self) -> Proposal {
        self.proposal
    }

    /// Flip set of the most recent proposal.
    pub fn last_flips(&self) -> &[usize] {
        &self.flips
    }

    pub fn last_log_ratio(&self) -> f64 {
        self.log_ratio
    }

    /// One MH step at temperature `tau`. Returns whether the move was
    /// accepted; on rejection `state` is restored bit-for-bit.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        inst: &IlpInstance,
        state: &mut ChainState,
        tau: f64,
        rng: &mut R,
    ) -> Result<bool> {
        check_tau(tau)?;
        match self.proposal {
            Proposal::Rwm => self.rwm(inst, state, tau, rng),
            Proposal::Mlbp { steps } => self.mlbp(inst, state, tau, steps, rng),
        }
    }

    fn rwm<R: Rng + ?Sized>(
        &mut self,
        inst: &IlpInstance,
        state: &mut ChainState,
        tau: f64,
        rng: &mut R,
    ) -> Result<bool> {
        let j = rng.gen_range(0..inst.n());
        self.flips.clear();
        self.flips.push(j);
        self.log_ratio = -state.flip_delta(inst, j) / tau;
        let accept = metropolis(self.log_ratio, rng);
        if accept {
            state.apply_flips_logged(inst, &self.flips, &mut self.log)?;
            state.commit(inst);
        }
        Ok(accept)
    }

    fn mlbp<R: Rng + ?Sized>(
        &mut self,
        inst: &IlpInstance,
        state: &mut ChainState,
        tau: f64,
        steps: usize,
        rng: &mut R,
    ) -> Result<bool> {
        self.proposal.validate(inst.n())?;
        state.cached_flip_deltas(inst, &mut self.deltas_x);
        fill_log_weights(&self.deltas_x, tau, &mut self.lw_x);
        let lse_x = log_sum_exp(&self.lw_x);
        sample_into(&self.lw_x, steps, rng, &mut self.flips, &mut self.weights)?;

        state.apply_flips_logged(inst, &self.flips, &mut self.log)?;
        state.cached_flip_deltas(inst, &mut self.deltas_y);
        fill_log_weights(&self.deltas_y, tau, &mut self.lw_y);
        let lse_y = log_sum_exp(&self.lw_y);
        self.log_ratio = assemble_log_ratio(
            &self.flips,
            &self.deltas_x,
            tau,
            &self.lw_x,
            lse_x,
            &self.lw_y,
            lse_y,
        );

        let accept = metropolis(self.log_ratio, rng);
        if accept {
            state.commit(inst);
        } else {
            state.undo(&self.log);
        }
        Ok(accept)
    }

    fn outcome(&self, accepted: bool) -> ProposalOutcome {
        ProposalOutcome {
            flips: self.flips.clone(),
            log_ratio: self.log_ratio,
            accepted,
        }
    }
}

/// One MLBP-`steps` step; see [`Kernel`] for the allocation-free form.
pub fn mlbp_step<R: Rng + ?Sized>(
    inst: &IlpInstance,
    state: &mut ChainState,
    tau: f64,
    steps: usize,
    rng: &mut R,
) -> Result<ProposalOutcome> {
    let mut kernel = Kernel::new(Proposal::Mlbp { steps });
    let accepted = kernel.step(inst, state, tau, rng)?;
    Ok(kernel.outcome(accepted))
}

/// One random-walk Metropolis step.
pub fn rwm_step<R: Rng + ?Sized>(
    inst: &IlpInstance,
    state: &mut ChainState,
    tau: f64,
    rng: &mut R,
) -> Result<ProposalOutcome> {
    let mut kernel = Kernel::new(Proposal::Rwm);
    let accepted = kernel.step(inst, state, tau, rng)?;
    Ok(kernel.outcome(accepted))
}
