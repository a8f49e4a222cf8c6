use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sources::{derive_seed, instance_key};
use crate::error::{Error, Result};
use crate::ilp::{EnergyParams, IlpInstance, PenaltyExponent};
use crate::samplers::Proposal;
use crate::tempering::{run_ensemble, AnnealSchedule, Budget, EnsembleConfig, Mode};

fn one() -> u64 {
    1
}

fn default_chains() -> usize {
    15
}

fn default_proposal() -> Proposal {
    Proposal::Mlbp { steps: 3 }
}

fn default_halving() -> f64 {
    100_000.0
}

fn default_exponent() -> PenaltyExponent {
    PenaltyExponent::Linear
}

/// Tuning grid over SA's start temperature and penalty weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default)]
    pub tau_candidates: Vec<f64>,
    #[serde(default)]
    pub lambda_candidates: Vec<f64>,
    /// Budget of every single run.
    pub budget: Budget,
    #[serde(default = "one")]
    pub runs_per_instance: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default = "default_proposal")]
    pub proposal: Proposal,
    #[serde(default = "default_halving")]
    pub gamma_halving_steps: f64,
    #[serde(default = "default_exponent")]
    pub exponent: PenaltyExponent,
}

impl GridSpec {
    pub fn new(tau_candidates: Vec<f64>, lambda_candidates: Vec<f64>, budget: Budget) -> Self {
        GridSpec {
            tau_candidates,
            lambda_candidates,
            budget,
            runs_per_instance: 1,
            seed: 0,
            chains: default_chains(),
            proposal: default_proposal(),
            gamma_halving_steps: default_halving(),
            exponent: default_exponent(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::ConfigInvalid(m.into()));
        if self.tau_candidates.is_empty() || self.lambda_candidates.is_empty() {
            return bad("grid needs at least one τ and one λ candidate");
        }
        for &t in &self.tau_candidates {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::NonPositiveTemperature(t));
            }
        }
        for &l in &self.lambda_candidates {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::NonPositivePenalty(l));
            }
        }
        if self.runs_per_instance == 0 {
            return bad("runs_per_instance must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub tau: f64,
    pub lambda: f64,
    /// Mean incumbent objective; `None` marks the cell infeasible (some run
    /// ended without a feasible solution).
    pub mean_obj: Option<f64>,
    pub runs: usize,
    pub infeasible_runs: usize,
}

/// Parallel-tempering settings derived from tuned SA values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRule {
    /// τ-PT ladder endpoints `(τ, 2τ)`, run at penalty `tau_pt_lambda`.
    pub tau_pt: (f64, f64),
    pub tau_pt_lambda: f64,
    /// λ-PT ladder endpoints `(λ/2, λ)`, run at temperature `lambda_pt_tau`.
    pub lambda_pt: (f64, f64),
    pub lambda_pt_tau: f64,
}

pub fn ladder_rule(tau: f64, lambda: f64) -> LadderRule {
    LadderRule {
        tau_pt: (tau, 2.0 * tau),
        tau_pt_lambda: lambda,
        lambda_pt: (lambda / 2.0, lambda),
        lambda_pt_tau: tau,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub tau_best: f64,
    pub lambda_best: f64,
    pub best_mean_obj: f64,
    pub ladders: LadderRule,
    /// Row-major over `tau_candidates × lambda_candidates`.
    pub cells: Vec<GridCell>,
}

/// Runs `mode` (SA or SA+Reheat) on every instance for every grid cell and
/// picks the cell with the lowest mean objective among fully feasible
/// cells; ties prefer smaller λ, then smaller τ. Each instance's seeds
/// depend on the instance, not its position, so the choice does not depend
/// on the order of `insts`.
pub fn grid_search(insts: &[IlpInstance], grid: &GridSpec, mode: Mode) -> Result<GridResult> {
    grid.validate()?;
    if insts.is_empty() {
        return Err(Error::ConfigInvalid("grid search needs at least one instance".into()));
    }
    if mode.is_pt() {
        return Err(Error::ConfigInvalid(format!(
            "grid search tunes sa or sa-reheat, not {}",
            mode.as_str()
        )));
    }
    let jobs: Vec<(usize, u64)> = insts
        .iter()
        .enumerate()
        .flat_map(|(i, inst)| {
            let base = derive_seed(grid.seed, instance_key(inst));
            (0..grid.runs_per_instance).map(move |r| (i, derive_seed(base, r)))
        })
        .collect();

    let mut cells = Vec::new();
    for &tau in &grid.tau_candidates {
        for &lambda in &grid.lambda_candidates {
            let config = |seed| -> Result<EnsembleConfig> {
                let mut c = EnsembleConfig::sa(
                    AnnealSchedule::from_halving_steps(tau, grid.gamma_halving_steps)?,
                    EnergyParams::new(lambda, grid.exponent)?,
                    grid.budget,
                );
                c.mode = mode;
                c.chains = grid.chains;
                c.proposal = grid.proposal;
                c.seed = seed;
                c.trace_every = u64::MAX;
                Ok(c)
            };
            let results: Vec<Option<f64>> = jobs
                .par_iter()
                .map(|&(i, seed)| Ok(run_ensemble(&insts[i], &config(seed)?)?.incumbent_obj))
                .collect::<Result<_>>()?;
            let mut feasible: Vec<f64> = results.iter().flatten().copied().collect();
            let infeasible_runs = results.len() - feasible.len();
            // summation order fixed independently of instance order
            feasible.sort_by(f64::total_cmp);
            let mean_obj = (infeasible_runs == 0)
                .then(|| feasible.iter().sum::<f64>() / feasible.len() as f64);
            log::debug!("grid cell tau={tau} lambda={lambda}: {mean_obj:?}");
            cells.push(GridCell {
                tau,
                lambda,
                mean_obj,
                runs: results.len(),
                infeasible_runs,
            });
        }
    }
    let best = cells
        .iter()
        .filter_map(|c| c.mean_obj.map(|m| (m, c)))
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1.lambda.total_cmp(&b.1.lambda))
                .then(a.1.tau.total_cmp(&b.1.tau))
        })
        .map(|(m, c)| (m, c.tau, c.lambda))
        .ok_or(Error::AllInfeasible)?;
    Ok(GridResult {
        tau_best: best.1,
        lambda_best: best.2,
        best_mean_obj: best.0,
        ladders: ladder_rule(best.1, best.2),
        cells,
    })
}
