use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schedule::{AnnealSchedule, Ladder, LadderKind};
use super::swap::{deo_pairs, log_swap_ratio_lambda, log_swap_ratio_tau};
use crate::error::{Error, Result};
use crate::ilp::{ChainState, EnergyParams, FeasTolerance, IlpInstance};
use crate::samplers::{Kernel, Proposal};

/// Work per outer step (`n × chains`) above which chains advance on the
/// rayon pool.
const PARALLEL_WORK_THRESHOLD: usize = 20_000;

/// Stream reserved for swap decisions; chain `i` uses stream `i`.
const SWAP_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Independent annealed chains.
    Sa,
    /// Independent annealed chains with periodic reset to `τ₀`.
    SaReheat,
    /// Temperature ladder, every rung annealed by the shared `γ`.
    TauPt,
    /// Penalty ladder at one shared annealed temperature.
    LambdaPt,
}

impl Mode {
    pub fn is_pt(self) -> bool {
        matches!(self, Mode::TauPt | Mode::LambdaPt)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sa => "sa",
            Mode::SaReheat => "sa-reheat",
            Mode::TauPt => "tau-pt",
            Mode::LambdaPt => "lambda-pt",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sa" => Ok(Mode::Sa),
            "sa-reheat" => Ok(Mode::SaReheat),
            "tau-pt" => Ok(Mode::TauPt),
            "lambda-pt" => Ok(Mode::LambdaPt),
            other => Err(Error::ConfigInvalid(format!("unknown mode {other:?}"))),
        }
    }
}

/// Stopping rule; whichever limit is hit first ends the run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Budget {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,
}

impl Budget {
    pub fn steps(max_steps: u64) -> Self {
        Budget {
            max_steps: Some(max_steps),
            max_seconds: None,
        }
    }

    pub fn seconds(max_seconds: f64) -> Self {
        Budget {
            max_steps: None,
            max_seconds: Some(max_seconds),
        }
    }
}

fn default_chains() -> usize {
    15
}

fn default_swap_interval() -> u64 {
    200
}

fn default_proposal() -> Proposal {
    Proposal::Mlbp { steps: 3 }
}

fn default_trace_every() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub mode: Mode,
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default = "default_swap_interval")]
    pub swap_interval: u64,
    #[serde(default = "default_proposal")]
    pub proposal: Proposal,
    /// `τ₀` is the start temperature for SA and λ-PT; `γ` drives every mode.
    pub schedule: AnnealSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Ladder>,
    /// λ is used by SA and τ-PT; λ-PT takes its weights from the ladder and
    /// only the exponent from here.
    pub params: EnergyParams,
    #[serde(default)]
    pub tolerance: FeasTolerance,
    #[serde(default)]
    pub seed: u64,
    pub budget: Budget,
    #[serde(default = "default_trace_every")]
    pub trace_every: u64,
}

impl EnsembleConfig {
    /// Plain SA with the paper-default chain count and proposal.
    pub fn sa(schedule: AnnealSchedule, params: EnergyParams, budget: Budget) -> Self {
        EnsembleConfig {
            mode: Mode::Sa,
            chains: default_chains(),
            swap_interval: default_swap_interval(),
            proposal: default_proposal(),
            schedule,
            ladder: None,
            params,
            tolerance: FeasTolerance::default(),
            seed: 0,
            budget,
            trace_every: default_trace_every(),
        }
    }

    pub fn validate(&self, inst: &IlpInstance) -> Result<()> {
        let bad = |msg: String| Err(Error::ConfigInvalid(msg));
        if self.chains == 0 {
            return bad("at least one chain is required".into());
        }
        if self.swap_interval == 0 {
            return bad("swap interval must be at least 1".into());
        }
        if self.trace_every == 0 {
            return bad("trace cadence must be at least 1".into());
        }
        self.proposal.validate(inst.n())?;
        match (self.budget.max_steps, self.budget.max_seconds) {
            (None, None) => return bad("a step or wall-clock budget is required".into()),
            (Some(0), _) => return bad("step budget must be positive".into()),
            (_, Some(s)) if !(s > 0.0 && s.is_finite()) => {
                return bad(format!("wall-clock budget must be positive, got {s}"))
            }
            _ => {}
        }
        if self.mode.is_pt() {
            if self.chains < 2 {
                return bad(format!("{} needs at least two chains", self.mode.as_str()));
            }
            let want = if self.mode == Mode::TauPt {
                LadderKind::Temperature
            } else {
                LadderKind::Penalty
            };
            match &self.ladder {
                None => return bad(format!("{} needs a ladder", self.mode.as_str())),
                Some(l) if l.kind() != want => {
                    return bad(format!("{} needs a {want:?} ladder", self.mode.as_str()))
                }
                Some(l) if l.len() != self.chains => {
                    return bad(format!(
                        "ladder has {} rungs for {} chains",
                        l.len(),
                        self.chains
                    ))
                }
                _ => {}
            }
        }
        self.effective_schedule()?;
        Ok(())
    }

    /// The schedule actually run: SA+Reheat gets a period (explicit, or a
    /// quarter of the step budget), other modes run without reheating.
    fn effective_schedule(&self) -> Result<AnnealSchedule> {
        match self.mode {
            Mode::SaReheat => match (self.schedule.reheat_period(), self.budget.max_steps) {
                (Some(_), _) => Ok(self.schedule),
                (None, Some(steps)) => self.schedule.with_reheat((steps / 4).max(1)),
                (None, None) => Err(Error::ConfigInvalid(
                    "sa-reheat with a wall-clock budget needs an explicit reheat period".into(),
                )),
            },
            _ => Ok(self.schedule.without_reheat()),
        }
    }
}

/// Swap bookkeeping. `attempts[i]`/`accepts[i]` refer to the pair
/// `(i, i + 1)`; `round_trips[r]` counts bottom→top→bottom traversals of the
/// replica that started on rung `r`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SwapStats {
    pub attempts: Vec<u64>,
    pub accepts: Vec<u64>,
    pub round_trips: Vec<u64>,
}

impl SwapStats {
    fn new(chains: usize) -> Self {
        SwapStats {
            attempts: vec![0; chains.saturating_sub(1)],
            accepts: vec![0; chains.saturating_sub(1)],
            round_trips: vec![0; chains],
        }
    }

    pub fn total_attempts(&self) -> u64 {
        self.attempts.iter().sum()
    }

    /// Overall acceptance rate, `None` before any attempt.
    pub fn acceptance_rate(&self) -> Option<f64> {
        let att = self.total_attempts();
        (att > 0).then(|| self.accepts.iter().sum::<u64>() as f64 / att as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub wall_seconds: f64,
    pub step: u64,
    pub incumbent_obj: Option<f64>,
    /// Lowest current energy over the chains.
    pub best_energy: f64,
    pub feasible_found: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub incumbent: Option<Vec<bool>>,
    pub incumbent_obj: Option<f64>,
    pub trace: Vec<TraceRecord>,
    pub swap_stats: SwapStats,
    pub steps_completed: u64,
    pub wall_seconds: f64,
}

/// Random stream `stream` of the counter-based generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Chain {
    state: ChainState,
    kernel: Kernel,
    rng: ChaCha8Rng,
}

impl Chain {
    fn advance(&mut self, inst: &IlpInstance, tau: f64) -> Result<()> {
        self.kernel.step(inst, &mut self.state, tau, &mut self.rng)?;
        Ok(())
    }
}

struct RoundTrips {
    /// replica id currently on each rung
    on_rung: Vec<usize>,
    seen_bottom: Vec<bool>,
    seen_top: Vec<bool>,
}

impl RoundTrips {
    fn new(chains: usize) -> Self {
        let mut rt = RoundTrips {
            on_rung: (0..chains).collect(),
            seen_bottom: vec![false; chains],
            seen_top: vec![false; chains],
        };
        rt.seen_bottom[0] = true;
        rt
    }

    fn swap(&mut self, a: usize, b: usize, stats: &mut SwapStats) {
        self.on_rung.swap(a, b);
        let top = self.on_rung.len() - 1;
        for rung in [a, b] {
            let r = self.on_rung[rung];
            if rung == top && self.seen_bottom[r] {
                self.seen_top[r] = true;
            }
            if rung == 0 {
                if self.seen_top[r] {
                    stats.round_trips[r] += 1;
                    self.seen_top[r] = false;
                }
                self.seen_bottom[r] = true;
            }
        }
    }
}

/// Runs the chain ensemble under `config` and returns the best feasible
/// assignment seen.
///
/// Each outer step advances every chain by one proposal at its own
/// temperature/penalty; every `swap_interval` steps (including step 0) a
/// deterministic even/odd swap round runs in PT modes. After each step the
/// incumbent is replaced iff some feasible chain has a strictly smaller
/// objective.
pub fn run_ensemble(inst: &IlpInstance, config: &EnsembleConfig) -> Result<RunResult> {
    config.validate(inst)?;
    let schedule = config.effective_schedule()?;
    let chains_n = config.chains;
    let started = Instant::now();

    let ladder = config.ladder.as_ref().map(|l| l.values());
    let start_tau: Vec<f64> = match (config.mode, ladder) {
        (Mode::TauPt, Some(l)) => l.to_vec(),
        _ => vec![schedule.tau0(); chains_n],
    };
    let mut chains = (0..chains_n)
        .map(|i| {
            let mut rng = stream_rng(config.seed, i as u64);
            let x0: Vec<bool> = (0..inst.n()).map(|_| rng.gen_bool(0.5)).collect();
            let params = match (config.mode, ladder) {
                (Mode::LambdaPt, Some(l)) => config.params.with_lambda(l[i])?,
                _ => config.params,
            };
            Ok(Chain {
                state: ChainState::with_tolerance(inst, &x0, params, config.tolerance)?,
                kernel: Kernel::new(config.proposal),
                rng,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut swap_rng = stream_rng(config.seed, SWAP_STREAM);

    let parallel = chains_n > 1
        && rayon::current_num_threads() > 1
        && inst.n().saturating_mul(chains_n) >= PARALLEL_WORK_THRESHOLD;

    let mut stats = SwapStats::new(chains_n);
    let mut trips = RoundTrips::new(chains_n);
    let mut taus = vec![0.0; chains_n];
    let mut round = 0u64;
    let mut incumbent: Option<(Vec<bool>, f64)> = None;
    let mut trace = Vec::new();
    let mut steps_done = 0u64;

    for t in 0u64.. {
        if config.budget.max_steps.is_some_and(|max| t >= max) {
            break;
        }
        for (tau, start) in taus.iter_mut().zip(&start_tau) {
            *tau = schedule.tau_from(*start, t);
        }
        if parallel {
            chains
                .par_iter_mut()
                .zip(taus.par_iter())
                .try_for_each(|(c, &tau)| c.advance(inst, tau))?;
        } else {
            for (c, &tau) in chains.iter_mut().zip(&taus) {
                c.advance(inst, tau)?;
            }
        }

        if config.mode.is_pt() && t % config.swap_interval == 0 {
            for (a, b) in deo_pairs(round, chains_n) {
                let log_ratio = match config.mode {
                    Mode::TauPt => log_swap_ratio_tau(
                        chains[a].state.energy(),
                        chains[b].state.energy(),
                        taus[a],
                        taus[b],
                    )?,
                    _ => log_swap_ratio_lambda(
                        chains[a].state.violation(),
                        chains[b].state.violation(),
                        chains[a].state.params().lambda(),
                        chains[b].state.params().lambda(),
                        taus[a],
                    )?,
                };
                stats.attempts[a] += 1;
                let u: f64 = swap_rng.gen();
                if log_ratio >= 0.0 || u < log_ratio.exp() {
                    stats.accepts[a] += 1;
                    exchange(&mut chains, a, b)?;
                    trips.swap(a, b, &mut stats);
                }
            }
            round += 1;
        }

        let mut improved = false;
        for c in &chains {
            if !c.state.is_feasible() {
                continue;
            }
            let obj = c.state.objective();
            if incumbent.as_ref().is_none_or(|(_, best)| obj < *best) {
                incumbent = Some((c.state.x().to_vec(), obj));
                improved = true;
            }
        }

        steps_done = t + 1;
        if improved || steps_done.is_multiple_of(config.trace_every) {
            let best_energy = chains
                .iter()
                .map(|c| c.state.energy())
                .fold(f64::INFINITY, f64::min);
            let wall = started.elapsed().as_secs_f64();
            trace.push(TraceRecord {
                wall_seconds: wall,
                step: steps_done,
                incumbent_obj: incumbent.as_ref().map(|(_, o)| *o),
                best_energy,
                feasible_found: incumbent.is_some(),
            });
        }

        if config
            .budget
            .max_seconds
            .is_some_and(|s| started.elapsed().as_secs_f64() >= s)
        {
            break;
        }
    }

    let (x, obj) = match incumbent {
        Some((x, o)) => (Some(x), Some(o)),
        None => (None, None),
    };
    Ok(RunResult {
        incumbent: x,
        incumbent_obj: obj,
        trace,
        swap_stats: stats,
        steps_completed: steps_done,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Swaps the states on rungs `a < b`; penalty weights stay with the rung.
fn exchange(chains: &mut [Chain], a: usize, b: usize) -> Result<()> {
    let (lo, hi) = chains.split_at_mut(b);
    let (ca, cb) = (&mut lo[a], &mut hi[0]);
    let (lam_a, lam_b) = (ca.state.params().lambda(), cb.state.params().lambda());
    std::mem::swap(&mut ca.state, &mut cb.state);
    if lam_a != lam_b {
        ca.state.set_lambda(lam_a)?;
        cb.state.set_lambda(lam_b)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::reference_instance;
    use crate::tempering::make_ladder;

    fn sa_config(steps: u64, seed: u64) -> EnsembleConfig {
        let mut cfg = EnsembleConfig::sa(
            AnnealSchedule::new(1.0, 0.999).unwrap(),
            EnergyParams::linear(5.0).unwrap(),
            Budget::steps(steps),
        );
        cfg.chains = 1;
        cfg.proposal = Proposal::Mlbp { steps: 1 };
        cfg.seed = seed;
        cfg
    }

    #[test]
    fn reference_sa_finds_optimum() {
        let inst = reference_instance();
        let hits = (0..100)
            .filter(|&seed| {
                let r = run_ensemble(&inst, &sa_config(10_000, seed)).unwrap();
                r.incumbent.as_deref() == Some(&[false, true, false][..])
                    && r.incumbent_obj == Some(-2.0)
            })
            .count();
        assert!(hits >= 99, "{hits}/100");
    }

    #[test]
    fn unconstrained_nonnegative_costs() {
        let inst = IlpInstance::new("pos", 5, 0, vec![1.0, 0.5, 2.0, 0.0, 3.0], &[], vec![]).unwrap();
        let mut cfg = sa_config(5_000, 3);
        cfg.chains = 3;
        let r = run_ensemble(&inst, &cfg).unwrap();
        assert_eq!(r.incumbent_obj, Some(0.0));
        let x = r.incumbent.unwrap();
        assert!(x.iter().zip(inst.objective_coeffs()).all(|(&on, &c)| !on || c == 0.0));
    }

    #[test]
    fn degenerate_ladder_always_swaps() {
        let inst = reference_instance();
        for mode in [Mode::TauPt, Mode::LambdaPt] {
            let kind = if mode == Mode::TauPt {
                LadderKind::Temperature
            } else {
                LadderKind::Penalty
            };
            let mut cfg = sa_config(2_000, 1);
            cfg.mode = mode;
            cfg.chains = 4;
            cfg.swap_interval = 10;
            cfg.ladder = Some(make_ladder(1.0, 1.0, 4, kind).unwrap());
            let r = run_ensemble(&inst, &cfg).unwrap();
            assert!(r.swap_stats.total_attempts() > 0);
            assert_eq!(r.swap_stats.acceptance_rate(), Some(1.0));
        }
    }

    #[test]
    fn trace_is_monotone_and_deterministic() {
        let inst = reference_instance();
        let mut cfg = sa_config(3_000, 9);
        cfg.mode = Mode::TauPt;
        cfg.chains = 3;
        cfg.ladder = Some(make_ladder(0.5, 2.0, 3, LadderKind::Temperature).unwrap());
        let a = run_ensemble(&inst, &cfg).unwrap();
        let b = run_ensemble(&inst, &cfg).unwrap();
        let strip = |r: &RunResult| {
            r.trace
                .iter()
                .map(|t| (t.step, t.incumbent_obj, t.best_energy.to_bits(), t.feasible_found))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.incumbent, b.incumbent);
        assert_eq!(a.swap_stats, b.swap_stats);
        let objs: Vec<f64> = a.trace.iter().filter_map(|t| t.incumbent_obj).collect();
        assert!(objs.windows(2).all(|w| w[1] <= w[0]));
        assert!(a.trace.windows(2).all(|w| w[0].step <= w[1].step && w[0].wall_seconds <= w[1].wall_seconds));
        assert_eq!(a.steps_completed, 3_000);
        assert_eq!(a.trace.iter().filter(|t| t.step % 100 == 0).count(), 30);
    }

    #[test]
    fn infeasible_instance_has_no_incumbent() {
        let inst = IlpInstance::new("inf", 2, 1, vec![1.0, 1.0], &[], vec![-1.0]).unwrap();
        let r = run_ensemble(&inst, &sa_config(500, 0)).unwrap();
        assert!(r.incumbent.is_none());
        assert!(r.trace.iter().all(|t| !t.feasible_found));
    }

    #[test]
    fn wall_clock_budget_stops() {
        let inst = reference_instance();
        let mut cfg = sa_config(1, 0);
        cfg.budget = Budget::seconds(0.05);
        let r = run_ensemble(&inst, &cfg).unwrap();
        assert!(r.wall_seconds >= 0.05 && r.wall_seconds < 1.0);
        assert!(r.steps_completed > 0);
    }

    #[test]
    fn config_validation() {
        let inst = reference_instance();
        let mut cfg = sa_config(10, 0);
        cfg.mode = Mode::TauPt;
        assert!(matches!(run_ensemble(&inst, &cfg), Err(Error::ConfigInvalid(_))));
        cfg.chains = 2;
        cfg.ladder = Some(make_ladder(1.0, 2.0, 3, LadderKind::Temperature).unwrap());
        assert!(run_ensemble(&inst, &cfg).is_err());
        cfg.ladder = Some(make_ladder(1.0, 2.0, 2, LadderKind::Penalty).unwrap());
        assert!(run_ensemble(&inst, &cfg).is_err());
        let mut cfg = sa_config(10, 0);
        cfg.budget = Budget::default();
        assert!(run_ensemble(&inst, &cfg).is_err());
        let mut cfg = sa_config(10, 0);
        cfg.proposal = Proposal::Mlbp { steps: 4 };
        assert!(run_ensemble(&inst, &cfg).is_err());
        let mut cfg = sa_config(10, 0);
        cfg.mode = Mode::SaReheat;
        cfg.budget = Budget::seconds(1.0);
        assert!(run_ensemble(&inst, &cfg).is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut cfg = sa_config(100, 4);
        cfg.mode = Mode::LambdaPt;
        cfg.chains = 2;
        cfg.ladder = Some(make_ladder(0.5, 1.0, 2, LadderKind::Penalty).unwrap());
        let text = serde_json::to_string(&cfg).unwrap();
        let back: EnsembleConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let minimal: EnsembleConfig = serde_json::from_str(
            r#"{"mode":"sa","schedule":{"tau0":0.2,"halving_steps":100000},
                "params":{"lambda":1.0},"budget":{"max_steps":10}}"#,
        )
        .unwrap();
        assert_eq!(minimal.chains, 15);
        assert_eq!(minimal.swap_interval, 200);
        assert_eq!(minimal.proposal, Proposal::Mlbp { steps: 3 });
    }

    #[test]
    fn round_trip_counting() {
        let mut stats = SwapStats::new(3);
        let mut rt = RoundTrips::new(3);
        rt.swap(0, 1, &mut stats); // replica 0 on rung 1
        rt.swap(1, 2, &mut stats); // replica 0 on top
        rt.swap(1, 2, &mut stats); // back to rung 1
        assert_eq!(stats.round_trips, vec![0, 0, 0]);
        rt.swap(0, 1, &mut stats); // bottom again
        assert_eq!(stats.round_trips, vec![1, 0, 0]);
    }
}
