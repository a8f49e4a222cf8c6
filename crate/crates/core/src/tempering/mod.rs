//! Annealing schedules, tempering ladders, replica-exchange kernels and the
//! ensemble driver.

mod ensemble;
mod schedule;
mod swap;

pub use ensemble::{
    run_ensemble, stream_rng, Budget, EnsembleConfig, Mode, RunResult, SwapStats, TraceRecord,
};
pub use schedule::{make_ladder, AnnealSchedule, Ladder, LadderKind};
pub use swap::{
    deo_pairs, log_swap_ratio_lambda, log_swap_ratio_tau, swap_prob_lambda, swap_prob_tau,
};
