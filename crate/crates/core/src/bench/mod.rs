//! Evaluation: the relative-gap metric, an exhaustive oracle, grid-search
//! tuning with the ladder rule, and batch experiments.

mod experiment;
mod gap;
mod grid;
mod oracle;
mod presets;
mod sources;

pub use experiment::{
    mean_std, run_experiment, AggregateRow, BksSource, ExperimentReport, ExperimentSpec,
    RunSummary, AGGREGATE_HEADER, SUMMARY_HEADER,
};
pub use gap::{relative_gap, GapReport};
pub use grid::{grid_search, ladder_rule, GridCell, GridResult, GridSpec, LadderRule};
pub use oracle::{brute_force, brute_force_with_tolerance, BruteForce, BRUTE_FORCE_LIMIT};
pub use presets::{grid_preset, param_preset, ParamPreset, PARAM_PRESETS};
pub use sources::{derive_seed, InstanceSource};
