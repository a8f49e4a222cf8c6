//! Binary integer linear programming by discrete Gibbs sampling.
//!
//! A problem `min c·x s.t. A x <= b, x ∈ {0,1}^n` is turned into the energy
//! `E(x) = c·x + λ·Σ_k max(0, A_k x − b_k)^p` and sampled from
//! `π(x) ∝ exp(−E(x)/τ)` with locally-balanced proposals whose weights are
//! computed exactly from the linear structure. Simulated annealing and two
//! flavours of non-reversible parallel tempering (over τ or over λ) drive
//! the chains towards good feasible solutions.

pub mod bench;
pub mod error;
pub mod ilp;
pub mod instances;
pub mod io;
pub mod samplers;
pub mod tempering;

pub use error::{Error, Result};
pub use ilp::{ChainState, EnergyParams, FeasTolerance, IlpInstance, PenaltyExponent};
pub use samplers::{Kernel, Proposal};
pub use tempering::{run_ensemble, EnsembleConfig, Mode, RunResult};
