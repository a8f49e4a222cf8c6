//! Canonical binary ILP model, penalized energy and incremental flip caches.

mod energy;
mod instance;
mod state;

pub use energy::{EnergyParams, FeasTolerance, PenaltyExponent, Violation};
pub use instance::{IlpInstance, SparseLanes};
pub use state::{ChainState, FlipLog, CACHE_REFRESH_INTERVAL};

/// Three variables, `c = (1, −2, 3)`, rows `x0 + x1 <= 1` and `x1 + x2 <= 1`.
/// Optimum `(0, 1, 0)` with objective −2.
pub fn reference_instance() -> IlpInstance {
    IlpInstance::new(
        "ref3",
        3,
        2,
        vec![1.0, -2.0, 3.0],
        &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0), (1, 2, 1.0)],
        vec![1.0, 1.0],
    )
    .expect("reference instance is well formed")
}
