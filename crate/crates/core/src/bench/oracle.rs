use crate::error::{Error, Result};
use crate::ilp::{ChainState, EnergyParams, FeasTolerance, IlpInstance};

/// Largest instance [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    /// Feasible minimizer of `c·x`, lexicographically smallest among ties.
    pub x_opt: Option<Vec<bool>>,
    pub obj_opt: Option<f64>,
    /// Minimizer of the penalized energy (when parameters were given),
    /// lexicographically smallest among ties, and its energy.
    pub energy_opt: Option<(Vec<bool>, f64)>,
}

/// Exhaustive search over all `2ⁿ` assignments with the default feasibility
/// tolerance.
pub fn brute_force(inst: &IlpInstance, params: Option<EnergyParams>) -> Result<BruteForce> {
    brute_force_with_tolerance(inst, params, FeasTolerance::default())
}

pub fn brute_force_with_tolerance(
    inst: &IlpInstance,
    params: Option<EnergyParams>,
    tol: FeasTolerance,
) -> Result<BruteForce> {
    let n = inst.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let track_energy = params.is_some();
    let params = match params {
        Some(p) => p,
        None => EnergyParams::linear(1.0)?,
    };
    let mut state = ChainState::with_tolerance(inst, &vec![false; n], params, tol)?;
    let mut best_x: Option<Vec<bool>> = None;
    let mut best_obj = f64::INFINITY;
    let mut best_e: Option<(Vec<bool>, f64)> = None;
    // cached values drift by rounding; near-ties are re-evaluated exactly
    let near = |a: f64, b: f64| a <= b + 1e-9 * (1.0 + b.abs());

    // x_0 is the most significant bit, so counting up visits assignments in
    // lexicographic order and strict improvement keeps the smallest tie
    let total: u64 = 1 << n;
    let mut flips = Vec::with_capacity(n);
    for mask in 0..total {
        if mask > 0 {
            flips.clear();
            let changed = mask ^ (mask - 1);
            flips.extend((0..n).filter(|&j| changed >> (n - 1 - j) & 1 == 1));
            state.apply_flips(inst, &flips)?;
        }
        if state.is_feasible() && near(state.objective(), best_obj) {
            let obj = inst.objective(state.x())?;
            if obj < best_obj {
                best_obj = obj;
                best_x = Some(state.x().to_vec());
            }
        }
        if track_energy {
            let cur = best_e.as_ref().map_or(f64::INFINITY, |b| b.1);
            if near(state.energy(), cur) {
                let e = inst.energy(state.x(), params)?;
                if e < cur {
                    best_e = Some((state.x().to_vec(), e));
                }
            }
        }
    }
    Ok(BruteForce {
        obj_opt: best_x.as_ref().map(|_| best_obj),
        x_opt: best_x,
        energy_opt: best_e,
    })
}
