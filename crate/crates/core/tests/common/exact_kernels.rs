//! Exact transition matrices of the single-flip kernels on tiny instances,
//! and their stationary distributions solved densely.

use gibbs_ilp::ilp::{ChainState, EnergyParams, IlpInstance, PenaltyExponent};
use gibbs_ilp::samplers::{lbp_log_weights, mh_log_ratio_mlbp, normalize_log_weights};
use gibbs_ilp::tempering::{log_swap_ratio_lambda, log_swap_ratio_tau};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleFlip {
    Lbp,
    Rwm,
}

/// Dense random instance with small integer data.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> IlpInstance {
    let c: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(-3i32..=3))).collect();
    let b: Vec<f64> = (0..m).map(|_| f64::from(rng.gen_range(-1i32..=3))).collect();
    let mut trip = Vec::new();
    for r in 0..m {
        for k in 0..n {
            if rng.gen_bool(0.6) {
                trip.push((r, k, f64::from(rng.gen_range(-2i32..=3))));
            }
        }
    }
    IlpInstance::new("rand", n, m, c, &trip, b).unwrap()
}

/// State index `s` has `x_j` equal to bit `j` of `s`.
pub fn state(n: usize, s: usize) -> Vec<bool> {
    (0..n).map(|j| s >> j & 1 == 1).collect()
}

/// `π(x) ∝ exp(−E(x)/τ)` by enumeration.
pub fn gibbs_target(inst: &IlpInstance, params: EnergyParams, tau: f64) -> DVector<f64> {
    let size = 1usize << inst.n();
    let logp: Vec<f64> = (0..size)
        .map(|s| -inst.energy(&state(inst.n(), s), params).unwrap() / tau)
        .collect();
    let max = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logp.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    DVector::from_iterator(size, w.into_iter().map(|v| v / z))
}

/// Row-stochastic matrix of one proposal-plus-accept step.
pub fn transition_matrix(
    inst: &IlpInstance,
    params: EnergyParams,
    tau: f64,
    kind: SingleFlip,
) -> DMatrix<f64> {
    let n = inst.n();
    let size = 1usize << n;
    let mut p = DMatrix::zeros(size, size);
    for s in 0..size {
        let st = ChainState::new(inst, &state(n, s), params).unwrap();
        let deltas = st.flip_deltas(inst);
        let q = match kind {
            SingleFlip::Lbp => normalize_log_weights(&lbp_log_weights(&deltas, tau).unwrap())
                .into_iter()
                .map(f64::exp)
                .collect(),
            SingleFlip::Rwm => vec![1.0 / n as f64; n],
        };
        let mut stay = 1.0;
        for j in 0..n {
            let log_r = match kind {
                SingleFlip::Lbp => mh_log_ratio_mlbp(inst, &st, &[j], tau).unwrap(),
                SingleFlip::Rwm => -deltas[j] / tau,
            };
            let move_p = q[j] * log_r.min(0.0).exp();
            p[(s, s ^ (1 << j))] += move_p;
            stay -= move_p;
        }
        p[(s, s)] += stay;
    }
    p
}

/// Solves `πᵀP = πᵀ`, `Σπ = 1`.
pub fn stationary(p: &DMatrix<f64>) -> DVector<f64> {
    let size = p.nrows();
    let mut a = p.transpose() - DMatrix::identity(size, size);
    for k in 0..size {
        a[(size - 1, k)] = 1.0;
    }
    let mut rhs = DVector::zeros(size);
    rhs[size - 1] = 1.0;
    a.lu().solve(&rhs).expect("irreducible chain")
}

pub fn total_variation(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    0.5 * (a - b).abs().sum()
}

/// Largest `|π(x)P(x,y) − π(y)P(y,x)|`.
pub fn detailed_balance_gap(p: &DMatrix<f64>, pi: &DVector<f64>) -> f64 {
    let size = p.nrows();
    let mut worst: f64 = 0.0;
    for x in 0..size {
        for y in x + 1..size {
            worst = worst.max((pi[x] * p[(x, y)] - pi[y] * p[(y, x)]).abs());
        }
    }
    worst
}

/// One exchange attempt between two chains: moves `(x₁, x₂)` to
/// `(x₂, x₁)` with probability `accept(x₁, x₂)`. Joint index is
/// `x₁·2ⁿ + x₂`.
pub fn swap_matrix(n: usize, accept: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    let size = 1usize << n;
    let mut s = DMatrix::zeros(size * size, size * size);
    for a in 0..size {
        for b in 0..size {
            let from = a * size + b;
            let pr = if a == b { 0.0 } else { accept(a, b) };
            s[(from, b * size + a)] += pr;
            s[(from, from)] += 1.0 - pr;
        }
    }
    s
}

/// Worst stationary TV distance and detailed-balance gap of `kind` over 20
/// random `n = 6, m = 3` instances cycling τ ∈ {0.5, 1, 2}, λ ∈ {1, 5} and
/// both penalty exponents.
pub fn single_flip_exactness(kind: SingleFlip) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut tv_max, mut db_max) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let inst = random_instance(&mut rng, 6, 3);
        let tau = [0.5, 1.0, 2.0][i % 3];
        let lambda = [1.0, 5.0][i / 3 % 2];
        let exp = [PenaltyExponent::Linear, PenaltyExponent::Squared][i % 2];
        let params = EnergyParams::new(lambda, exp).unwrap();
        let p = transition_matrix(&inst, params, tau, kind);
        let target = gibbs_target(&inst, params, tau);
        for r in 0..p.nrows() {
            assert!((p.row(r).sum() - 1.0).abs() < 1e-12, "row {r} not stochastic");
        }
        tv_max = tv_max.max(total_variation(&stationary(&p), &target));
        db_max = db_max.max(detailed_balance_gap(&p, &target));
    }
    (tv_max, db_max)
}

/// Two LBP chains followed by one swap attempt, at fixed temperatures on an
/// `n = 5` instance. Returns the stationary TV distance from the product
/// target for the temperature swap and for the penalty swap.
pub fn joint_swap_exactness() -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 5;
    let size = 1usize << n;
    let inst = random_instance(&mut rng, n, 2);

    let params = EnergyParams::linear(3.0).unwrap();
    let (ta, tb) = (0.7, 1.6);
    let e: Vec<f64> = (0..size).map(|s| inst.energy(&state(n, s), params).unwrap()).collect();
    let k = transition_matrix(&inst, params, ta, SingleFlip::Lbp)
        .kronecker(&transition_matrix(&inst, params, tb, SingleFlip::Lbp));
    let s = swap_matrix(n, |a, b| log_swap_ratio_tau(e[a], e[b], ta, tb).unwrap().min(0.0).exp());
    let target = gibbs_target(&inst, params, ta).kronecker(&gibbs_target(&inst, params, tb));
    let tv_tau = total_variation(&stationary(&(k * s)), &target);

    let tau = 0.9;
    let (pa, pb) = (
        EnergyParams::linear(1.0).unwrap(),
        EnergyParams::linear(4.0).unwrap(),
    );
    let viol: Vec<f64> = (0..size)
        .map(|s| inst.violation(&state(n, s), PenaltyExponent::Linear).unwrap().total)
        .collect();
    let k = transition_matrix(&inst, pa, tau, SingleFlip::Lbp)
        .kronecker(&transition_matrix(&inst, pb, tau, SingleFlip::Lbp));
    let s = swap_matrix(n, |a, b| {
        log_swap_ratio_lambda(viol[a], viol[b], 1.0, 4.0, tau).unwrap().min(0.0).exp()
    });
    let target = gibbs_target(&inst, pa, tau).kronecker(&gibbs_target(&inst, pb, tau));
    let tv_lambda = total_variation(&stationary(&(k * s)), &target);
    (tv_tau, tv_lambda)
}
