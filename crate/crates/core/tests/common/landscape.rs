//! Random sparse instances and feasible assignments on generated benchmarks.

use gibbs_ilp::{FeasTolerance, IlpInstance};
use rand::Rng;

pub fn random_sparse<R: Rng>(rng: &mut R, n: usize) -> IlpInstance {
    let m = rng.gen_range(1..=n);
    let c = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let b = (0..m).map(|_| rng.gen_range(-2.0..4.0)).collect();
    let mut trip = Vec::new();
    for r in 0..m {
        let len = rng.gen_range(1..=n.min(8));
        for k in rand::seq::index::sample(rng, n, len) {
            trip.push((r, k, rng.gen_range(-3.0..3.0)));
        }
    }
    IlpInstance::new("sparse", n, m, c, &trip, b).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Uniform random assignment pushed into the feasible region of a cover or
/// packing instance: each violated row gets its first variable set so that
/// the row's activity drops, which never violates another row when every
/// coefficient of a variable has the same sign.
pub fn random_feasible<R: Rng>(rng: &mut R, inst: &IlpInstance) -> Vec<bool> {
    let mut x: Vec<bool> = (0..inst.n()).map(|_| rng.gen()).collect();
    for k in 0..inst.m() {
        let act: f64 = inst.row(k).map(|(j, v)| if x[j] { v } else { 0.0 }).sum();
        if act > inst.rhs()[k] {
            let (j, v) = inst.row(k).next().unwrap();
            x[j] = v < 0.0;
        }
    }
    assert!(inst.is_feasible(&x, FeasTolerance::exact()).unwrap());
    x
}
