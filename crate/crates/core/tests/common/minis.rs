//! Random small MVC / MIS / SC instances and the SA run used to compare the
//! sampler with exhaustive search.

use gibbs_ilp::bench::brute_force;
use gibbs_ilp::instances::{GraphSpec, ProblemSpec, ScSpec};
use gibbs_ilp::tempering::{run_ensemble, AnnealSchedule, Budget, EnsembleConfig};
use gibbs_ilp::{EnergyParams, IlpInstance, Proposal};

pub fn mini_instance(i: u64) -> IlpInstance {
    let n = 6 + (i as usize * 7) % 7;
    let spec = match i % 3 {
        0 => ProblemSpec::Mvc {
            graph: GraphSpec::Er {
                n_nodes: n,
                edge_prob: 0.4,
            },
        },
        1 => ProblemSpec::Mis {
            graph: GraphSpec::Er {
                n_nodes: n,
                edge_prob: 0.4,
            },
        },
        _ => ProblemSpec::Sc(ScSpec {
            n_vars: n,
            n_rows: 4 + i as usize % 6,
            density: 0.3,
        }),
    };
    spec.generate(1000 + i).unwrap()
}

pub struct Agreement {
    pub runs: usize,
    pub optimal: usize,
    pub feasible: usize,
}

/// SA with single-flip LBP for `steps` on `count` minis.
pub fn oracle_agreement(count: u64, steps: u64) -> Agreement {
    let mut out = Agreement {
        runs: 0,
        optimal: 0,
        feasible: 0,
    };
    for i in 0..count {
        let inst = mini_instance(i);
        assert!(inst.n() <= 12);
        let opt = brute_force(&inst, None).unwrap().obj_opt.unwrap();
        let mut cfg = EnsembleConfig::sa(
            AnnealSchedule::from_halving_steps(1.0, steps as f64 / 10.0).unwrap(),
            EnergyParams::linear(2.0).unwrap(),
            Budget::steps(steps),
        );
        cfg.chains = 4;
        cfg.proposal = Proposal::Mlbp { steps: 1 };
        cfg.seed = i;
        cfg.trace_every = steps;
        let res = run_ensemble(&inst, &cfg).unwrap();
        out.runs += 1;
        if let (Some(x), Some(obj)) = (&res.incumbent, res.incumbent_obj) {
            if inst.is_feasible(x, cfg.tolerance).unwrap() {
                out.feasible += 1;
            }
            if obj == opt {
                out.optimal += 1;
            }
        }
    }
    out
}
