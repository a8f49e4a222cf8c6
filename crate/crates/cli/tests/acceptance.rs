//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

#[allow(dead_code)]
#[path = "../../core/tests/common/exact_kernels.rs"]
mod exact_kernels;
#[allow(dead_code)]
#[path = "../../core/tests/common/landscape.rs"]
mod landscape;
#[allow(dead_code)]
#[path = "../../core/tests/common/minis.rs"]
mod minis;
#[allow(dead_code)]
#[path = "../../core/tests/common/mps_oracle.rs"]
mod mps_oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use exact_kernels::{joint_swap_exactness, single_flip_exactness, SingleFlip};
use landscape::{random_feasible, random_sparse, rel_close};
use gibbs_ilp::bench::{grid_search, ladder_rule, param_preset, relative_gap, GridSpec};
use gibbs_ilp::instances::{gen_ba_graph, gen_mvc, gen_sc, preset, ProblemSpec, ScSpec};
use gibbs_ilp::io::{read_trace, write_canonical_file};
use gibbs_ilp::tempering::{
    deo_pairs, make_ladder, run_ensemble, AnnealSchedule, Budget, EnsembleConfig, LadderKind,
};
use gibbs_ilp::{ChainState, EnergyParams, IlpInstance, Mode, PenaltyExponent, Proposal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs as f64, || {
        format!("took {:.1}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn ac1() -> Outcome {
    let t = Instant::now();
    let (tv, db) = single_flip_exactness(SingleFlip::Lbp);
    ensure(tv < 1e-8, || format!("tv {tv:e}"))?;
    ensure(db < 1e-12, || format!("detailed balance {db:e}"))?;
    within(t.elapsed(), 10)?;
    Ok(format!("max tv {tv:.1e}, max detailed-balance gap {db:.1e}"))
}

fn ac2() -> Outcome {
    let t = Instant::now();
    let (tv, db) = single_flip_exactness(SingleFlip::Rwm);
    ensure(tv < 1e-8, || format!("tv {tv:e}"))?;
    ensure(db < 1e-12, || format!("detailed balance {db:e}"))?;
    within(t.elapsed(), 10)?;
    Ok(format!("max tv {tv:.1e}, max detailed-balance gap {db:.1e}"))
}

fn ac3() -> Outcome {
    let t = Instant::now();
    let (tau, lambda) = joint_swap_exactness();
    ensure(tau < 1e-8, || format!("tau swap tv {tau:e}"))?;
    ensure(lambda < 1e-8, || format!("lambda swap tv {lambda:e}"))?;
    within(t.elapsed(), 30)?;
    Ok(format!("tv tau-swap {tau:.1e}, lambda-swap {lambda:.1e}"))
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.gen_range(1..=200);
        let inst = random_sparse(&mut rng, n);
        let exp = [PenaltyExponent::Linear, PenaltyExponent::Squared][i % 2];
        let params = EnergyParams::new(rng.gen_range(0.5..10.0), exp).unwrap();
        let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let st = ChainState::new(&inst, &x, params).unwrap();
        let e = inst.energy(&x, params).unwrap();
        let deltas = st.flip_deltas(&inst);
        for j in 0..n {
            let mut y = x.clone();
            y[j] = !y[j];
            let want = inst.energy(&y, params).unwrap() - e;
            worst = worst.max((deltas[j] - want).abs() / want.abs().max(1.0));
            ensure(rel_close(deltas[j], want, 1e-9), || {
                format!("instance {i} var {j}: {} vs {want}", deltas[j])
            })?;
        }
    }

    let inst = random_sparse(&mut rng, 60);
    let params = EnergyParams::new(3.0, PenaltyExponent::Squared).unwrap();
    let mut st = ChainState::new(&inst, &[false; 60], params).unwrap();
    let mut flips = Vec::new();
    for _ in 0..1_000_000 {
        flips.clear();
        let len = rng.gen_range(1..=3);
        flips.extend(rand::seq::index::sample(&mut rng, 60, len));
        st.apply_flips(&inst, &flips).unwrap();
    }
    let fresh = ChainState::new(&inst, st.x(), params).unwrap();
    let pairs = [
        (st.energy(), fresh.energy()),
        (st.objective(), fresh.objective()),
        (st.violation(), fresh.violation()),
    ];
    ensure(pairs.iter().all(|&(a, b)| rel_close(a, b, 1e-6)), || {
        format!("cached vs fresh after 1e6 moves: {pairs:?}")
    })?;
    ensure(
        st.activities()
            .iter()
            .zip(fresh.activities())
            .all(|(a, b)| rel_close(*a, *b, 1e-6)),
        || "row activities drifted".into(),
    )?;
    Ok(format!("worst delta error {worst:.1e}; caches coherent after 1e6 moves"))
}

fn ac5() -> Outcome {
    let t = Instant::now();
    let a = minis::oracle_agreement(50, 100_000);
    let detail = format!("{}/{} optimal, {}/{} feasible", a.optimal, a.runs, a.feasible, a.runs);
    ensure(a.feasible == a.runs, || detail.clone())?;
    ensure(a.optimal * 100 >= 95 * a.runs, || detail.clone())?;
    within(t.elapsed(), 60)?;
    Ok(detail)
}

fn ac6() -> Outcome {
    let g = gen_ba_graph(1000, 70, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    ensure(g.edges().len() == 65_100, || format!("{} edges", g.edges().len()))?;
    let mvc = gen_mvc(&g);
    ensure((mvc.n(), mvc.m()) == (1000, 65_100), || format!("mvc n={} m={}", mvc.n(), mvc.m()))?;
    let spec = ScSpec {
        n_vars: 2000,
        n_rows: 5000,
        density: 0.05,
    };
    let sc = gen_sc(&spec, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    ensure((sc.n(), sc.m()) == (2000, 5000), || format!("sc n={} m={}", sc.n(), sc.m()))?;
    let widths: Vec<usize> = (0..sc.m()).map(|r| sc.rows().lane_len(r)).collect();
    ensure(widths.iter().all(|&w| w == 100), || "set-cover row width differs from 100".into())?;
    Ok("65100 edges; mvc 1000x65100; sc 2000x5000 with 100 per row".into())
}

fn ac7() -> Outcome {
    let s = AnnealSchedule::from_halving_steps(0.2, 100_000.0).unwrap();
    let ratio = s.anneal(100_000) / 0.2;
    ensure((0.4999995..=0.5000005).contains(&ratio), || format!("ratio {ratio}"))?;
    Ok(format!("tau(1e5)/tau0 = {ratio:.9}"))
}

fn ac8() -> Outcome {
    let a = relative_gap(460.9, 444.4).unwrap();
    let b = relative_gap(442.5, 444.4).unwrap();
    ensure((a - 3.71).abs() <= 0.005, || format!("gap {a}"))?;
    ensure((b + 0.43).abs() <= 0.005, || format!("gap {b}"))?;
    Ok(format!("{a:.4}%, {b:.4}%"))
}

fn ac9() -> Outcome {
    let r = ladder_rule(0.2, 1.0);
    ensure(r.tau_pt == (0.2, 0.4) && r.lambda_pt == (0.5, 1.0), || format!("{r:?}"))?;
    let inst = ProblemSpec::Mvc {
        graph: gibbs_ilp::instances::GraphSpec::Ba {
            n_nodes: 20,
            affinity: 2,
        },
    }
    .generate(0)
    .unwrap();
    let mut grid = GridSpec::new(vec![0.2], vec![1.0], Budget::steps(500));
    grid.chains = 2;
    grid.proposal = Proposal::Mlbp { steps: 1 };
    let res = grid_search(&[inst], &grid, Mode::Sa).unwrap();
    let l = res.ladders;
    ensure(
        (res.tau_best, res.lambda_best) == (0.2, 1.0)
            && l.tau_pt == (0.2, 0.4)
            && l.lambda_pt == (0.5, 1.0),
        || format!("{res:?}"),
    )?;
    Ok("tau-PT (0.2, 0.4), lambda-PT (0.5, 1)".into())
}

fn ac10() -> Outcome {
    for b in 2..=6usize {
        for r in 0..4u64 {
            let mut seen = vec![0u32; b - 1];
            for (i, j) in deo_pairs(r, b).into_iter().chain(deo_pairs(r + 1, b)) {
                ensure(j == i + 1, || format!("non-adjacent pair ({i}, {j})"))?;
                seen[i] += 1;
            }
            ensure(seen.iter().all(|&c| c == 1), || {
                format!("B={b} rounds {r},{}: counts {seen:?}", r + 1)
            })?;
        }
    }
    let inst = IlpInstance::new(
        "ref3",
        3,
        2,
        vec![1.0, -2.0, 3.0],
        &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0), (1, 2, 1.0)],
        vec![1.0, 1.0],
    )
    .unwrap();
    for (mode, kind) in [
        (Mode::TauPt, LadderKind::Temperature),
        (Mode::LambdaPt, LadderKind::Penalty),
    ] {
        for b in 2..=6usize {
            let mut cfg = EnsembleConfig::sa(
                AnnealSchedule::constant(1.0).unwrap(),
                EnergyParams::linear(1.0).unwrap(),
                Budget::steps(20),
            );
            cfg.mode = mode;
            cfg.chains = b;
            cfg.swap_interval = 10;
            cfg.proposal = Proposal::Mlbp { steps: 1 };
            cfg.ladder = Some(make_ladder(1.0, 1.0, b, kind).unwrap());
            let r = run_ensemble(&inst, &cfg).unwrap();
            let stats = &r.swap_stats;
            ensure(stats.attempts.iter().all(|&a| a == 1), || {
                format!("{mode:?} B={b}: attempts {:?} after two rounds", stats.attempts)
            })?;
            ensure(stats.acceptance_rate() == Some(1.0), || {
                format!("{mode:?} B={b}: acceptance {:?}", stats.acceptance_rate())
            })?;
        }
    }
    Ok("each adjacent pair once per two rounds for B=2..6; degenerate ladders accept 1.0".into())
}

fn ac11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for (name, family, count) in [("mvc1000", "mvc", 334), ("mis1500", "mis", 333), ("sc2000", "sc", 333)] {
        let inst = preset(name).unwrap().generate(2).unwrap();
        let p = param_preset(&format!("{family}-lambda-pt")).unwrap();
        let ladder = make_ladder(p.lambda.0, p.lambda.1, 15, LadderKind::Penalty).unwrap();
        for _ in 0..count {
            let x = random_feasible(&mut rng, &inst);
            for exp in [PenaltyExponent::Linear, PenaltyExponent::Squared] {
                let bits: Vec<u64> = ladder
                    .values()
                    .iter()
                    .map(|&l| inst.energy(&x, EnergyParams::new(l, exp).unwrap()).unwrap().to_bits())
                    .collect();
                ensure(bits.windows(2).all(|w| w[0] == w[1]), || {
                    format!("{name}: energies differ across the ladder")
                })?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} feasible assignments, 15-rung ladders, bitwise equal"))
}

/// Repeatedly takes a vertex of highest remaining degree until every edge
/// is covered.
fn greedy_max_degree_cover(inst: &IlpInstance) -> usize {
    let edges: Vec<(usize, usize)> = (0..inst.m())
        .map(|k| {
            let mut it = inst.row(k).map(|(j, _)| j);
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    let mut adj = vec![Vec::new(); inst.n()];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[u].push(e);
        adj[v].push(e);
    }
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut covered = vec![false; edges.len()];
    let mut size = 0;
    loop {
        let (v, &d) = deg.iter().enumerate().max_by_key(|&(i, d)| (*d, std::cmp::Reverse(i))).unwrap();
        if d == 0 {
            return size;
        }
        size += 1;
        for &e in &adj[v] {
            if !covered[e] {
                covered[e] = true;
                let (a, b) = edges[e];
                deg[a] -= 1;
                deg[b] -= 1;
            }
        }
    }
}

/// Wall budget of each run in the MLBP-3 against RWM comparison.
const COMPARE_SECONDS: f64 = 15.0;

fn ac12() -> Outcome {
    let t = Instant::now();
    let inst = preset("mvc1000").unwrap().generate(1).unwrap();
    let greedy = greedy_max_degree_cover(&inst) as f64;
    let config = |proposal, seconds, seed| {
        let mut cfg = EnsembleConfig::sa(
            AnnealSchedule::from_halving_steps(0.2, 100_000.0).unwrap(),
            EnergyParams::linear(1.0).unwrap(),
            Budget::seconds(seconds),
        );
        cfg.chains = 15;
        cfg.proposal = proposal;
        cfg.seed = seed;
        cfg
    };
    let r = run_ensemble(&inst, &config(Proposal::Mlbp { steps: 3 }, 60.0, 0)).unwrap();
    let obj = r.incumbent_obj.ok_or("no feasible cover in 60 s")?;
    ensure(inst.is_feasible(r.incumbent.as_ref().unwrap(), Default::default()).unwrap(), || {
        "incumbent infeasible".into()
    })?;
    ensure(obj <= greedy, || format!("sampler {obj} > greedy {greedy}"))?;

    let mean = |proposal| -> Result<f64, String> {
        let mut sum = 0.0;
        for seed in 0..5 {
            let r = run_ensemble(&inst, &config(proposal, COMPARE_SECONDS, seed)).unwrap();
            sum += r.incumbent_obj.ok_or(format!("{proposal:?} seed {seed}: no feasible cover"))?;
        }
        Ok(sum / 5.0)
    };
    let mlbp = mean(Proposal::Mlbp { steps: 3 })?;
    let rwm = mean(Proposal::Rwm)?;
    let detail = format!(
        "60 s cover {obj} vs greedy {greedy}; mean over 5 seeds at {COMPARE_SECONDS} s: MLBP-3 {mlbp} vs RWM {rwm}"
    );
    ensure(mlbp < rwm, || detail.clone())?;
    within(t.elapsed(), 600)?;
    Ok(detail)
}

fn ac13() -> Outcome {
    let parsed = mps_oracle::check_all_fixtures()?;
    let rejected = mps_oracle::check_rejections()?;
    Ok(format!("{parsed} fixtures agree with oracles, {rejected} rejected with expected codes"))
}

fn strip_wall(csv: &str) -> String {
    // first column is wall time
    csv.lines()
        .map(|l| l.split_once(',').map_or(l, |(_, rest)| rest))
        .collect::<Vec<_>>()
        .join("\n")
}

fn ac14() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("mis.json");
    let inst = preset("mis1500-ood").unwrap().generate(3).unwrap();
    write_canonical_file(&inst, &path).map_err(|e| e.to_string())?;
    let modes = ["sa", "sa-reheat", "tau-pt", "lambda-pt"];
    for mode in modes {
        let mut traces = Vec::new();
        for run in 0..2 {
            let trace = dir.path().join(format!("{mode}-{run}.csv"));
            let out = Command::new(env!("CARGO_BIN_EXE_gibbs-ilp"))
                .args(["solve", "--instance"])
                .arg(&path)
                .args(["--mode", mode, "--tau", "0.2", "--lambda", "2", "--chains", "5"])
                .args(["--swap-interval", "50", "--max-steps", "3000", "--seed", "42"])
                .args(["--trace-every", "25", "--trace"])
                .arg(&trace)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.code() == Some(0), || {
                format!("{mode}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
            })?;
            let text = std::fs::read_to_string(&trace).map_err(|e| e.to_string())?;
            read_trace(text.as_bytes()).map_err(|e| e.to_string())?;
            traces.push(strip_wall(&text));
        }
        ensure(traces[0] == traces[1], || format!("{mode}: traces differ"))?;
        ensure(traces[0].lines().count() > 2, || format!("{mode}: trace too short"))?;
    }
    Ok(format!("identical traces for {}", modes.join(", ")))
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("LBP kernel exactness", ac1),
        ("RWM kernel exactness", ac2),
        ("joint tempering invariance", ac3),
        ("flip-delta identity and cache coherence", ac4),
        ("SA agrees with brute force", ac5),
        ("generator scale pins", ac6),
        ("annealing halving pin", ac7),
        ("relative gap pin", ac8),
        ("ladder rule pin", ac9),
        ("DEO coverage and degenerate ladders", ac10),
        ("feasible energies equal across penalty ladder", ac11),
        ("MVC-1000 sanity against greedy and RWM", ac12),
        ("MPS ingestion fixtures", ac13),
        ("CLI trace determinism", ac14),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("AC{:<2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("AC{:<2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
