//! Checks parsed MPS fixtures against hand-transcribed original models by
//! evaluating both on every assignment.

use std::path::{Path, PathBuf};

use gibbs_ilp::io::read_mps_file;
use gibbs_ilp::{EnergyParams, FeasTolerance, PenaltyExponent};
use serde_json::Value;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("core")
        .join("tests")
        .join("fixtures")
        .join("mps")
}

fn load(name: &str) -> Value {
    let text = std::fs::read_to_string(fixture_dir().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn reals(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

struct Original {
    maximize: bool,
    c: Vec<f64>,
    rows: Vec<(Vec<f64>, String, f64)>,
    fixed: Vec<(usize, f64)>,
    constant: f64,
}

impl Original {
    fn parse(v: &Value) -> Self {
        Original {
            maximize: v["maximize"].as_bool().unwrap(),
            c: reals(&v["c"]),
            rows: v["rows"]
                .as_array()
                .unwrap()
                .iter()
                .map(|r| {
                    (
                        reals(&r["a"]),
                        r["sense"].as_str().unwrap().to_string(),
                        r["rhs"].as_f64().unwrap(),
                    )
                })
                .collect(),
            fixed: v
                .get("fixed")
                .and_then(Value::as_array)
                .map(|a| {
                    a.iter()
                        .map(|p| (p[0].as_u64().unwrap() as usize, p[1].as_f64().unwrap()))
                        .collect()
                })
                .unwrap_or_default(),
            constant: v.get("constant").and_then(Value::as_f64).unwrap_or(0.0),
        }
    }

    /// Minimization objective and total absolute violation.
    fn eval(&self, x: &[bool]) -> (f64, f64) {
        let dot = |a: &[f64]| -> f64 {
            a.iter()
                .zip(x)
                .map(|(&a, &xi)| if xi { a } else { 0.0 })
                .sum()
        };
        let obj = dot(&self.c);
        let obj = if self.maximize { -obj } else { obj };
        let mut viol = 0.0;
        for (a, sense, rhs) in &self.rows {
            let act = dot(a);
            viol += match sense.as_str() {
                "L" => (act - rhs).max(0.0),
                "G" => (rhs - act).max(0.0),
                "E" => (act - rhs).abs(),
                s => panic!("sense {s}"),
            };
        }
        for &(j, v) in &self.fixed {
            viol += (f64::from(u8::from(x[j])) - v).abs();
        }
        (obj, viol)
    }
}

/// Runs every fixture in `oracles.json`; returns the number checked, or a
/// description of the first disagreement.
pub fn check_all_fixtures() -> Result<usize, String> {
    let oracles = load("oracles.json");
    let oracles = oracles.as_object().unwrap();
    let lambda = 3.0;
    let params = EnergyParams::new(lambda, PenaltyExponent::Linear).unwrap();
    for (file, model) in oracles {
        let orig = Original::parse(model);
        let inst = read_mps_file(&fixture_dir().join(file)).map_err(|e| format!("{file}: {e}"))?;
        let n = orig.c.len();
        if inst.n() != n || n > 10 {
            return Err(format!("{file}: n = {} (expected {n})", inst.n()));
        }
        if orig.constant != 0.0 {
            let recorded = inst.metadata().get("objective_constant_dropped");
            if recorded.map(|s| s.parse::<f64>().unwrap()) != Some(orig.constant) {
                return Err(format!("{file}: objective constant not recorded"));
            }
        }
        for mask in 0u32..(1 << n) {
            let x: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
            let (obj, viol) = orig.eval(&x);
            let got_obj = inst.objective(&x).unwrap();
            let got_viol = inst.violation(&x, PenaltyExponent::Linear).unwrap().total;
            let energy = inst.energy(&x, params).unwrap();
            let feasible = inst.is_feasible(&x, FeasTolerance::exact()).unwrap();
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
            if !close(got_obj, obj)
                || !close(got_viol, viol)
                || !close(energy, obj + lambda * viol)
                || feasible != (viol == 0.0)
            {
                return Err(format!(
                    "{file}: x={x:?} canonical (obj {got_obj}, viol {got_viol}, feasible {feasible}) vs original (obj {obj}, viol {viol})"
                ));
            }
        }
    }
    Ok(oracles.len())
}

/// Checks that each rejection fixture fails with its documented error code.
pub fn check_rejections() -> Result<usize, String> {
    let table = load("rejections.json");
    let table = table.as_object().unwrap();
    for (file, code) in table {
        match read_mps_file(&fixture_dir().join(file)) {
            Ok(_) => return Err(format!("{file}: accepted")),
            Err(e) if e.code() == code.as_str().unwrap() => {}
            Err(e) => return Err(format!("{file}: got {} ({e})", e.code())),
        }
    }
    Ok(table.len())
}
