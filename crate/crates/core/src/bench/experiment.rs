use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::gap::relative_gap;
use super::sources::{derive_seed, InstanceSource};
use crate::error::{Error, Result};
use crate::io::{format_g17, write_trace};
use crate::tempering::{run_ensemble, EnsembleConfig};

pub const SUMMARY_HEADER: [&str; 9] = [
    "instance",
    "seed",
    "mode",
    "incumbent_obj",
    "feasible",
    "steps",
    "wall_seconds",
    "bks",
    "gap_percent",
];

pub const AGGREGATE_HEADER: [&str; 9] = [
    "instance",
    "runs",
    "feasible_runs",
    "bks",
    "bks_source",
    "mean_obj",
    "std_obj",
    "mean_gap_percent",
    "std_gap_percent",
];

/// A batch of runs: every instance × every seed under one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub instances: InstanceSource,
    /// Template; its `seed` is replaced per run.
    pub config: EnsembleConfig,
    pub seeds: Vec<u64>,
    /// When set, run `s` uses `derive_seed(master_seed, s)` instead of `s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    pub output_dir: PathBuf,
    /// Best-known objectives by instance name.
    #[serde(default)]
    pub bks: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub instance: String,
    pub seed: u64,
    pub mode: String,
    pub incumbent_obj: Option<f64>,
    pub steps: u64,
    pub wall_seconds: f64,
    pub bks: Option<f64>,
    pub gap_percent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BksSource {
    /// Given in the experiment spec.
    Spec,
    /// Read from the instance's `bks` metadata entry.
    Metadata,
    /// Best incumbent over this experiment's runs.
    BestRun,
}

impl BksSource {
    fn as_str(self) -> &'static str {
        match self {
            BksSource::Spec => "spec",
            BksSource::Metadata => "metadata",
            BksSource::BestRun => "best-run",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub instance: String,
    pub runs: usize,
    pub feasible_runs: usize,
    pub bks: Option<f64>,
    pub bks_source: Option<BksSource>,
    pub mean_obj: Option<f64>,
    pub std_obj: Option<f64>,
    pub mean_gap_percent: Option<f64>,
    pub std_gap_percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub dir: PathBuf,
    pub runs: Vec<RunSummary>,
    pub aggregates: Vec<AggregateRow>,
}

/// Mean and sample standard deviation (`n − 1` denominator, 0 for one
/// value).
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Some((mean, (ss / (n - 1.0)).sqrt()))
}

fn path_component(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c == '/' || c == '\\' || c.is_control() { '_' } else { c })
        .collect();
    match s.as_str() {
        "" | "." | ".." => format!("_{s}"),
        _ => s,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_g17).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

/// Runs the experiment and writes `<output_dir>/<name>/<instance>/<seed>/trace.csv`
/// for every run plus `summary.csv` and `aggregate.csv` in
/// `<output_dir>/<name>/`. Instance files resolve against `base`.
pub fn run_experiment(spec: &ExperimentSpec, base: &Path) -> Result<ExperimentReport> {
    if spec.seeds.is_empty() {
        return Err(Error::ConfigInvalid("experiment needs at least one seed".into()));
    }
    if spec.seeds.iter().collect::<HashSet<_>>().len() != spec.seeds.len() {
        return Err(Error::ConfigInvalid("experiment seeds must be distinct".into()));
    }
    let insts = spec.instances.resolve(base)?;
    let mut names = HashSet::new();
    for inst in &insts {
        if !names.insert(path_component(inst.name())) {
            return Err(Error::ConfigInvalid(format!(
                "instance name {:?} is not unique",
                inst.name()
            )));
        }
        spec.config.validate(inst)?;
    }
    let dir = spec.output_dir.join(path_component(&spec.name));

    let mut runs = Vec::new();
    let mut aggregates = Vec::new();
    for inst in &insts {
        let mut inst_runs = Vec::new();
        for &seed in &spec.seeds {
            let mut config = spec.config.clone();
            config.seed = spec.master_seed.map_or(seed, |m| derive_seed(m, seed));
            let result = run_ensemble(inst, &config)?;
            log::info!(
                "{} seed {seed}: {:?} after {} steps",
                inst.name(),
                result.incumbent_obj,
                result.steps_completed
            );
            let run_dir = dir.join(path_component(inst.name())).join(seed.to_string());
            std::fs::create_dir_all(&run_dir).map_err(|e| Error::io(&run_dir, e))?;
            let trace_path = run_dir.join("trace.csv");
            let file = File::create(&trace_path).map_err(|e| Error::io(&trace_path, e))?;
            write_trace(&result.trace, std::io::BufWriter::new(file))?;
            inst_runs.push(RunSummary {
                instance: inst.name().to_string(),
                seed,
                mode: spec.config.mode.as_str().to_string(),
                incumbent_obj: result.incumbent_obj,
                steps: result.steps_completed,
                wall_seconds: result.wall_seconds,
                bks: None,
                gap_percent: None,
            });
        }

        let objs: Vec<f64> = inst_runs.iter().filter_map(|r| r.incumbent_obj).collect();
        let (bks, source) = if let Some(&b) = spec.bks.get(inst.name()) {
            (Some(b), Some(BksSource::Spec))
        } else if let Some(b) = inst.metadata().get("bks").and_then(|s| s.parse::<f64>().ok()) {
            (Some(b), Some(BksSource::Metadata))
        } else if let Some(b) = objs.iter().copied().reduce(f64::min) {
            (Some(b), Some(BksSource::BestRun))
        } else {
            (None, None)
        };
        let mut gaps = Vec::new();
        for r in &mut inst_runs {
            r.bks = bks;
            if let (Some(obj), Some(b)) = (r.incumbent_obj, bks) {
                r.gap_percent = relative_gap(obj, b).ok();
                gaps.extend(r.gap_percent);
            }
        }
        let obj_stats = mean_std(&objs);
        let gap_stats = mean_std(&gaps);
        aggregates.push(AggregateRow {
            instance: inst.name().to_string(),
            runs: inst_runs.len(),
            feasible_runs: objs.len(),
            bks,
            bks_source: source,
            mean_obj: obj_stats.map(|s| s.0),
            std_obj: obj_stats.map(|s| s.1),
            mean_gap_percent: gap_stats.map(|s| s.0),
            std_gap_percent: gap_stats.map(|s| s.1),
        });
        runs.extend(inst_runs);
    }

    let mut w = csv_writer(&dir.join("summary.csv"))?;
    w.write_record(SUMMARY_HEADER)?;
    for r in &runs {
        w.write_record([
            r.instance.clone(),
            r.seed.to_string(),
            r.mode.clone(),
            opt(r.incumbent_obj),
            r.incumbent_obj.is_some().to_string(),
            r.steps.to_string(),
            format_g17(r.wall_seconds),
            opt(r.bks),
            opt(r.gap_percent),
        ])?;
    }
    w.flush()?;
    let mut w = csv_writer(&dir.join("aggregate.csv"))?;
    w.write_record(AGGREGATE_HEADER)?;
    for a in &aggregates {
        w.write_record([
            a.instance.clone(),
            a.runs.to_string(),
            a.feasible_runs.to_string(),
            opt(a.bks),
            a.bks_source.map(BksSource::as_str).unwrap_or_default().to_string(),
            opt(a.mean_obj),
            opt(a.std_obj),
            opt(a.mean_gap_percent),
            opt(a.std_gap_percent),
        ])?;
    }
    w.flush()?;
    Ok(ExperimentReport {
        dir,
        runs,
        aggregates,
    })
}
