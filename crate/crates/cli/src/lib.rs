//! Command-line front end: instance generation, solving, batch experiments,
//! parameter tuning and format conversion.
//!
//! Exit codes: 0 finished with a feasible solution, 2 finished without one,
//! 1 usage or configuration error, 3 I/O or parse error. Errors are printed
//! to standard error as `error[CODE]: message`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use gibbs_ilp::bench::{
    grid_preset, grid_search, ladder_rule, param_preset, run_experiment, ExperimentSpec, GridSpec,
    InstanceSource,
};
use gibbs_ilp::instances::{preset, GraphSpec, ProblemSpec, ScSpec};
use gibbs_ilp::io::{
    format_g17, load_instance, read_mps_file, to_canonical_json, write_mps, write_trace,
};
use gibbs_ilp::tempering::{make_ladder, AnnealSchedule, Budget, LadderKind};
use gibbs_ilp::{
    run_ensemble, EnergyParams, EnsembleConfig, Error, FeasTolerance, IlpInstance, Mode,
    PenaltyExponent, Proposal,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gibbs-ilp", version, about = "Binary ILP optimization by discrete Gibbs sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a benchmark instance as canonical JSON.
    Generate(GenerateArgs),
    /// Run the sampler ensemble on an instance.
    Solve(Box<SolveArgs>),
    /// Run a batch experiment described by a JSON spec.
    Bench(SpecArgs),
    /// Tune SA temperature and penalty on a grid described by a JSON spec.
    Gridsearch(GridArgs),
    /// Convert between MPS and canonical JSON (by file extension).
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    Mvc,
    Mis,
    Sc,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Problem family [default: taken from --preset]
    #[arg(long, value_enum)]
    problem: Option<ProblemArg>,
    /// Named recipe, e.g. mvc1000, mis1500, sc2000, mvc2000-ood [default: none]
    #[arg(long)]
    preset: Option<String>,
    /// Nodes (mvc, mis) or sets (sc) [default: none]
    #[arg(long)]
    n: Option<usize>,
    /// Barabási–Albert attachment count (mvc, mis) [default: none]
    #[arg(long)]
    affinity: Option<usize>,
    /// Erdős–Rényi edge probability (mvc, mis) [default: none]
    #[arg(long)]
    p: Option<f64>,
    /// Fraction of sets covering each element (sc) [default: none]
    #[arg(long)]
    density: Option<f64>,
    /// Elements to cover (sc)
    #[arg(long, default_value_t = 5000)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sa,
    SaReheat,
    TauPt,
    LambdaPt,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Sa => Mode::Sa,
            ModeArg::SaReheat => Mode::SaReheat,
            ModeArg::TauPt => Mode::TauPt,
            ModeArg::LambdaPt => Mode::LambdaPt,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProposalArg {
    Rwm,
    Mlbp,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Instance file (.mps or canonical .json)
    #[arg(long)]
    instance: PathBuf,
    /// Schedule [default: sa, or the mode of --preset-params]
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "mlbp")]
    proposal: ProposalArg,
    /// Flips per MLBP proposal
    #[arg(long = "L", default_value_t = 3)]
    l: usize,
    /// Start temperature [default: from --preset-params]
    #[arg(long)]
    tau: Option<f64>,
    /// Penalty weight [default: from --preset-params]
    #[arg(long)]
    lambda: Option<f64>,
    /// Temperature ladder low end for tau-pt [default: --tau]
    #[arg(long)]
    tau_min: Option<f64>,
    /// Temperature ladder high end for tau-pt [default: 2 × --tau]
    #[arg(long)]
    tau_max: Option<f64>,
    /// Penalty ladder low end for lambda-pt [default: --lambda / 2]
    #[arg(long)]
    lambda_min: Option<f64>,
    /// Penalty ladder high end for lambda-pt [default: --lambda]
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long, default_value_t = 15)]
    chains: usize,
    /// Steps between swap rounds
    #[arg(long, default_value_t = 200)]
    swap_interval: u64,
    /// Steps over which the temperature halves
    #[arg(long, default_value_t = 100_000.0)]
    gamma_halving_steps: f64,
    /// Steps between reheats for sa-reheat [default: max-steps / 4]
    #[arg(long)]
    reheat_period: Option<u64>,
    /// Wall-clock budget in seconds [default: none]
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Step budget [default: none]
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    penalty_exponent: u32,
    /// Feasibility tolerance
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Steps between periodic trace records
    #[arg(long, default_value_t = 100)]
    trace_every: u64,
    /// Trace CSV output [default: none]
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Solution JSON output [default: none]
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Tuned settings, e.g. mvc-sa, mis-tau-pt, sc-lambda-pt [default: none]
    #[arg(long)]
    preset_params: Option<String>,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Experiment spec (JSON)
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Grid-search spec (JSON)
    #[arg(long)]
    spec: PathBuf,
    /// Result JSON output [default: none]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

/// Grid-search spec file: instances plus the grid; empty candidate lists
/// are filled from `grid_preset` when given.
#[derive(Debug, Deserialize)]
struct GridFile {
    instances: InstanceSource,
    #[serde(flatten)]
    grid: GridSpec,
    #[serde(default = "default_grid_mode")]
    mode: Mode,
    #[serde(default)]
    grid_preset: Option<String>,
}

fn default_grid_mode() -> Mode {
    Mode::Sa
}

#[derive(Debug, Serialize)]
struct Solution<'a> {
    instance: &'a str,
    objective: f64,
    feasible: bool,
    x: Vec<u8>,
    seed: u64,
    mode: &'a str,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<i32, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Runs with the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion)
                || e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            {
                let _ = write!(out, "{text}");
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    EXIT_USAGE
                } else {
                    EXIT_OK
                };
            }
            let msg = text.trim().strip_prefix("error: ").unwrap_or(text.trim());
            let _ = writeln!(err, "error[usage]: {msg}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(&a, out),
        Command::Solve(a) => solve(&a, out),
        Command::Bench(a) => bench(&a, out),
        Command::Gridsearch(a) => gridsearch(&a, out),
        Command::Convert(a) => convert(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error[usage]: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(Error::AllInfeasible)) => {
            let _ = writeln!(err, "error[{}]: {}", Error::AllInfeasible.code(), Error::AllInfeasible);
            EXIT_INFEASIBLE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            if e.is_io_or_parse() {
                EXIT_IO
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| {
        Failure::Lib(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

fn generate(a: &GenerateArgs, out: &mut dyn Write) -> CmdResult {
    let (spec, name) = match &a.preset {
        Some(p) => {
            let spec = preset(p)?;
            if let Some(prob) = a.problem {
                let want = match prob {
                    ProblemArg::Mvc => "mvc",
                    ProblemArg::Mis => "mis",
                    ProblemArg::Sc => "sc",
                };
                if spec.family() != want {
                    return usage(format!("preset {p} is a {} recipe", spec.family()));
                }
            }
            if a.n.is_some() || a.affinity.is_some() || a.p.is_some() || a.density.is_some() {
                return usage("--preset cannot be combined with --n, --affinity, --p or --density");
            }
            (spec, Some(format!("{p}-s{}", a.seed)))
        }
        None => {
            let Some(problem) = a.problem else {
                return usage("either --problem or --preset is required");
            };
            let Some(n) = a.n else {
                return usage("--n is required without --preset");
            };
            let graph = || match (a.affinity, a.p) {
                (Some(affinity), None) => Ok(GraphSpec::Ba {
                    n_nodes: n,
                    affinity,
                }),
                (None, Some(p)) => Ok(GraphSpec::Er {
                    n_nodes: n,
                    edge_prob: p,
                }),
                _ => usage("graph problems need exactly one of --affinity or --p"),
            };
            let spec = match problem {
                ProblemArg::Mvc => ProblemSpec::Mvc { graph: graph()? },
                ProblemArg::Mis => ProblemSpec::Mis { graph: graph()? },
                ProblemArg::Sc => {
                    let Some(density) = a.density else {
                        return usage("sc needs --density");
                    };
                    ProblemSpec::Sc(ScSpec {
                        n_vars: n,
                        n_rows: a.rows,
                        density,
                    })
                }
            };
            (spec, None)
        }
    };
    let mut inst = spec.generate(a.seed)?;
    if let Some(name) = name {
        inst.set_name(name);
    }
    write_file(&a.out, to_canonical_json(&inst).as_bytes())?;
    let _ = writeln!(
        out,
        "instance={} n={} m={} nnz={}",
        inst.name(),
        inst.n(),
        inst.m(),
        inst.nnz()
    );
    Ok(EXIT_OK)
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        usage(format!("--{name} must be positive, got {v}"))
    }
}

fn build_config(a: &SolveArgs, inst: &IlpInstance) -> Result<EnsembleConfig, Failure> {
    let pre = a.preset_params.as_deref().map(param_preset).transpose()?;
    let mode: Mode = a
        .mode
        .map(Mode::from)
        .or(pre.map(|p| p.mode))
        .unwrap_or(Mode::Sa);
    let from_preset_mode = |m: Mode| pre.filter(|p| p.mode == m);
    let tau = a.tau.or(pre.map(|p| p.tau.0));
    let lambda = a.lambda.or(pre.map(|p| p.lambda.1));
    let need = |v: Option<f64>, flag: &str| match v {
        Some(v) => positive(flag, v),
        None => usage(format!("--{flag} is required for {} (or use --preset-params)", mode.as_str())),
    };

    let exponent = match a.penalty_exponent {
        1 => PenaltyExponent::Linear,
        _ => PenaltyExponent::Squared,
    };
    let (tau0, params, ladder) = match mode {
        Mode::Sa | Mode::SaReheat => {
            let tau = need(tau, "tau")?;
            let lambda = need(lambda, "lambda")?;
            (tau, EnergyParams::new(lambda, exponent)?, None)
        }
        Mode::TauPt => {
            let lambda = need(lambda, "lambda")?;
            let (lo, hi) = match (a.tau_min, a.tau_max, from_preset_mode(Mode::TauPt)) {
                (Some(lo), Some(hi), _) => (lo, hi),
                (None, None, Some(p)) if a.tau.is_none() => p.tau,
                (None, None, _) => ladder_rule(need(tau, "tau")?, lambda).tau_pt,
                _ => return usage("give both --tau-min and --tau-max"),
            };
            let ladder = make_ladder(lo, hi, a.chains, LadderKind::Temperature)?;
            (lo, EnergyParams::new(lambda, exponent)?, Some(ladder))
        }
        Mode::LambdaPt => {
            let tau = need(tau, "tau")?;
            let (lo, hi) = match (a.lambda_min, a.lambda_max, from_preset_mode(Mode::LambdaPt)) {
                (Some(lo), Some(hi), _) => (lo, hi),
                (None, None, Some(p)) if a.lambda.is_none() => p.lambda,
                (None, None, _) => ladder_rule(tau, need(lambda, "lambda")?).lambda_pt,
                _ => return usage("give both --lambda-min and --lambda-max"),
            };
            let ladder = make_ladder(lo, hi, a.chains, LadderKind::Penalty)?;
            (tau, EnergyParams::new(hi, exponent)?, Some(ladder))
        }
    };
    let halving = positive("gamma-halving-steps", a.gamma_halving_steps)?;
    let mut schedule = AnnealSchedule::from_halving_steps(tau0, halving)?;
    if let Some(period) = a.reheat_period {
        if mode != Mode::SaReheat {
            return usage("--reheat-period only applies to sa-reheat");
        }
        schedule = schedule.with_reheat(period)?;
    }
    if a.max_steps.is_none() && a.budget_seconds.is_none() {
        return usage("a budget is required: --max-steps and/or --budget-seconds");
    }
    let proposal = match a.proposal {
        ProposalArg::Rwm => Proposal::Rwm,
        ProposalArg::Mlbp => Proposal::Mlbp { steps: a.l },
    };
    let config = EnsembleConfig {
        mode,
        chains: a.chains,
        swap_interval: a.swap_interval,
        proposal,
        schedule,
        ladder,
        params,
        tolerance: FeasTolerance::new(a.eps)?,
        seed: a.seed,
        budget: Budget {
            max_steps: a.max_steps,
            max_seconds: a.budget_seconds,
        },
        trace_every: a.trace_every,
    };
    config.validate(inst)?;
    Ok(config)
}

fn solve(a: &SolveArgs, out: &mut dyn Write) -> CmdResult {
    let inst = load_instance(&a.instance)?;
    let config = build_config(a, &inst)?;
    let result = run_ensemble(&inst, &config)?;
    if let Some(path) = &a.trace {
        let mut buf = Vec::new();
        write_trace(&result.trace, &mut buf)?;
        write_file(path, &buf)?;
    }
    let _ = writeln!(out, "instance={}", inst.name());
    let _ = writeln!(out, "mode={}", config.mode.as_str());
    let _ = writeln!(out, "steps={}", result.steps_completed);
    if let Some(rate) = result.swap_stats.acceptance_rate() {
        let _ = writeln!(out, "swap_acceptance={}", format_g17(rate));
        let trips: u64 = result.swap_stats.round_trips.iter().sum();
        let _ = writeln!(out, "round_trips={trips}");
    }
    let _ = writeln!(out, "wall_seconds={:.3}", result.wall_seconds);
    match (&result.incumbent, result.incumbent_obj) {
        (Some(x), Some(obj)) => {
            let _ = writeln!(out, "feasible=true");
            let _ = writeln!(out, "incumbent_obj={}", format_g17(obj));
            if let Some(path) = &a.solution {
                let sol = Solution {
                    instance: inst.name(),
                    objective: obj,
                    feasible: true,
                    x: x.iter().map(|&b| u8::from(b)).collect(),
                    seed: a.seed,
                    mode: config.mode.as_str(),
                };
                let text = serde_json::to_string_pretty(&sol).map_err(Error::from)?;
                write_file(path, text.as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        _ => {
            let _ = writeln!(out, "feasible=false");
            let _ = writeln!(out, "incumbent_obj=none");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn spec_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn opt_g17(v: Option<f64>) -> String {
    v.map(format_g17).unwrap_or_else(|| "none".into())
}

fn bench(a: &SpecArgs, out: &mut dyn Write) -> CmdResult {
    let spec: ExperimentSpec = read_json(&a.spec)?;
    let report = run_experiment(&spec, &spec_dir(&a.spec))?;
    for agg in &report.aggregates {
        let _ = writeln!(
            out,
            "instance={} runs={} feasible_runs={} mean_obj={} std_obj={} mean_gap_percent={} std_gap_percent={}",
            agg.instance,
            agg.runs,
            agg.feasible_runs,
            opt_g17(agg.mean_obj),
            opt_g17(agg.std_obj),
            opt_g17(agg.mean_gap_percent),
            opt_g17(agg.std_gap_percent),
        );
    }
    let _ = writeln!(out, "report={}", report.dir.display());
    let all_feasible = report.runs.iter().all(|r| r.incumbent_obj.is_some());
    Ok(if all_feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn gridsearch(a: &GridArgs, out: &mut dyn Write) -> CmdResult {
    let mut file: GridFile = read_json(&a.spec)?;
    if let Some(family) = &file.grid_preset {
        let (taus, lambdas) = grid_preset(family)?;
        if file.grid.tau_candidates.is_empty() {
            file.grid.tau_candidates = taus;
        }
        if file.grid.lambda_candidates.is_empty() {
            file.grid.lambda_candidates = lambdas;
        }
    }
    let insts = file.instances.resolve(&spec_dir(&a.spec))?;
    let res = grid_search(&insts, &file.grid, file.mode)?;
    for c in &res.cells {
        let score = c.mean_obj.map(format_g17).unwrap_or_else(|| "infeasible".into());
        let _ = writeln!(
            out,
            "tau={} lambda={} mean_obj={score}",
            format_g17(c.tau),
            format_g17(c.lambda)
        );
    }
    let l = res.ladders;
    let _ = writeln!(out, "tau_best={}", format_g17(res.tau_best));
    let _ = writeln!(out, "lambda_best={}", format_g17(res.lambda_best));
    let _ = writeln!(
        out,
        "tau_pt_ladder={},{} lambda={}",
        format_g17(l.tau_pt.0),
        format_g17(l.tau_pt.1),
        format_g17(l.tau_pt_lambda)
    );
    let _ = writeln!(
        out,
        "lambda_pt_ladder={},{} tau={}",
        format_g17(l.lambda_pt.0),
        format_g17(l.lambda_pt.1),
        format_g17(l.lambda_pt_tau)
    );
    if let Some(path) = &a.out {
        let text = serde_json::to_string_pretty(&res).map_err(Error::from)?;
        write_file(path, text.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn is_mps(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mps"))
}

fn convert(a: &ConvertArgs, out: &mut dyn Write) -> CmdResult {
    let inst = if is_mps(&a.input) {
        read_mps_file(&a.input)?
    } else {
        load_instance(&a.input)?
    };
    let bytes = if is_mps(&a.output) {
        write_mps(&inst)
    } else {
        to_canonical_json(&inst)
    };
    write_file(&a.output, bytes.as_bytes())?;
    let _ = writeln!(out, "instance={} n={} m={}", inst.name(), inst.n(), inst.m());
    Ok(EXIT_OK)
}
