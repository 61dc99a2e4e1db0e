//! `spx`: generate instances, compute exact optima and exponents, run the
//! solvers, the invariant suite and benchmark sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use spx_core::exponents::{classical_exponent_case1, classical_exponent_case2, mcdiarmid_gamma, ExponentReport};
use spx_core::formats::{
    gen_planted_csp, gen_planted_lin2, gen_random_csp, gen_random_lin2, import_dimacs_cnf, parse_instance,
    random_assignment, write_instance, CspSpec, PredicateFamily, WeightMode,
};
use spx_core::harness::{
    bench_csv, bench_sweep, run_verify, BenchConfig, BenchFamily, Report, ReportFormat, RunConfig, Scale,
};
use spx_core::model::{compute_stats, format_rational, parse_rational};
use spx_core::oracle::{brute_force_minimum, threshold_set_count};
use spx_core::search::RngStream;
use spx_core::solvers::{bounded_sweep_solve, ranked_solve, solve_case1, solve_case2, SolveStatus, SolverConfig};
use spx_core::{Instance, Rational};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "spx", version, about = "Exact MAX-k-CSP and MAX-Ek-LIN2 optimization by sampling and ball search")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "SPX_THREADS", default_value_t = 0)]
    threads: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a random or planted instance in the text format.
    Gen(GenArgs),
    /// Exact optimum, threshold-set size and concentration bound.
    Oracle(OracleArgs),
    /// Classical and quantum exponents for an instance or a parameter grid.
    Exponents(ExponentArgs),
    /// Run one solver.
    Solve(SolveArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
    /// Sweep n and eta over a planted family.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Plant the assignment drawn from the seed so it satisfies every term.
    #[arg(long)]
    planted: bool,
    /// Lin2 coefficient magnitudes, comma-separated rationals.
    #[arg(long, default_value = "1")]
    coeffs: String,
    /// CSP predicate family.
    #[arg(long, default_value = "sat")]
    family: String,
    /// CSP weights: `unit`, `int:MAX` or `rat:NUM/DEN`.
    #[arg(long, default_value = "unit")]
    weights: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Lin2,
    Csp,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file; `.cnf` files are read as DIMACS.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "1/2")]
    eta: String,
    /// Minimizers to list.
    #[arg(long, default_value_t = 16)]
    list: usize,
}

#[derive(Args)]
struct ExponentArgs {
    /// Instance file; without it the grid of `--k`, `--eta`, `--gamma` is evaluated.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Comma-separated arities.
    #[arg(long, default_value = "3")]
    k: String,
    /// Comma-separated rationals.
    #[arg(long, default_value = "1/2")]
    eta: String,
    /// Comma-separated threshold exponents in (0, 1].
    #[arg(long, default_value = "1")]
    gamma: String,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(value_enum)]
    solver: Solver,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "1/2")]
    eta: String,
    #[arg(long, default_value = "1/10")]
    delta: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Known optimum for case1/case2; computed by enumeration when absent.
    #[arg(long)]
    h_min: Option<String>,
    /// Threshold exponent hint for ranked.
    #[arg(long)]
    gamma: Option<f64>,
    #[command(flatten)]
    knobs: Knobs,
}

#[derive(Args)]
struct Knobs {
    /// Work budget in raw draws plus ball points.
    #[arg(long, default_value_t = SolverConfig::default().budget)]
    budget: u64,
    /// Multiplier on the successful-set size estimates.
    #[arg(long, default_value_t = 1.0)]
    slack: f64,
    /// Override the search radius.
    #[arg(long)]
    radius: Option<usize>,
    /// Disable the sweep's enumeration fallback.
    #[arg(long)]
    no_fallback: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Case1,
    Case2,
    Ranked,
    Sweep,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "small")]
    scale: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "lin2")]
    family: GenKind,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Terms or constraints per variable.
    #[arg(long, default_value_t = 2)]
    density: usize,
    #[arg(long, default_value = "sat")]
    predicates: String,
    /// `A..B` (inclusive, step 2 with `A..B:2`) or a comma-separated list.
    #[arg(long, default_value = "10..14:2")]
    n: String,
    #[arg(long, default_value = "1/2")]
    eta: String,
    #[arg(long, default_value = "1,2,3")]
    seeds: String,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    knobs: Knobs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Terminates with a specific exit code after the report is written.
struct Exit(u8);

fn list<T: std::str::FromStr>(text: &str, what: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().map_err(|e| anyhow!("bad {what} {s:?}: {e}")))
        .collect()
}

fn n_range(text: &str) -> anyhow::Result<Vec<usize>> {
    let Some((lo, rest)) = text.split_once("..") else { return list(text, "n") };
    let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
    let (lo, hi, step): (usize, usize, usize) = (lo.parse()?, hi.parse()?, step.parse()?);
    if step == 0 {
        bail!("step must be positive");
    }
    Ok((lo..=hi).step_by(step).collect())
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let dimacs = matches!(path.extension().and_then(|e| e.to_str()), Some("cnf" | "wcnf" | "dimacs"));
    Ok(if dimacs { import_dimacs_cnf(&text, None)?.into() } else { parse_instance(&text)? })
}

fn solver_config(k: &Knobs, threads: usize) -> SolverConfig {
    let mut cfg = SolverConfig::default().with_budget(k.budget).with_slack(k.slack).with_workers(threads);
    if let Some(r) = k.radius {
        cfg = cfg.with_radius(r);
    }
    if k.no_fallback {
        cfg = cfg.without_fallback();
    }
    cfg
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn emit_report<T: Serialize>(cli: &Cli, config: RunConfig, body: T) -> anyhow::Result<()> {
    emit(&cli.out, &Report::new(config, body).stamped().to_json())
}

fn run_config(cli: &Cli, command: &str) -> RunConfig {
    let mut c = RunConfig::new(command);
    c.workers = cli.threads;
    c.output = cli.out.as_ref().map(|p| p.display().to_string());
    c
}

fn gen(cli: &Cli, a: &GenArgs) -> anyhow::Result<()> {
    let planted = random_assignment(a.n, a.seed);
    let inst: Instance = match a.kind {
        GenKind::Lin2 => {
            let coeffs: Vec<Rational> =
                a.coeffs.split(',').map(|c| parse_rational(c.trim())).collect::<spx_core::Result<_>>()?;
            if a.planted {
                gen_planted_lin2(a.n, a.k, a.m, &coeffs, &planted, a.seed)?.into()
            } else {
                gen_random_lin2(a.n, a.k, a.m, &coeffs, a.seed)?.into()
            }
        }
        GenKind::Csp => {
            let family: PredicateFamily = a.family.parse()?;
            let spec = CspSpec::exact(a.n, a.k, a.m, family).with_weights(weight_mode(&a.weights)?);
            if a.planted {
                gen_planted_csp(&spec, &planted, a.seed)?.into()
            } else {
                gen_random_csp(&spec, a.seed)?.into()
            }
        }
    };
    if a.planted {
        eprintln!("planted assignment: {planted}");
    }
    emit(&cli.out, &write_instance(&inst))
}

fn weight_mode(text: &str) -> anyhow::Result<WeightMode> {
    if text == "unit" {
        return Ok(WeightMode::Unit);
    }
    if let Some(max) = text.strip_prefix("int:") {
        return Ok(WeightMode::Integer { max: max.parse()? });
    }
    if let Some((num, den)) = text.strip_prefix("rat:").and_then(|r| r.split_once('/')) {
        return Ok(WeightMode::Rational { max_num: num.parse()?, max_den: den.parse()? });
    }
    bail!("bad weight mode {text:?}; expected unit, int:MAX or rat:NUM/DEN")
}

fn oracle(cli: &Cli, a: &OracleArgs) -> anyhow::Result<()> {
    let inst = load(&a.input)?;
    let eta = parse_rational(&a.eta)?;
    let problem = inst.as_problem();
    let exact = brute_force_minimum(problem, a.list)?;
    let n = problem.n();
    let t_count = if exact.h_min < Rational::default() { Some(threshold_set_count(problem, &exact.h_min, &eta)?) } else { None };
    let gamma = match (&inst, t_count) {
        (Instance::Csp(c), Some(_)) => Some(mcdiarmid_gamma(&compute_stats(c), &exact.h_min, &eta)?),
        _ => None,
    };
    let mut config = run_config(cli, "oracle");
    config.instance = Some(a.input.display().to_string());
    config.eta = a.eta.clone();
    let body = json!({
        "n": n,
        "h_min": format_rational(&exact.h_min),
        "minimizer_count": exact.minimizer_count,
        "minimizers": exact.minimizers.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "t_count": t_count,
        "log2_t_count": t_count.map(|t| (t as f64).log2()),
        "gamma_eta": gamma,
        "mcdiarmid_log2_rhs": gamma.map(|g| (1.0 - g) * n as f64),
        "mcdiarmid_rhs": gamma.map(|g| ((1.0 - g) * n as f64).exp2()),
    });
    emit_report(cli, config, body)
}

fn exponents(cli: &Cli, a: &ExponentArgs) -> anyhow::Result<()> {
    let mut config = run_config(cli, "exponents");
    config.eta = a.eta.clone();
    let etas: Vec<Rational> = a.eta.split(',').map(|e| parse_rational(e.trim())).collect::<spx_core::Result<_>>()?;
    let mut reports: Vec<ExponentReport> = Vec::new();
    match &a.input {
        Some(path) => {
            config.instance = Some(path.display().to_string());
            let inst = load(path)?;
            let problem = inst.as_problem();
            let h_min = brute_force_minimum(problem, 1)?.h_min;
            for eta in &etas {
                reports.push(match &inst {
                    Instance::Csp(c) => classical_exponent_case2(&compute_stats(c), &h_min, eta)?,
                    Instance::Lin2(l) => {
                        let t = threshold_set_count(problem, &h_min, eta)?;
                        let gamma = (1.0 - (t as f64).log2() / l.n() as f64).clamp(0.0, 1.0);
                        classical_exponent_case1(gamma, eta, l.k(), Some(l.n()))?
                    }
                });
            }
        }
        None => {
            let ks: Vec<usize> = list(&a.k, "k")?;
            let gammas: Vec<f64> = list(&a.gamma, "gamma")?;
            for &k in &ks {
                for eta in &etas {
                    for &g in &gammas {
                        reports.push(classical_exponent_case1(g, eta, k, None)?);
                    }
                }
            }
        }
    }
    emit_report(cli, config, reports)
}

fn solve(cli: &Cli, a: &SolveArgs) -> anyhow::Result<Exit> {
    let inst = load(&a.input)?;
    let eta = parse_rational(&a.eta)?;
    let delta = parse_rational(&a.delta)?;
    let cfg = solver_config(&a.knobs, cli.threads);
    let rng = RngStream::new(a.seed, 0);
    let h_min = || -> anyhow::Result<Rational> {
        match &a.h_min {
            Some(h) => Ok(parse_rational(h)?),
            None => Ok(brute_force_minimum(inst.as_problem(), 1)?.h_min),
        }
    };
    let wrong_kind = |want: &str| anyhow!("this solver needs a {want} instance, got {}", inst.kind());
    let (outcome, detail) = match (a.solver, &inst) {
        (Solver::Case1, Instance::Lin2(l)) => {
            let h = h_min()?;
            (solve_case1(l, &h, &eta, rng, &cfg)?, json!({ "h_min": format_rational(&h) }))
        }
        (Solver::Case2, Instance::Csp(c)) => {
            let h = h_min()?;
            (solve_case2(c, &h, &eta, rng, &cfg)?, json!({ "h_min": format_rational(&h) }))
        }
        (Solver::Ranked, Instance::Lin2(l)) => {
            let gamma = a.gamma.ok_or_else(|| anyhow!("ranked needs --gamma"))?;
            let (o, plan) = ranked_solve(l, &eta, gamma, &delta, rng, &cfg)?;
            (o, serde_json::to_value(plan)?)
        }
        (Solver::Sweep, Instance::Csp(c)) => {
            let (o, trace) = bounded_sweep_solve(c, &eta, &delta, rng, &cfg)?;
            (o, serde_json::to_value(trace)?)
        }
        (Solver::Case1 | Solver::Ranked, _) => return Err(wrong_kind("lin2")),
        (Solver::Case2 | Solver::Sweep, _) => return Err(wrong_kind("csp")),
    };
    let mut config = run_config(cli, &format!("solve {}", solver_name(a.solver)));
    config.instance = Some(a.input.display().to_string());
    config.eta = a.eta.clone();
    config.delta = a.delta.clone();
    config.seed = a.seed;
    config.budget = cfg.budget;
    config.slack = cfg.slack;
    let status = outcome.status;
    emit_report(cli, config, json!({ "outcome": outcome, "detail": detail }))?;
    Ok(Exit(if status == SolveStatus::Success { 0 } else { EXIT_BUDGET }))
}

fn solver_name(s: Solver) -> &'static str {
    match s {
        Solver::Case1 => "case1",
        Solver::Case2 => "case2",
        Solver::Ranked => "ranked",
        Solver::Sweep => "sweep",
    }
}

fn verify(cli: &Cli, a: &VerifyArgs) -> anyhow::Result<Exit> {
    let scale: Scale = a.scale.parse()?;
    let report = run_verify(scale, a.seed)?;
    for c in &report.checks {
        eprintln!("{} {}::{} ({})", if c.passed { "PASS" } else { "FAIL" }, c.module, c.name, c.detail);
    }
    let passed = report.passed();
    let mut config = run_config(cli, "verify");
    config.seed = a.seed;
    emit_report(cli, config, report)?;
    Ok(Exit(if passed { 0 } else { EXIT_VERIFY }))
}

fn bench(cli: &Cli, a: &BenchArgs) -> anyhow::Result<()> {
    let family = match a.family {
        GenKind::Lin2 => BenchFamily::PlantedLin2 { k: a.k, density: a.density },
        GenKind::Csp => BenchFamily::PlantedCsp { k: a.k, density: a.density, predicates: a.predicates.parse()? },
    };
    let cfg = BenchConfig {
        family,
        n_values: n_range(&a.n)?,
        eta_values: a.eta.split(',').map(|e| e.trim().to_string()).collect(),
        seeds: list(&a.seeds, "seed")?,
        runs: a.runs,
        solver: solver_config(&a.knobs, cli.threads),
    };
    let report = bench_sweep(&cfg)?;
    match a.format {
        Format::Csv => emit(&cli.out, &bench_csv(&report)),
        Format::Json => {
            let mut config = run_config(cli, "bench");
            config.eta = a.eta.clone();
            config.budget = cfg.solver.budget;
            config.slack = cfg.solver.slack;
            config.format = ReportFormat::Json;
            emit_report(cli, config, json!({ "config": cfg, "report": report }))
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<Exit> {
    match &cli.command {
        Command::Gen(a) => gen(cli, a).map(|_| Exit(0)),
        Command::Oracle(a) => oracle(cli, a).map(|_| Exit(0)),
        Command::Exponents(a) => exponents(cli, a).map(|_| Exit(0)),
        Command::Solve(a) => solve(cli, a),
        Command::Verify(a) => verify(cli, a),
        Command::Bench(a) => bench(cli, a).map(|_| Exit(0)),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<spx_core::Error>() {
        Some(spx_core::Error::Refused(_)) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("spx: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match dispatch(&cli) {
        Ok(Exit(code)) => ExitCode::from(code),
        Err(e) => {
            eprintln!("spx: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
