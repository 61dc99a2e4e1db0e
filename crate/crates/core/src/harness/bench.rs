//! Benchmark sweeps over `n` and `η` with oracle-exact set sizes.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exponents::{classical_exponent_case1, classical_exponent_case2, lipschitz_params};
use crate::formats::{gen_planted_csp, gen_planted_lin2, random_assignment, CspSpec, PredicateFamily};
use crate::model::{compute_stats, int, parse_rational, Assignment, Instance, Rational};
use crate::oracle::{brute_force_minimum, successful_set_ns_count, threshold_set_count};
use crate::search::{BallSpec, RngStream};
use crate::solvers::{solve_case1, solve_case2, SolveOutcome, SolverConfig};

/// Instance family of a sweep. Lin2 families are solved with
/// [`solve_case1`], CSP families with [`solve_case2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BenchFamily {
    /// `m = density · n` terms of arity `k`, unit magnitudes.
    PlantedLin2 { k: usize, density: usize },
    /// `m = density · n` unit-weight constraints of arity `k`.
    PlantedCsp { k: usize, density: usize, predicates: PredicateFamily },
}

impl BenchFamily {
    pub fn instance(&self, n: usize, seed: u64) -> Result<Instance> {
        let planted = random_assignment(n, seed);
        Ok(match *self {
            BenchFamily::PlantedLin2 { k, density } => {
                gen_planted_lin2(n, k, density * n, &[int(1)], &planted, seed)?.into()
            }
            BenchFamily::PlantedCsp { k, density, predicates } => {
                gen_planted_csp(&CspSpec::exact(n, k, density * n, predicates), &planted, seed)?.into()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub family: BenchFamily,
    pub n_values: Vec<usize>,
    /// Rationals as `p/q` strings.
    pub eta_values: Vec<String>,
    pub seeds: Vec<u64>,
    /// Solver runs per instance.
    pub runs: usize,
    pub solver: SolverConfig,
}

/// One `(n, η, seed)` instance, averaged over its runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub eta: String,
    pub seed: u64,
    pub runs: usize,
    pub mean_iterations: f64,
    pub mean_raw_draws: f64,
    pub mean_ball_points: f64,
    /// Runs that did not certify the optimum.
    pub failures: u64,
    /// `|T_η|`, exact.
    pub t_count: u64,
    /// `|S^ns_η|` for Lin2, `|B_light(x*, r_lip)|` for CSP.
    pub s_count: u64,
    /// `|T_η|/|S_η|`, absent when `S_η` is empty.
    pub iteration_bound: Option<f64>,
    /// `log2(2^n/|T_η|)/n`.
    pub density_exponent: f64,
    /// `1 - c` for the classical exponent `c` at this instance.
    pub predicted_exponent: Option<f64>,
    /// `log2(mean raw draws + mean ball points)/n`.
    pub measured_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `log2(mean work)` against `n`.
    pub slope: Option<f64>,
}

/// Column order of [`bench_csv`].
pub const BENCH_COLUMNS: [&str; 15] = [
    "n",
    "eta",
    "seed",
    "runs",
    "mean_iterations",
    "mean_raw_draws",
    "mean_ball_points",
    "failures",
    "t_count",
    "s_count",
    "iteration_bound",
    "density_exponent",
    "predicted_exponent",
    "measured_exponent",
    "log2_work",
];

fn log2_work(row: &BenchRow) -> f64 {
    (row.mean_raw_draws + row.mean_ball_points).max(1.0).log2()
}

fn bench_row(cfg: &BenchConfig, n: usize, eta: &Rational, eta_text: &str, seed: u64) -> Result<BenchRow> {
    let inst = cfg.family.instance(n, seed)?;
    let problem = inst.as_problem();
    let oracle = brute_force_minimum(problem, 1)?;
    let h_min = oracle.h_min.clone();
    let x_star: Assignment = oracle.minimizers[0].clone();
    let t_count = threshold_set_count(problem, &h_min, eta)?;
    let density_exponent = (n as f64 - (t_count as f64).log2()) / n as f64;
    let (s_count, predicted) = match &inst {
        Instance::Lin2(l) => {
            let s = successful_set_ns_count(l, &x_star, &h_min, eta)?;
            let c = (density_exponent > 0.0)
                .then(|| classical_exponent_case1(density_exponent.min(1.0), eta, l.k(), Some(n)))
                .transpose()?
                .map(|r| 1.0 - r.c_cl);
            (s, c)
        }
        Instance::Csp(c) => {
            let stats = compute_stats(c);
            let (_, r_lip) = lipschitz_params(&stats, &h_min, eta)?;
            let ball = BallSpec::restricted(x_star.clone(), r_lip as usize, stats.light_set.clone())?;
            let report = classical_exponent_case2(&stats, &h_min, eta)?;
            (ball.size_u128().to_u64().unwrap_or(u64::MAX), Some(1.0 - report.c_cl))
        }
    };
    let outcomes: Vec<SolveOutcome> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|r| {
            let rng = RngStream::new(seed, r << 32);
            match &inst {
                Instance::Lin2(l) => solve_case1(l, &h_min, eta, rng, &cfg.solver),
                Instance::Csp(c) => solve_case2(c, &h_min, eta, rng, &cfg.solver),
            }
        })
        .collect::<Result<_>>()?;
    let runs = outcomes.len().max(1) as f64;
    let mean = |f: fn(&SolveOutcome) -> u64| outcomes.iter().map(|o| f(o) as f64).sum::<f64>() / runs;
    let mut row = BenchRow {
        n,
        eta: eta_text.to_string(),
        seed,
        runs: cfg.runs,
        mean_iterations: mean(|o| o.iterations),
        mean_raw_draws: mean(|o| o.raw_draws),
        mean_ball_points: mean(|o| o.ball_points_examined),
        failures: outcomes.iter().filter(|o| !o.certified_optimal).count() as u64,
        t_count,
        s_count,
        iteration_bound: (s_count > 0).then(|| t_count as f64 / s_count as f64),
        density_exponent,
        predicted_exponent: predicted,
        measured_exponent: 0.0,
    };
    row.measured_exponent = log2_work(&row) / n as f64;
    Ok(row)
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two
/// distinct `x`.
pub fn regression_slope(points: &[(f64, f64)]) -> Option<f64> {
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs every `(n, η, seed)` combination in order. Rows are independent of
/// the thread count.
pub fn bench_sweep(cfg: &BenchConfig) -> Result<BenchReport> {
    let etas = cfg
        .eta_values
        .iter()
        .map(|e| Ok((parse_rational(e)?, e.as_str())))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for &n in &cfg.n_values {
        for (eta, text) in &etas {
            for &seed in &cfg.seeds {
                rows.push(bench_row(cfg, n, eta, text, seed)?);
            }
        }
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, log2_work(r))).collect();
    let slope = regression_slope(&points);
    Ok(BenchReport { rows, slope })
}

/// The rows as CSV with the columns of [`BENCH_COLUMNS`]; absent values are
/// empty fields.
pub fn bench_csv(report: &BenchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(BENCH_COLUMNS).expect("in-memory write");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &report.rows {
        w.write_record([
            r.n.to_string(),
            r.eta.clone(),
            r.seed.to_string(),
            r.runs.to_string(),
            r.mean_iterations.to_string(),
            r.mean_raw_draws.to_string(),
            r.mean_ball_points.to_string(),
            r.failures.to_string(),
            r.t_count.to_string(),
            r.s_count.to_string(),
            opt(r.iteration_bound),
            r.density_exponent.to_string(),
            opt(r.predicted_exponent),
            r.measured_exponent.to_string(),
            log2_work(r).to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n_values: Vec<usize>) -> BenchConfig {
        BenchConfig {
            family: BenchFamily::PlantedLin2 { k: 3, density: 2 },
            n_values,
            eta_values: vec!["1/2".into()],
            seeds: vec![1, 2],
            runs: 4,
            solver: SolverConfig::default(),
        }
    }

    #[test]
    fn empty_range_gives_empty_report() {
        let r = bench_sweep(&config(Vec::new())).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.slope, None);
        assert_eq!(bench_csv(&r).lines().count(), 1);
    }

    #[test]
    fn rows_replay() {
        let a = bench_sweep(&config(vec![8, 10])).unwrap();
        let b = bench_sweep(&config(vec![8, 10])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 4);
        assert!(a.slope.is_some());
        for row in &a.rows {
            assert_eq!(row.failures, 0);
            assert!(row.s_count <= row.t_count);
        }
        let csv = bench_csv(&a);
        assert!(csv.starts_with("n,eta,seed,runs,"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn slope_of_a_line() {
        let pts = [(1.0, 3.0), (2.0, 5.0), (4.0, 9.0)];
        assert!((regression_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(regression_slope(&[(1.0, 2.0)]), None);
    }
}
