//! Unknown optimum by ranking: draw uniformly, keep the lowest `K` points,
//! search a ball around each.

use std::time::Instant;

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use super::engine::{chunked_draws, Best, BallSearcher, Ledger, SolveOutcome, SolveStatus, SolverConfig};
use crate::error::{Error, Result};
use crate::exponents::{binary_entropy, flip_rates};
use crate::model::rational::{check_open_unit, to_f64};
use crate::model::{format_rational, Assignment, Lin2Instance, Objective, Problem, Rational};
use crate::search::RngStream;

/// Sample and retention sizes of a ranked run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedPlan {
    /// `s = slack · 2^{h(q_η) n}`.
    pub s: f64,
    /// `t = 2^{(1-γ) n}`.
    pub t: f64,
    /// `N = ⌈(2^n/s) ln(2/δ)⌉`.
    pub n_samples: u64,
    /// `K = min{N, ⌈(2/δ) N t/2^n⌉}`.
    pub k_retained: u64,
    pub radius: usize,
}

pub(crate) fn check_delta(delta: &Rational) -> Result<()> {
    let half = Rational::new(1.into(), 2.into());
    if !delta.is_positive() || delta >= &half {
        return Err(Error::domain(format!("delta = {} is outside (0, 1/2)", format_rational(delta))));
    }
    Ok(())
}

/// `⌈(2^n/v) ln(2/δ)⌉`, or `None` beyond `u64`.
pub(crate) fn sample_count(n: usize, v: f64, delta: &Rational) -> Option<u64> {
    let ln = (2.0 / to_f64(delta)).ln();
    let x = ((n as f64).exp2() / v * ln).ceil();
    (x.is_finite() && x >= 1.0 && x < u64::MAX as f64).then_some(x as u64)
}

pub fn ranked_plan(
    n: usize,
    k: usize,
    eta: &Rational,
    gamma_hint: f64,
    delta: &Rational,
    cfg: &SolverConfig,
) -> Result<RankedPlan> {
    check_open_unit("eta", eta)?;
    check_delta(delta)?;
    if !(0.0..=1.0).contains(&gamma_hint) {
        return Err(Error::domain(format!("gamma hint {gamma_hint} is outside [0, 1]")));
    }
    if cfg.slack.is_nan() || cfg.slack <= 0.0 {
        return Err(Error::domain(format!("slack {} is not positive", cfg.slack)));
    }
    let rates = flip_rates(eta, k, n)?;
    let nf = n as f64;
    let s = cfg.slack * (binary_entropy(rates.q_eta)? * nf).exp2();
    let t = ((1.0 - gamma_hint) * nf).exp2();
    let refuse = || Error::Refused(format!("sample count overflows for n = {n}"));
    let n_samples = sample_count(n, s, delta).ok_or_else(refuse)?;
    let keep = (2.0 / to_f64(delta) * n_samples as f64 * (-gamma_hint * nf).exp2()).ceil();
    let k_retained = if keep >= n_samples as f64 { n_samples } else { keep.max(1.0) as u64 };
    let radius = cfg.radius_override.unwrap_or(rates.r_ns as usize).min(n);
    Ok(RankedPlan { s, t, n_samples, k_retained, radius })
}

/// The `N` draws of a ranked run in a fixed order, with their scaled values.
pub fn ranked_sample(obj: &Objective, n_samples: u64, rng: RngStream) -> Vec<(i128, Assignment)> {
    chunked_draws(obj, n_samples, rng, |draw, len| (0..len).map(|_| draw()).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

fn keep_lowest(points: &mut Vec<(i128, Assignment)>, k: usize) {
    points.sort_unstable();
    points.truncate(k);
}

/// Ranked solve without knowledge of `H_min`. Returns the overall minimum of
/// the balls searched and the plan used; refuses when the planned work
/// exceeds `cfg.budget`.
pub fn ranked_solve(
    inst: &Lin2Instance,
    eta: &Rational,
    gamma_hint: f64,
    delta: &Rational,
    rng: RngStream,
    cfg: &SolverConfig,
) -> Result<(SolveOutcome, RankedPlan)> {
    let start = Instant::now();
    let plan = ranked_plan(inst.n(), inst.k(), eta, gamma_hint, delta, cfg)?;
    let obj = inst.compile()?;
    let searcher = BallSearcher::new(&obj, plan.radius, None);
    let ledger = Ledger::default();
    let work = plan.n_samples.saturating_add(ledger.ball_cost(&searcher, plan.k_retained));
    if work > cfg.budget {
        return Err(Error::Refused(format!(
            "planned work {work} exceeds the budget {} (N = {}, K = {})",
            cfg.budget, plan.n_samples, plan.k_retained
        )));
    }
    let k = plan.k_retained as usize;
    let mut kept: Vec<(i128, Assignment)> = chunked_draws(&obj, plan.n_samples, rng, |draw, len| {
        let mut chunk: Vec<_> = (0..len).map(|_| draw()).collect();
        keep_lowest(&mut chunk, k);
        chunk
    })
    .into_iter()
    .flatten()
    .collect();
    keep_lowest(&mut kept, k);
    let best = kept
        .par_iter()
        .map(|(_, x)| {
            let m = searcher.search(x.clone());
            let mut b = Best::default();
            b.offer(m.value, &m.best);
            b
        })
        .reduce(Best::default, |mut a, b| {
            a.merge(b);
            a
        });
    let mut ledger = Ledger::with_draws(plan.n_samples);
    ledger.pay_balls(&searcher, kept.len() as u64);
    let (value, x) = best.into_pair(&obj);
    let outcome = SolveOutcome {
        best: x,
        value: obj.to_rational(value),
        iterations: kept.len() as u64,
        raw_draws: ledger.draws,
        ball_points_examined: ledger.points,
        wall_time: start.elapsed(),
        certified_optimal: searcher.covers_cube(),
        status: SolveStatus::Success,
    };
    Ok((outcome, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::gen_random_lin2;
    use crate::model::{int, ratio};
    use crate::oracle::brute_force_minimum;

    #[test]
    fn plan_formulas() {
        let cfg = SolverConfig::default();
        let p = ranked_plan(14, 2, &ratio(1, 2), 0.0, &ratio(1, 10), &cfg).unwrap();
        assert_eq!(p.k_retained, p.n_samples);
        let expected = ((14f64).exp2() / p.s * 20f64.ln()).ceil() as u64;
        assert_eq!(p.n_samples, expected);
        assert!((20f64.ln() - 2.9957).abs() < 1e-4);
        let q = ranked_plan(14, 2, &ratio(1, 2), 0.5, &ratio(1, 10), &cfg).unwrap();
        assert_eq!(q.k_retained, (20.0 * q.n_samples as f64 / 128.0).ceil() as u64);
        assert!(ranked_plan(14, 2, &ratio(1, 2), 0.5, &ratio(1, 2), &cfg).is_err());
        assert!(ranked_plan(14, 2, &ratio(1, 2), 1.5, &ratio(1, 10), &cfg).is_err());
    }

    #[test]
    fn ranked_recovers_optimum() {
        let inst = gen_random_lin2(12, 2, 30, &[int(-1), int(1)], 3).unwrap();
        let h = brute_force_minimum(&inst, 0).unwrap().h_min;
        let (out, plan) =
            ranked_solve(&inst, &ratio(1, 2), 0.1, &ratio(1, 10), RngStream::new(1, 0), &SolverConfig::default()).unwrap();
        assert_eq!(out.value, h);
        assert_eq!(out.raw_draws, plan.n_samples);
    }

    #[test]
    fn ranked_refuses_over_budget() {
        let inst = gen_random_lin2(12, 2, 30, &[int(-1), int(1)], 3).unwrap();
        let cfg = SolverConfig::default().with_budget(10);
        let err = ranked_solve(&inst, &ratio(1, 2), 0.1, &ratio(1, 10), RngStream::new(1, 0), &cfg);
        assert!(matches!(err, Err(Error::Refused(m)) if m.contains("N = ")));
    }

    #[test]
    fn sample_replays() {
        let inst = gen_random_lin2(10, 2, 20, &[int(-1), int(1)], 1).unwrap();
        let obj = inst.compile().unwrap();
        let a = ranked_sample(&obj, 5000, RngStream::new(2, 0));
        let b = ranked_sample(&obj, 5000, RngStream::new(2, 0));
        assert_eq!(a, b);
        assert_eq!(a.len(), 5000);
    }
}
