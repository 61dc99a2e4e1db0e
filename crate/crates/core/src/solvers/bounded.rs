//! One-sided bounded search and the optimistic sweep over candidate bounds.
//!
//! `search_bounded(U)` only ever returns a point `y` with `H(y) ≤ U`, so a
//! bound below the optimum yields NULL whatever the random draws were. The
//! sweep tries `U_R, U_{R-1}, …, U_1` from the most optimistic bound down and
//! stops at the first stage that returns a point.

use std::time::Instant;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::engine::{chunked_draws, ser_rational, BallSearcher, Best, Ledger, SolveOutcome, SolveStatus, SolverConfig};
use super::ranked::{check_delta, sample_count};
use crate::error::{Error, Result};
use crate::exponents::{lipschitz_radius, stage_exponent, tail_exponent};
use crate::model::rational::{check_open_unit, to_f64};
use crate::model::{compute_stats, format_rational, int, Assignment, CspInstance, InstanceStats, Objective, Problem, Rational};
use crate::oracle::{brute_force_minimum, ENUMERATION_CAP};
use crate::search::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullReason {
    /// The searched balls hold no point at or below `U`.
    NoPointBelowBound,
    /// More sampled points passed the threshold than the cap allows.
    CapExceeded,
    /// The work budget could not cover the planned sampling and search.
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bounded {
    Found { x: Assignment, value: Rational },
    Null(NullReason),
}

impl Bounded {
    pub fn is_null(&self) -> bool {
        matches!(self, Bounded::Null(_))
    }
}

/// Sizes derived from a candidate bound `U`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedPlan {
    #[serde(serialize_with = "ser_rational")]
    pub u: Rational,
    /// `r(U) = ⌊η|U|/(2Λ_max d_avg)⌋`, capped at the number of light coordinates.
    pub radius: usize,
    /// `|B_light(·, r(U))|`.
    pub ball_size: u64,
    /// `V_U = slack · |B_light(·, r(U))|`.
    pub v_u: f64,
    /// `c^tail_η(U)`.
    pub tail_exponent: f64,
    /// `N = ⌈(2^n/V_U) ln(2/δ)⌉`.
    pub n_samples: u64,
    /// `⌈(2/δ) N T_max(U)/2^n⌉` with `T_max(U) = 2^{(1-c^tail_η(U)) n}`.
    pub cap: u64,
    /// Most raw draws plus ball points the routine can spend.
    pub worst_case: u64,
    /// `min{c^ball_η(U), c^tail_η(U)}`.
    pub predicted_exponent: f64,
}

pub fn bounded_plan(
    stats: &InstanceStats,
    u: &Rational,
    eta: &Rational,
    delta: &Rational,
    cfg: &SolverConfig,
) -> Result<BoundedPlan> {
    check_open_unit("eta", eta)?;
    check_delta(delta)?;
    if !u.is_negative() || u < &-stats.total_weight.clone() {
        return Err(Error::domain(format!(
            "U = {} is outside [-W, 0) with W = {}",
            format_rational(u),
            format_rational(&stats.total_weight)
        )));
    }
    if cfg.slack.is_nan() || cfg.slack <= 0.0 {
        return Err(Error::domain(format!("slack {} is not positive", cfg.slack)));
    }
    let light = stats.light_set.len();
    let radius = cfg.radius_override.unwrap_or_else(|| lipschitz_radius(stats, u, eta).min(light as u64) as usize);
    let ball_size = (0..=radius.min(light) as u64)
        .map(|j| crate::exponents::binomial(light as u64, j))
        .sum::<num_bigint::BigUint>()
        .to_u64()
        .unwrap_or(u64::MAX);
    let v_u = cfg.slack * ball_size as f64;
    let n = stats.n;
    let n_samples = sample_count(n, v_u, delta)
        .ok_or_else(|| Error::Refused(format!("sample count overflows for n = {n}")))?;
    let tail = tail_exponent(stats, u, eta);
    let cap_f = (2.0 / to_f64(delta) * n_samples as f64 * (-tail * n as f64).exp2()).ceil();
    let cap = if cap_f >= u64::MAX as f64 { u64::MAX } else { cap_f as u64 };
    let search = if light == n && radius >= n { ball_size } else { cap.saturating_mul(ball_size) };
    Ok(BoundedPlan {
        u: u.clone(),
        radius,
        ball_size,
        v_u,
        tail_exponent: tail,
        n_samples,
        cap,
        worst_case: n_samples.saturating_add(search),
        predicted_exponent: stage_exponent(stats, u, eta),
    })
}

/// Everything one call of the bounded search observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedRun {
    pub result: Bounded,
    /// `|K|`, the distinct sampled points with `H ≤ (1-η) U`.
    pub kept: u64,
    pub raw_draws: u64,
    pub ball_points: u64,
    /// Some searched ball covered the whole cube.
    pub exhaustive: bool,
    /// Lowest point met in the searched balls, whether or not it beat `U`.
    pub best_seen: Option<(i128, Assignment)>,
}

fn run_plan(
    obj: &Objective,
    light: &[usize],
    plan: &BoundedPlan,
    eta: &Rational,
    rng: RngStream,
    budget: u64,
) -> BoundedRun {
    let null = |reason, kept, raw_draws| BoundedRun {
        result: Bounded::Null(reason),
        kept,
        raw_draws,
        ball_points: 0,
        exhaustive: false,
        best_seen: None,
    };
    if plan.n_samples > budget {
        return null(NullReason::BudgetExceeded, 0, 0);
    }
    let accept = obj.scale_floor(&((Rational::from_integer(1.into()) - eta) * &plan.u));
    let mut kept: Vec<Assignment> = chunked_draws(obj, plan.n_samples, rng, |draw, len| {
        (0..len).map(|_| draw()).filter(|(v, _)| *v <= accept).map(|(_, x)| x).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    kept.sort_unstable();
    kept.dedup();
    let k = kept.len() as u64;
    if k > plan.cap {
        return null(NullReason::CapExceeded, k, plan.n_samples);
    }
    let searcher = BallSearcher::new(obj, plan.radius, Some(light.to_vec()));
    let mut ledger = Ledger::with_draws(plan.n_samples);
    if ledger.ball_cost(&searcher, k) > ledger.remaining(budget) {
        return null(NullReason::BudgetExceeded, k, plan.n_samples);
    }
    let best = kept
        .into_par_iter()
        .map(|x| {
            let m = searcher.search(x);
            let mut b = Best::default();
            b.offer(m.value, &m.best);
            b
        })
        .reduce(Best::default, |mut a, b| {
            a.merge(b);
            a
        });
    ledger.pay_balls(&searcher, k);
    let result = match &best.0 {
        Some((v, x)) if *v <= obj.scale_floor(&plan.u) => Bounded::Found { x: x.clone(), value: obj.to_rational(*v) },
        _ => Bounded::Null(NullReason::NoPointBelowBound),
    };
    BoundedRun {
        result,
        kept: k,
        raw_draws: ledger.draws,
        ball_points: ledger.points,
        exhaustive: k > 0 && searcher.covers_cube(),
        best_seen: best.0,
    }
}

/// One-sided bounded search for a candidate bound `U ∈ [-W, 0)`.
pub fn search_bounded(
    inst: &CspInstance,
    u: &Rational,
    eta: &Rational,
    delta: &Rational,
    rng: RngStream,
    cfg: &SolverConfig,
) -> Result<BoundedRun> {
    let stats = compute_stats(inst);
    let plan = bounded_plan(&stats, u, eta, delta, cfg)?;
    let obj = inst.compile()?;
    Ok(run_plan(&obj, &stats.light_set, &plan, eta, rng, cfg.budget))
}

/// A stage of the sweep schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduledStage {
    pub r: u64,
    pub plan: BoundedPlan,
    /// Largest worst case over this and every more optimistic stage, so
    /// budgets never increase with `r`.
    pub stage_budget: u64,
}

/// `B_η = η/(2Λ_max d_avg)`.
pub fn sweep_scale(stats: &InstanceStats, eta: &Rational) -> Result<Rational> {
    check_open_unit("eta", eta)?;
    if stats.d_avg.is_zero() {
        return Err(Error::Degenerate("the instance has no constraints".into()));
    }
    Ok(eta / (int(2) * &stats.lambda_max * &stats.d_avg))
}

/// Stages `r = R, R-1, …, 1` with `U_r = -r/B_η` and `R = ⌊B_η W⌋`.
pub fn sweep_schedule(
    stats: &InstanceStats,
    eta: &Rational,
    delta: &Rational,
    cfg: &SolverConfig,
) -> Result<Vec<ScheduledStage>> {
    let b = sweep_scale(stats, eta)?;
    let r_max = (&b * &stats.total_weight).floor().to_integer().to_u64().unwrap_or(0);
    let mut stages: Vec<ScheduledStage> = Vec::new();
    let mut budget = 0u64;
    for r in (1..=r_max).rev() {
        let u = -Rational::from_integer(r.into()) / &b;
        let plan = bounded_plan(stats, &u, eta, delta, cfg)?;
        budget = budget.max(plan.worst_case);
        stages.push(ScheduledStage { r, plan, stage_budget: budget });
    }
    Ok(stages)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StageOutcome {
    Null { reason: NullReason },
    Found { value: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepStage {
    pub r: u64,
    pub u: String,
    pub radius: usize,
    pub n_samples: u64,
    pub cap: u64,
    pub stage_budget: u64,
    pub predicted_exponent: f64,
    pub kept: u64,
    pub raw_draws: u64,
    pub ball_points: u64,
    pub outcome: StageOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTrace {
    /// `B_η`.
    pub scale: String,
    /// `R_η`.
    pub r_max: u64,
    /// In the order run: `r = R` first.
    pub stages: Vec<SweepStage>,
    pub halt_stage: Option<u64>,
    pub fallback_used: bool,
}

/// Sweep without knowledge of `H_min`. Stage `r` draws from streams
/// `rng.child(r << 32 + i)`.
pub fn bounded_sweep_solve(
    inst: &CspInstance,
    eta: &Rational,
    delta: &Rational,
    rng: RngStream,
    cfg: &SolverConfig,
) -> Result<(SolveOutcome, SweepTrace)> {
    let start = Instant::now();
    if inst.is_trivial() {
        return Err(Error::Degenerate("the instance has no constraints".into()));
    }
    let stats = compute_stats(inst);
    let schedule = sweep_schedule(&stats, eta, delta, cfg)?;
    let obj = inst.compile()?;
    let mut trace = SweepTrace {
        scale: format_rational(&sweep_scale(&stats, eta)?),
        r_max: schedule.first().map_or(0, |s| s.r),
        stages: Vec::new(),
        halt_stage: None,
        fallback_used: false,
    };
    let (mut draws, mut points) = (0u64, 0u64);
    let mut best = Best::default();
    let mut found = None;
    for stage in &schedule {
        let remaining = cfg.budget.saturating_sub(draws.saturating_add(points));
        let run = run_plan(&obj, &stats.light_set, &stage.plan, eta, rng.child(stage.r << 32), stage.stage_budget.min(remaining));
        draws += run.raw_draws;
        points += run.ball_points;
        if let Some((v, x)) = &run.best_seen {
            best.offer(*v, x);
        }
        trace.stages.push(SweepStage {
            r: stage.r,
            u: format_rational(&stage.plan.u),
            radius: stage.plan.radius,
            n_samples: stage.plan.n_samples,
            cap: stage.plan.cap,
            stage_budget: stage.stage_budget,
            predicted_exponent: stage.plan.predicted_exponent,
            kept: run.kept,
            raw_draws: run.raw_draws,
            ball_points: run.ball_points,
            outcome: match &run.result {
                Bounded::Null(reason) => StageOutcome::Null { reason: *reason },
                Bounded::Found { value, .. } => StageOutcome::Found { value: format_rational(value) },
            },
        });
        if let Bounded::Found { .. } = run.result {
            trace.halt_stage = Some(stage.r);
            found = Some(run.exhaustive);
            break;
        }
    }
    let iterations = trace.stages.len() as u64;
    let outcome = match found {
        Some(exhaustive) => {
            let (v, x) = best.into_pair(&obj);
            SolveOutcome {
                best: x,
                value: obj.to_rational(v),
                iterations,
                raw_draws: draws,
                ball_points_examined: points,
                wall_time: start.elapsed(),
                certified_optimal: exhaustive,
                status: SolveStatus::Success,
            }
        }
        None if cfg.exhaustive_fallback && inst.n() <= ENUMERATION_CAP => {
            trace.fallback_used = true;
            let exact = brute_force_minimum(inst, 1)?;
            SolveOutcome {
                best: exact.minimizers[0].clone(),
                value: exact.h_min,
                iterations,
                raw_draws: draws,
                ball_points_examined: points + (1u64 << inst.n()),
                wall_time: start.elapsed(),
                certified_optimal: true,
                status: SolveStatus::Success,
            }
        }
        None => {
            let (v, x) = best.into_pair(&obj);
            let exhausted = trace.stages.iter().any(|s| s.outcome == StageOutcome::Null { reason: NullReason::BudgetExceeded });
            SolveOutcome {
                best: x,
                value: obj.to_rational(v),
                iterations,
                raw_draws: draws,
                ball_points_examined: points,
                wall_time: start.elapsed(),
                certified_optimal: false,
                status: if exhausted { SolveStatus::BudgetExhausted } else { SolveStatus::Failed },
            }
        }
    };
    Ok((outcome, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{gen_planted_csp, gen_random_csp, random_assignment, CspSpec, PredicateFamily};
    use crate::model::ratio;

    fn planted_and(n: usize, m: usize, seed: u64) -> CspInstance {
        let p = random_assignment(n, seed);
        gen_planted_csp(&CspSpec::exact(n, 2, m, PredicateFamily::And), &p, seed).unwrap()
    }

    #[test]
    fn grid_spacing() {
        let inst = planted_and(14, 28, 1);
        let stats = compute_stats(&inst);
        let b = sweep_scale(&stats, &ratio(1, 2)).unwrap();
        let n = int(14);
        assert_eq!(b, ratio(1, 2) * &n / (int(2) * &stats.lambda_max * &stats.sigma));
        let schedule = sweep_schedule(&stats, &ratio(1, 2), &ratio(1, 10), &SolverConfig::default()).unwrap();
        assert_eq!(schedule.len() as i64, (&b * inst.total_weight()).floor().to_integer().to_i64().unwrap());
    }

    #[test]
    fn schedule_budgets_do_not_increase_with_r() {
        let spec = CspSpec::exact(16, 3, 60, PredicateFamily::Random);
        for seed in 0..10 {
            let inst = gen_random_csp(&spec, seed).unwrap();
            let stats = compute_stats(&inst);
            let s = sweep_schedule(&stats, &ratio(1, 4), &ratio(1, 10), &SolverConfig::default()).unwrap();
            for w in s.windows(2) {
                assert!(w[0].r > w[1].r);
                assert!(w[0].stage_budget <= w[1].stage_budget);
                assert!(w[0].plan.predicted_exponent >= w[1].plan.predicted_exponent - 1e-12);
                assert!(w[0].plan.worst_case <= w[0].stage_budget);
            }
        }
    }

    #[test]
    fn below_optimum_is_null() {
        let (inst, h, w) = (0..)
            .map(|seed| gen_random_csp(&CspSpec::exact(12, 3, 40, PredicateFamily::Parity), seed).unwrap())
            .map(|inst| (brute_force_minimum(&inst, 0).unwrap().h_min, inst.total_weight(), inst))
            .find(|(h, w, _)| h > &-w.clone())
            .map(|(h, w, inst)| (inst, h, w))
            .unwrap();
        let u = (h.clone() + -w.clone()) / int(2);
        assert!(u < h);
        for seed in 0..20 {
            let run = search_bounded(&inst, &u, &ratio(1, 2), &ratio(1, 10), RngStream::new(seed, 0), &SolverConfig::default()).unwrap();
            assert!(run.result.is_null());
        }
    }

    #[test]
    fn found_points_respect_the_bound() {
        let inst = planted_and(12, 24, 3);
        let w = inst.total_weight();
        let u = -w.clone() / int(2);
        let run = search_bounded(&inst, &u, &ratio(1, 2), &ratio(1, 10), RngStream::new(0, 0), &SolverConfig::default()).unwrap();
        if let Bounded::Found { x, value } = &run.result {
            assert!(value <= &u);
            assert_eq!(&inst.evaluate(x).unwrap(), value);
        }
    }

    #[test]
    fn cap_and_budget_nulls() {
        let inst = planted_and(12, 24, 3);
        let u = -inst.total_weight() / int(2);
        let cfg = SolverConfig::default().with_budget(5);
        let run = search_bounded(&inst, &u, &ratio(1, 2), &ratio(1, 10), RngStream::new(0, 0), &cfg).unwrap();
        assert_eq!(run.result, Bounded::Null(NullReason::BudgetExceeded));
        let stats = compute_stats(&inst);
        let plan = bounded_plan(&stats, &u, &ratio(1, 2), &ratio(1, 10), &SolverConfig::default()).unwrap();
        let tight = BoundedPlan { cap: 0, ..plan };
        let obj = inst.compile().unwrap();
        let run = run_plan(&obj, &stats.light_set, &tight, &ratio(1, 2), RngStream::new(0, 0), u64::MAX);
        assert_eq!(run.result, Bounded::Null(NullReason::CapExceeded));
    }

    #[test]
    fn domain_checks() {
        let inst = planted_and(10, 20, 2);
        let stats = compute_stats(&inst);
        let cfg = SolverConfig::default();
        assert!(bounded_plan(&stats, &int(0), &ratio(1, 2), &ratio(1, 10), &cfg).is_err());
        assert!(bounded_plan(&stats, &(-inst.total_weight() - int(1)), &ratio(1, 2), &ratio(1, 10), &cfg).is_err());
        assert!(bounded_plan(&stats, &int(-1), &ratio(1, 2), &ratio(1, 2), &cfg).is_err());
    }

    #[test]
    fn sweep_halts_with_an_optimum() {
        let inst = planted_and(14, 28, 5);
        let w = inst.total_weight();
        let mut hits = 0;
        for seed in 0..20 {
            let (out, trace) =
                bounded_sweep_solve(&inst, &ratio(1, 2), &ratio(1, 10), RngStream::new(seed, 0), &SolverConfig::default().without_fallback())
                    .unwrap();
            let halt = trace.halt_stage;
            for s in &trace.stages {
                if Some(s.r) != halt {
                    assert!(matches!(s.outcome, StageOutcome::Null { .. }));
                }
            }
            if out.status == SolveStatus::Success && out.value == -w.clone() {
                hits += 1;
            }
        }
        assert!(hits >= 15, "{hits}");
    }

    #[test]
    fn sweep_fallback_certifies() {
        let inst = planted_and(10, 20, 6);
        let cfg = SolverConfig::default().with_budget(1);
        let (out, trace) = bounded_sweep_solve(&inst, &ratio(1, 2), &ratio(1, 10), RngStream::new(0, 0), &cfg).unwrap();
        assert!(trace.fallback_used);
        assert!(out.certified_optimal);
        assert_eq!(out.value, -inst.total_weight());
    }
}
