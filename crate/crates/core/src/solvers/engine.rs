//! The conditioning-and-search loop shared by the known-optimum solvers.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::model::{format_rational, Assignment, Objective, Rational};
use crate::search::{ball_search_min, uniform_assignment, BallMin, BallSpec, RngStream};

/// Knobs shared by every solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Work allowance in raw draws plus ball points examined.
    pub budget: u64,
    /// Multiplier on the successful-set size estimates `s` and `V_U`.
    pub slack: f64,
    /// Iterations started together; `0` means the size of the rayon pool.
    pub workers: usize,
    /// Replaces the computed search radius.
    pub radius_override: Option<usize>,
    /// Lets the sweep fall back to enumeration when every stage is NULL.
    pub exhaustive_fallback: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { budget: 1 << 26, slack: 1.0, workers: 0, radius_override: None, exhaustive_fallback: true }
    }
}

impl SolverConfig {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.radius_override = Some(radius);
        self
    }

    pub fn without_fallback(mut self) -> Self {
        self.exhaustive_fallback = false;
        self
    }

    pub(crate) fn wave(&self) -> u64 {
        let w = if self.workers == 0 { rayon::current_num_threads() } else { self.workers };
        w.max(1) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// The solver's own stopping rule fired.
    Success,
    /// The work budget ran out first.
    BudgetExhausted,
    /// Every attempt came back empty.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveOutcome {
    pub best: Assignment,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub iterations: u64,
    pub raw_draws: u64,
    pub ball_points_examined: u64,
    #[serde(serialize_with = "ser_duration")]
    pub wall_time: Duration,
    pub certified_optimal: bool,
    pub status: SolveStatus,
}

pub(crate) fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn ser_duration<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl SolveOutcome {
    pub(crate) fn immediate(best: Assignment, value: Rational, certified: bool, start: Instant) -> Self {
        SolveOutcome {
            best,
            value,
            iterations: 0,
            raw_draws: 0,
            ball_points_examined: 0,
            wall_time: start.elapsed(),
            certified_optimal: certified,
            status: SolveStatus::Success,
        }
    }
}

/// Best point by value, ties to the lexicographically smaller assignment.
#[derive(Debug, Clone, Default)]
pub(crate) struct Best(pub Option<(i128, Assignment)>);

impl Best {
    pub fn offer(&mut self, value: i128, x: &Assignment) {
        let better = match &self.0 {
            None => true,
            Some((v, b)) => value < *v || (value == *v && x < b),
        };
        if better {
            self.0 = Some((value, x.clone()));
        }
    }

    pub fn merge(&mut self, other: Best) {
        if let Some((v, x)) = other.0 {
            self.offer(v, &x);
        }
    }

    /// The held point, or the all-`+1` point when nothing was offered.
    pub fn into_pair(self, obj: &Objective) -> (i128, Assignment) {
        self.0.unwrap_or_else(|| {
            let x = Assignment::ones(obj.n());
            (obj.value(&x), x)
        })
    }
}

/// Ball searches with a memo for balls covering the whole cube, whose
/// minimum does not depend on the center.
pub(crate) struct BallSearcher<'a> {
    obj: &'a Objective,
    radius: usize,
    light: Option<Vec<usize>>,
    cube: OnceLock<BallMin>,
}

impl<'a> BallSearcher<'a> {
    pub fn new(obj: &'a Objective, radius: usize, light: Option<Vec<usize>>) -> Self {
        BallSearcher { obj, radius, light, cube: OnceLock::new() }
    }

    pub fn spec(&self, center: Assignment) -> BallSpec {
        match &self.light {
            None => BallSpec::full(center, self.radius),
            Some(l) => BallSpec { center, radius: self.radius, allowed: Some(l.clone()) },
        }
    }

    /// Every ball is the whole cube.
    pub fn covers_cube(&self) -> bool {
        let width = self.light.as_ref().map_or(self.obj.n(), Vec::len);
        width == self.obj.n() && self.radius >= width
    }

    pub fn ball_size(&self) -> u64 {
        self.spec(Assignment::ones(self.obj.n())).size_u128().min(u64::MAX as u128) as u64
    }

    pub fn search(&self, center: Assignment) -> BallMin {
        let spec = self.spec(center);
        if self.covers_cube() {
            self.cube.get_or_init(|| ball_search_min(self.obj, &spec)).clone()
        } else {
            ball_search_min(self.obj, &spec)
        }
    }
}

/// Charges ball searches against a budget; a cube-covering ball is paid for
/// once.
#[derive(Debug, Default)]
pub(crate) struct Ledger {
    pub draws: u64,
    pub points: u64,
    cube_paid: bool,
}

impl Ledger {
    pub fn with_draws(draws: u64) -> Self {
        Ledger { draws, ..Ledger::default() }
    }

    pub fn used(&self) -> u64 {
        self.draws.saturating_add(self.points)
    }

    pub fn remaining(&self, budget: u64) -> u64 {
        budget.saturating_sub(self.used())
    }

    pub fn ball_cost(&self, searcher: &BallSearcher<'_>, balls: u64) -> u64 {
        if searcher.covers_cube() {
            if self.cube_paid || balls == 0 {
                0
            } else {
                searcher.ball_size()
            }
        } else {
            searcher.ball_size().saturating_mul(balls)
        }
    }

    pub fn pay_balls(&mut self, searcher: &BallSearcher<'_>, balls: u64) {
        self.points += self.ball_cost(searcher, balls);
        if balls > 0 && searcher.covers_cube() {
            self.cube_paid = true;
        }
    }
}

/// One sample-then-search iteration of the known-optimum loop.
pub(crate) struct Conditioning<'a> {
    pub obj: &'a Objective,
    /// Samples are accepted at or below this scaled value.
    pub accept: i128,
    /// The loop stops once a point at or below this scaled value is found.
    pub target: i128,
    pub searcher: BallSearcher<'a>,
}

struct Sampled {
    draws: u64,
    best: Best,
    hit: Option<Assignment>,
}

fn sample(obj: &Objective, accept: i128, stream: RngStream, max_draws: u64) -> Sampled {
    let mut rng = stream.rng();
    let mut best = Best::default();
    for draws in 1..=max_draws {
        let x = uniform_assignment(obj.n(), &mut rng);
        let v = obj.value(&x);
        best.offer(v, &x);
        if v <= accept {
            return Sampled { draws, best, hit: Some(x) };
        }
    }
    Sampled { draws: max_draws, best, hit: None }
}

struct Iteration {
    sampled: Sampled,
    ball: Option<BallMin>,
}

/// Runs iterations on streams `base.child(0), base.child(1), …` in waves of
/// `cfg.wave()` and accounts for them in stream order, so the result does
/// not depend on the wave size.
pub(crate) fn run_conditioned(c: &Conditioning<'_>, base: RngStream, cfg: &SolverConfig) -> SolveOutcome {
    let start = Instant::now();
    let wave = cfg.wave();
    let mut ledger = Ledger::default();
    let mut best = Best::default();
    let mut iterations = 0;
    let mut status = None;
    let mut next = 0u64;
    while status.is_none() {
        let results: Vec<Iteration> = (next..next + wave)
            .into_par_iter()
            .map(|i| {
                let sampled = sample(c.obj, c.accept, base.child(i), cfg.budget.max(1));
                let ball = sampled.hit.clone().map(|x| c.searcher.search(x));
                Iteration { sampled, ball }
            })
            .collect();
        for (offset, it) in results.into_iter().enumerate() {
            let remaining = ledger.remaining(cfg.budget);
            if remaining == 0 {
                status = Some(SolveStatus::BudgetExhausted);
                break;
            }
            iterations += 1;
            if it.sampled.hit.is_none() || it.sampled.draws > remaining {
                let cut = sample(c.obj, c.accept, base.child(next + offset as u64), remaining);
                ledger.draws += cut.draws;
                best.merge(cut.best);
                status = Some(SolveStatus::BudgetExhausted);
                break;
            }
            ledger.draws += it.sampled.draws;
            best.merge(it.sampled.best);
            if ledger.ball_cost(&c.searcher, 1) > ledger.remaining(cfg.budget) {
                status = Some(SolveStatus::BudgetExhausted);
                break;
            }
            ledger.pay_balls(&c.searcher, 1);
            let ball = it.ball.expect("searched after a hit");
            best.offer(ball.value, &ball.best);
            if ball.value <= c.target {
                status = Some(SolveStatus::Success);
                break;
            }
        }
        next += wave;
    }
    let (value, x) = best.into_pair(c.obj);
    SolveOutcome {
        best: x,
        value: c.obj.to_rational(value),
        iterations,
        raw_draws: ledger.draws,
        ball_points_examined: ledger.points,
        wall_time: start.elapsed(),
        certified_optimal: false,
        status: status.expect("loop ends with a status"),
    }
}

/// Draws `count` uniform points on streams `base.child(chunk)` in fixed-size
/// chunks and folds each chunk with `fold`.
pub(crate) fn chunked_draws<A, F>(obj: &Objective, count: u64, base: RngStream, fold: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut dyn FnMut() -> (i128, Assignment), u64) -> A + Sync + Send,
{
    const CHUNK: u64 = 4096;
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = base.child(c).rng();
            let len = CHUNK.min(count - c * CHUNK);
            let mut draw = || {
                let x = uniform_assignment(obj.n(), &mut rng);
                (obj.value(&x), x)
            };
            fold(&mut draw, len)
        })
        .collect()
}
