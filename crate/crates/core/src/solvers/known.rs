//! Solvers for a supplied optimum value.

use std::time::Instant;

use num_traits::{Signed, Zero};

use super::engine::{run_conditioned, BallSearcher, Conditioning, SolveOutcome, SolverConfig};
use crate::error::{Error, Result};
use crate::exponents::{flip_rates, lipschitz_params};
use crate::model::rational::check_open_unit;
use crate::model::{compute_stats, format_rational, Assignment, CspInstance, Lin2Instance, Objective, Problem, Rational};
use crate::search::RngStream;

fn finish(mut out: SolveOutcome, h_min: &Rational) -> SolveOutcome {
    out.certified_optimal = out.status == super::SolveStatus::Success && &out.value == h_min;
    out
}

fn conditioning<'a>(obj: &'a Objective, h_min: &Rational, eta: &Rational, searcher: BallSearcher<'a>) -> Conditioning<'a> {
    Conditioning { obj, accept: obj.threshold(h_min, eta), target: obj.scale_floor(h_min), searcher }
}

/// Correlated-pair solver: sample `T_η` uniformly, search the full ball of
/// radius `r_ns` around the sample, repeat until a point of value `h_min`
/// appears or the budget runs out.
pub fn solve_case1(
    inst: &Lin2Instance,
    h_min: &Rational,
    eta: &Rational,
    rng: RngStream,
    cfg: &SolverConfig,
) -> Result<SolveOutcome> {
    check_open_unit("eta", eta)?;
    let start = Instant::now();
    if inst.is_trivial() {
        let x = Assignment::ones(inst.n());
        return Ok(SolveOutcome::immediate(x, Rational::zero(), h_min.is_zero(), start));
    }
    if !h_min.is_negative() {
        return Err(Error::Degenerate(format!(
            "H_min = {} is not negative for a nontrivial instance",
            format_rational(h_min)
        )));
    }
    let obj = inst.compile()?;
    let radius = match cfg.radius_override {
        Some(r) => r,
        None => flip_rates(eta, inst.k(), inst.n())?.r_ns as usize,
    };
    let c = conditioning(&obj, h_min, eta, BallSearcher::new(&obj, radius.min(inst.n()), None));
    let mut out = run_conditioned(&c, rng, cfg);
    out.wall_time = start.elapsed();
    Ok(finish(out, h_min))
}

/// Local-Lipschitz solver: as [`solve_case1`] but each search covers only the
/// light coordinates, within radius `r_lip`.
///
/// `h_min = 0` is refused; for such instances every assignment is optimal
/// only when the objective vanishes, and [`crate::oracle::brute_force_minimum`]
/// is the fallback.
pub fn solve_case2(
    inst: &CspInstance,
    h_min: &Rational,
    eta: &Rational,
    rng: RngStream,
    cfg: &SolverConfig,
) -> Result<SolveOutcome> {
    check_open_unit("eta", eta)?;
    let start = Instant::now();
    let stats = compute_stats(inst);
    let (_, r_lip) = lipschitz_params(&stats, h_min, eta)?;
    let obj = inst.compile()?;
    let radius = cfg.radius_override.unwrap_or(r_lip as usize);
    let searcher = BallSearcher::new(&obj, radius, Some(stats.light_set.clone()));
    let c = conditioning(&obj, h_min, eta, searcher);
    let mut out = run_conditioned(&c, rng, cfg);
    out.wall_time = start.elapsed();
    Ok(finish(out, h_min))
}
