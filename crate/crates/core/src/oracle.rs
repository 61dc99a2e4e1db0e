//! Ground truth by full enumeration of the cube.
//!
//! The cube is split into blocks sharing their high bits; each block is
//! walked in Gray-code order on the low bits, so every step flips one
//! variable and updates only the factors touching it. Blocks run on the
//! rayon pool and their partial results merge associatively, so every
//! result is independent of the worker count.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::lipschitz_params;
use crate::model::rational::check_open_unit;
use crate::model::{
    compute_stats, format_rational, int, Assignment, CspInstance, Lin2Instance, Objective, Problem,
    Rational,
};
use crate::search::{shell_contains, walk_ball, BallSpec};

/// Largest `n` for exhaustive optimisation and counting.
pub const ENUMERATION_CAP: usize = 30;
/// Largest `n` for exact distribution sums over flip patterns.
pub const DISTRIBUTION_CAP: usize = 20;

/// High bits used to split the cube into parallel blocks.
const BLOCK_BITS: usize = 8;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::TooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// Folds `visit(acc, mask, value)` over all `2^n` points and merges the
/// per-block accumulators in block order.
pub fn scan_cube<A, I, V, M>(obj: &Objective, init: I, visit: V, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, u64, i128) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let n = obj.n();
    assert!(n <= ENUMERATION_CAP.max(crate::model::MASK_CAP));
    let high = if n >= 12 { BLOCK_BITS.min(n) } else { 0 };
    let low = n - high;
    let block = |h: u64| {
        let mut acc = init();
        let mut mask = h << low;
        let mut walker = obj.walker(Assignment::from_mask(n, mask).expect("mask fits"));
        visit(&mut acc, mask, walker.value());
        for j in 1u64..(1u64 << low) {
            let i = j.trailing_zeros() as usize;
            walker.flip(i);
            mask ^= 1 << i;
            visit(&mut acc, mask, walker.value());
        }
        acc
    };
    (0..1u64 << high)
        .into_par_iter()
        .map(block)
        .reduce_with(&merge)
        .expect("at least one block")
}

/// Sort key realising the assignment order on masks (coordinate 0 first,
/// `+1 < -1`).
fn lex_key(mask: u64) -> u64 {
    mask.reverse_bits()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    #[serde(serialize_with = "ser_rational")]
    pub h_min: Rational,
    pub minimizer_count: u64,
    /// The lexicographically smallest minimizers, at most the requested cap.
    pub minimizers: Vec<Assignment>,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

struct MinAcc {
    best: i128,
    count: u64,
    masks: Vec<u64>,
}

fn trim(masks: &mut Vec<u64>, cap: usize) {
    masks.sort_unstable_by_key(|&m| lex_key(m));
    masks.truncate(cap);
}

/// Exact `H_min` and minimizers by full enumeration (`n ≤ 30`).
pub fn brute_force_minimum(inst: &(impl Problem + ?Sized), cap_minimizers: usize) -> Result<OracleResult> {
    check_cap(inst.n(), ENUMERATION_CAP)?;
    let obj = inst.compile()?;
    let slack = 2 * cap_minimizers + 64;
    let acc = scan_cube(
        &obj,
        || MinAcc { best: i128::MAX, count: 0, masks: Vec::new() },
        |acc, mask, value| {
            if value < acc.best {
                acc.best = value;
                acc.count = 0;
                acc.masks.clear();
            }
            if value == acc.best {
                acc.count += 1;
                if cap_minimizers > 0 {
                    acc.masks.push(mask);
                    if acc.masks.len() > slack {
                        trim(&mut acc.masks, cap_minimizers);
                    }
                }
            }
        },
        |a, b| match a.best.cmp(&b.best) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                let mut masks = a.masks;
                masks.extend(b.masks);
                trim(&mut masks, cap_minimizers);
                MinAcc { best: a.best, count: a.count + b.count, masks }
            }
        },
    );
    let mut masks = acc.masks;
    trim(&mut masks, cap_minimizers);
    Ok(OracleResult {
        h_min: obj.to_rational(acc.best),
        minimizer_count: acc.count,
        minimizers: masks
            .into_iter()
            .map(|m| Assignment::from_mask(obj.n(), m).expect("mask fits"))
            .collect(),
    })
}

/// Exact value distribution `value → count` (`n ≤ 30`).
pub fn value_histogram(inst: &(impl Problem + ?Sized)) -> Result<BTreeMap<Rational, u64>> {
    check_cap(inst.n(), ENUMERATION_CAP)?;
    let obj = inst.compile()?;
    let hist = scan_cube(
        &obj,
        BTreeMap::<i128, u64>::new,
        |h, _, v| *h.entry(v).or_insert(0) += 1,
        |mut a, b| {
            for (v, c) in b {
                *a.entry(v).or_insert(0) += c;
            }
            a
        },
    );
    Ok(hist.into_iter().map(|(v, c)| (obj.to_rational(v), c)).collect())
}

fn require_nondegenerate(inst: &(impl Problem + ?Sized), h_min: &Rational) -> Result<()> {
    if inst.is_trivial() {
        return Err(Error::Degenerate("the objective is identically zero".into()));
    }
    if !h_min.is_negative() {
        return Err(Error::Degenerate(format!(
            "H_min = {} is not negative, so the threshold set is the whole sublevel set of 0",
            format_rational(h_min)
        )));
    }
    Ok(())
}

/// Number of points with `value ≤ threshold`.
pub fn count_at_most(obj: &Objective, threshold: i128) -> Result<u64> {
    check_cap(obj.n(), ENUMERATION_CAP)?;
    Ok(scan_cube(
        obj,
        || 0u64,
        |c, _, v| *c += (v <= threshold) as u64,
        |a, b| a + b,
    ))
}

/// `|T_η| = |{x : H(x) ≤ (1-η) h_min}|`, exactly.
pub fn threshold_set_count(inst: &(impl Problem + ?Sized), h_min: &Rational, eta: &Rational) -> Result<u64> {
    check_cap(inst.n(), ENUMERATION_CAP)?;
    check_open_unit("eta", eta)?;
    require_nondegenerate(inst, h_min)?;
    let obj = inst.compile()?;
    count_at_most(&obj, obj.threshold(h_min, eta))
}

/// For each distance `w` from `center`, the number of points at distance `w`
/// with `value ≤ threshold`.
pub fn threshold_profile(obj: &Objective, center: &Assignment, threshold: i128) -> Result<Vec<u64>> {
    check_cap(obj.n(), ENUMERATION_CAP)?;
    let n = obj.n();
    let c = center.to_mask().expect("n within mask cap");
    Ok(scan_cube(
        obj,
        || vec![0u64; n + 1],
        |acc, mask, v| {
            if v <= threshold {
                acc[(mask ^ c).count_ones() as usize] += 1;
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    ))
}

/// For each distance `w` from `center`, the sum of scaled values over the
/// points at distance `w`.
fn value_sums_by_distance(obj: &Objective, center: &Assignment) -> Vec<i128> {
    let n = obj.n();
    let c = center.to_mask().expect("n within mask cap");
    scan_cube(
        obj,
        || vec![0i128; n + 1],
        |acc, mask, v| acc[(mask ^ c).count_ones() as usize] += v,
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )
}

/// `Σ_w weights[w] q^w (1-q)^{n-w}`.
fn binomial_mix(weights: impl IntoIterator<Item = Rational>, q: &Rational, n: usize) -> Rational {
    let p = Rational::one() - q;
    weights
        .into_iter()
        .enumerate()
        .map(|(w, c)| c * num_traits::pow(q.clone(), w) * num_traits::pow(p.clone(), n - w))
        .sum()
}

fn check_flip_probability(q: &Rational) -> Result<()> {
    if q.is_negative() || q > &Rational::new(1.into(), 2.into()) {
        return Err(Error::domain(format!("q = {} is outside [0, 1/2]", format_rational(q))));
    }
    Ok(())
}

/// `E[H(X)]` for `X = x* ⊙ t` with independent `Pr[t_i = -1] = q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelatedExpectation {
    /// `ρ^k H(x*)` with `ρ = 1 - 2q`.
    pub closed_form: Rational,
    /// The same expectation by enumerating all flip patterns (`n ≤ 20`).
    pub enumerated: Option<Rational>,
}

pub fn exact_correlated_expectation(inst: &Lin2Instance, x_star: &Assignment, q: &Rational) -> Result<CorrelatedExpectation> {
    check_flip_probability(q)?;
    let h_star = inst.evaluate(x_star)?;
    let rho = Rational::one() - int(2) * q;
    let closed_form = num_traits::pow(rho, inst.k()) * h_star;
    let enumerated = if inst.n() <= DISTRIBUTION_CAP {
        let obj = inst.compile()?;
        let sums = value_sums_by_distance(&obj, x_star);
        let scale = Rational::from_integer(obj.scale().clone());
        let mix = binomial_mix(sums.into_iter().map(|s| Rational::from_integer(BigInt::from(s))), q, inst.n());
        Some(mix / scale)
    } else {
        None
    };
    Ok(CorrelatedExpectation { closed_form, enumerated })
}

/// `Pr[H(X) ≤ (1-η) H(x*)]` for the correlated pair, exactly (`n ≤ 20`).
pub fn exact_landing_probability(
    inst: &(impl Problem + ?Sized),
    x_star: &Assignment,
    q: &Rational,
    eta: &Rational,
) -> Result<Rational> {
    check_cap(inst.n(), DISTRIBUTION_CAP)?;
    check_flip_probability(q)?;
    check_open_unit("eta", eta)?;
    let h_star = inst.evaluate(x_star)?;
    require_nondegenerate(inst, &h_star)?;
    let obj = inst.compile()?;
    let profile = threshold_profile(&obj, x_star, obj.threshold(&h_star, eta))?;
    Ok(binomial_mix(profile.into_iter().map(|c| int(c as i64)), q, inst.n()))
}

/// `max(0, 1 - (1 - ρ^k)/η)`, the guaranteed landing probability.
pub fn lower_tail_bound(q: &Rational, k: usize, eta: &Rational) -> Rational {
    let rho_k = num_traits::pow(Rational::one() - int(2) * q, k);
    let b = Rational::one() - (Rational::one() - rho_k) / eta;
    if b.is_negative() {
        Rational::zero()
    } else {
        b
    }
}

/// `|S^ns_η|`: points of `T_η` whose distance from `x_star` lies in the
/// typical shell.
pub fn successful_set_ns_count(
    inst: &(impl Problem + ?Sized),
    x_star: &Assignment,
    h_min: &Rational,
    eta: &Rational,
) -> Result<u64> {
    check_cap(inst.n(), ENUMERATION_CAP)?;
    require_nondegenerate(inst, h_min)?;
    let obj = inst.compile()?;
    let profile = threshold_profile(&obj, x_star, obj.threshold(h_min, eta))?;
    let mut total = 0;
    for (w, c) in profile.into_iter().enumerate() {
        if shell_contains(w, eta, inst.k(), inst.n())? {
            total += c;
        }
    }
    Ok(total)
}

/// Exhaustive audit of the light ball `B_light(x*, r_lip)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LipschitzAudit {
    pub radius: u64,
    pub points: u64,
    /// Points with `H > (1-η) H_min`.
    pub outside_threshold: u64,
    /// Points with `H > H_min + 2 Λ_max d_avg · d_H(x, x*)`.
    pub above_step_bound: u64,
}

pub fn lipschitz_audit(inst: &CspInstance, x_star: &Assignment, eta: &Rational) -> Result<LipschitzAudit> {
    let h_min = inst.evaluate(x_star)?;
    let stats = compute_stats(inst);
    let (_, radius) = lipschitz_params(&stats, &h_min, eta)?;
    let obj = inst.compile()?;
    let threshold = obj.threshold(&h_min, eta);
    let h_scaled = obj.scale_exact(&h_min).expect("value of an assignment");
    let step = int(2) * &stats.lambda_max * &stats.d_avg;
    let step_floor: Vec<i128> = (0..=radius as i64)
        .map(|d| obj.scale_floor(&(&h_min + &step * int(d))) - h_scaled)
        .collect();
    let spec = BallSpec::restricted(x_star.clone(), radius as usize, stats.light_set.clone())?;
    let (mut outside, mut above) = (0, 0);
    let points = walk_ball(&obj, &spec, |w| {
        let v = w.value();
        if v > threshold {
            outside += 1;
        }
        let d = w.assignment().hamming_distance(x_star).expect("same length");
        if v - h_scaled > step_floor[d] {
            above += 1;
        }
    });
    Ok(LipschitzAudit { radius, points, outside_threshold: outside, above_step_bound: above })
}
