//! Hamming balls, optionally restricted to a coordinate subset.
//!
//! Points are produced layer by layer in order of increasing distance from
//! the center. Within a layer the flipped coordinate sets follow the
//! revolving-door order, in which consecutive sets differ by removing one
//! element and adding another, so walking the layer costs two incremental
//! flips per point.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::binomial;
use crate::model::{Assignment, Objective, Walker};

/// Balls with at least this many points are searched layer-parallel.
const PARALLEL_THRESHOLD: u128 = 1 << 14;

/// `B(center, radius)`, or `B_L(center, radius)` when `allowed` is present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSpec {
    pub center: Assignment,
    pub radius: usize,
    /// Sorted, distinct coordinates that may be flipped.
    pub allowed: Option<Vec<usize>>,
}

impl BallSpec {
    pub fn full(center: Assignment, radius: usize) -> Self {
        BallSpec { center, radius, allowed: None }
    }

    pub fn restricted(center: Assignment, radius: usize, mut allowed: Vec<usize>) -> Result<Self> {
        allowed.sort_unstable();
        allowed.dedup();
        if let Some(&bad) = allowed.iter().find(|&&i| i >= center.len()) {
            return Err(Error::domain(format!("allowed coordinate {bad} is outside 0..{}", center.len())));
        }
        Ok(BallSpec { center, radius, allowed: Some(allowed) })
    }

    pub fn coords(&self) -> Vec<usize> {
        self.allowed.clone().unwrap_or_else(|| (0..self.center.len()).collect())
    }

    fn width(&self) -> usize {
        self.allowed.as_ref().map_or(self.center.len(), Vec::len)
    }

    /// Radius actually reachable: `min(radius, |allowed|)`.
    pub fn effective_radius(&self) -> usize {
        self.radius.min(self.width())
    }

    /// `Σ_{j ≤ r} C(|allowed|, j)`, exactly.
    pub fn size(&self) -> BigUint {
        let w = self.width() as u64;
        (0..=self.effective_radius() as u64).map(|j| binomial(w, j)).fold(BigUint::zero(), |a, b| a + b)
    }

    /// [`size`](Self::size) saturated into a `u128`.
    pub fn size_u128(&self) -> u128 {
        u128::try_from(self.size()).unwrap_or(u128::MAX)
    }
}

/// One step of a revolving-door enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoorStep<'a> {
    /// The initial subset `{0, ..., t-1}`.
    Start(&'a [usize]),
    /// `out` leaves and `inn` joins the previous subset.
    Swap { out: usize, inn: usize },
}

/// Revolving-door enumeration of the `t`-subsets of `0..n`.
pub fn revolving_door(n: usize, t: usize, mut visit: impl FnMut(DoorStep<'_>)) {
    if t > n {
        return;
    }
    let init: Vec<usize> = (0..t).collect();
    visit(DoorStep::Start(&init));
    let mut step = |out, inn| visit(DoorStep::Swap { out, inn });
    if t == 0 || t == n {
        return;
    }
    if t == 1 {
        for i in 1..n {
            step(i - 1, i);
        }
        return;
    }
    // c[1..=t] hold the subset, c[t+1] = n is a sentinel (1-based as in the
    // classical formulation).
    let mut c = vec![0usize; t + 2];
    for j in 1..=t {
        c[j] = j - 1;
    }
    c[t + 1] = n;
    loop {
        // Easy cases on c[1].
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                step(c[1], c[1] + 1);
                c[1] += 1;
                continue;
            }
        } else if c[1] > 0 {
            step(c[1], c[1] - 1);
            c[1] -= 1;
            continue;
        }
        let mut j = 2;
        let mut try_decrease = t % 2 == 1;
        loop {
            if try_decrease {
                // c[j] = c[j-1] + 1 here.
                if c[j] >= j {
                    step(c[j], j - 2);
                    c[j] = c[j - 1];
                    c[j - 1] = j - 2;
                    break;
                }
                j += 1;
            } else {
                // c[j-1] = j - 2 here.
                if c[j] + 1 < c[j + 1] {
                    step(j - 2, c[j] + 1);
                    c[j - 1] = c[j];
                    c[j] += 1;
                    break;
                }
                j += 1;
                if j > t {
                    return;
                }
            }
            try_decrease = !try_decrease;
        }
    }
}

/// Visits every point of the ball, passing a walker positioned on it.
/// Returns the number of points visited.
pub fn walk_ball(obj: &Objective, spec: &BallSpec, mut visit: impl FnMut(&Walker<'_>)) -> u64 {
    let coords = spec.coords();
    let mut walker = obj.walker(spec.center.clone());
    let mut count = 0;
    for d in 0..=spec.effective_radius() {
        count += walk_layer(&mut walker, &coords, d, &mut visit);
        // walk_layer leaves the walker at the center.
    }
    count
}

/// Visits layer `d` starting and ending at the center.
fn walk_layer(walker: &mut Walker<'_>, coords: &[usize], d: usize, visit: &mut impl FnMut(&Walker<'_>)) -> u64 {
    let mut current: Vec<usize> = Vec::with_capacity(d);
    let mut count = 0u64;
    revolving_door(coords.len(), d, |step| {
        match step {
            DoorStep::Start(init) => {
                for &i in init {
                    walker.flip(coords[i]);
                }
                current.extend_from_slice(init);
            }
            DoorStep::Swap { out, inn } => {
                walker.flip(coords[out]);
                walker.flip(coords[inn]);
                let pos = current.iter().position(|&x| x == out).expect("element leaving the subset");
                current[pos] = inn;
            }
        }
        visit(walker);
        count += 1;
    });
    for &i in &current {
        walker.flip(coords[i]);
    }
    count
}

/// Every point of the ball, in enumeration order.
pub fn enumerate_ball(spec: &BallSpec) -> Vec<Assignment> {
    let coords = spec.coords();
    let mut out = Vec::new();
    for d in 0..=spec.effective_radius() {
        let mut x = spec.center.clone();
        revolving_door(coords.len(), d, |step| {
            match step {
                DoorStep::Start(init) => init.iter().for_each(|&i| x.flip(coords[i])),
                DoorStep::Swap { out: a, inn: b } => {
                    x.flip(coords[a]);
                    x.flip(coords[b]);
                }
            }
            out.push(x.clone());
        });
    }
    out
}

/// Minimum of the ball in scaled units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallMin {
    pub best: Assignment,
    pub value: i128,
    pub points: u64,
}

fn better(value: i128, x: &Assignment, best_value: i128, best: &Assignment) -> bool {
    value < best_value || (value == best_value && x < best)
}

fn search_layers(obj: &Objective, spec: &BallSpec, coords: &[usize], layers: std::ops::Range<usize>) -> BallMin {
    let mut walker = obj.walker(spec.center.clone());
    let mut best = spec.center.clone();
    let mut best_value = i128::MAX;
    let mut points = 0;
    for d in layers {
        points += walk_layer(&mut walker, coords, d, &mut |w: &Walker<'_>| {
            if better(w.value(), w.assignment(), best_value, &best) {
                best_value = w.value();
                best = w.assignment().clone();
            }
        });
    }
    BallMin { best, value: best_value, points }
}

/// Exact minimum of the objective over the ball; ties go to the
/// lexicographically smallest point.
pub fn ball_search_min(obj: &Objective, spec: &BallSpec) -> BallMin {
    let coords = spec.coords();
    let r = spec.effective_radius();
    if spec.size_u128() < PARALLEL_THRESHOLD || r == 0 {
        return search_layers(obj, spec, &coords, 0..r + 1);
    }
    (0..=r)
        .into_par_iter()
        .map(|d| search_layers(obj, spec, &coords, d..d + 1))
        .reduce_with(|a, b| {
            let points = a.points + b.points;
            let mut m = if better(b.value, &b.best, a.value, &a.best) { b } else { a };
            m.points = points;
            m
        })
        .expect("at least one layer")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, Lin2Instance};
    use std::collections::BTreeSet;

    fn all_doors(n: usize, t: usize) -> Vec<Vec<usize>> {
        let mut c: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        revolving_door(n, t, |step| {
            match step {
                DoorStep::Start(init) => c.extend_from_slice(init),
                DoorStep::Swap { out: a, inn: b } => {
                    assert!(c.contains(&a) && !c.contains(&b), "step ({a},{b}) on {c:?}");
                    let p = c.iter().position(|&x| x == a).unwrap();
                    c[p] = b;
                }
            }
            let mut s = c.clone();
            s.sort_unstable();
            out.push(s);
        });
        out
    }

    #[test]
    fn revolving_door_covers_every_subset_once() {
        for n in 0..=11 {
            for t in 0..=n {
                let seq = all_doors(n, t);
                let set: BTreeSet<_> = seq.iter().cloned().collect();
                assert_eq!(seq.len(), set.len(), "n={n} t={t}");
                assert_eq!(seq.len() as u128, crate::formats::generate::binomial_u128(n, t));
                assert!(set.iter().all(|s| s.len() == t && s.iter().all(|&x| x < n)));
            }
        }
    }

    #[test]
    fn ball_examples() {
        let c = Assignment::from_mask(4, 0b0101).unwrap();
        assert_eq!(enumerate_ball(&BallSpec::full(c.clone(), 0)), vec![c.clone()]);
        let all = enumerate_ball(&BallSpec::full(c, 4));
        assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), 16);

        let spec = BallSpec::restricted(Assignment::ones(5), 2, vec![0, 2, 4]).unwrap();
        let pts = enumerate_ball(&spec);
        assert_eq!(pts.len(), 7);
        assert_eq!(spec.size(), BigUint::from(7u32));
        assert!(pts.iter().all(|p| !p.bit(1) && !p.bit(3)));
    }

    #[test]
    fn counts_match_binomial_sums() {
        for n in 0..=12 {
            for w in 0..=n {
                for r in 0..=w + 1 {
                    let allowed: Vec<usize> = (0..w).map(|i| (i * 7) % n.max(1)).collect::<BTreeSet<_>>().into_iter().collect();
                    let spec = BallSpec::restricted(Assignment::ones(n), r, allowed).unwrap();
                    let pts = enumerate_ball(&spec);
                    assert_eq!(pts.len() as u128, spec.size_u128());
                    assert_eq!(pts.iter().collect::<BTreeSet<_>>().len(), pts.len());
                }
            }
        }
    }

    #[test]
    fn search_matches_naive() {
        let inst = Lin2Instance::new(
            10,
            2,
            (0..10).map(|i| (vec![i, (i + 3) % 10], int(if i % 3 == 0 { -2 } else { 1 }))),
        )
        .unwrap();
        let obj = Objective::from_lin2(&inst).unwrap();
        for (mask, r) in [(0u64, 0usize), (0b1011, 2), (0x3ff, 5), (17, 10)] {
            let spec = BallSpec::full(Assignment::from_mask(10, mask).unwrap(), r);
            let got = ball_search_min(&obj, &spec);
            let naive = enumerate_ball(&spec)
                .into_iter()
                .map(|x| (obj.value(&x), x))
                .min()
                .unwrap();
            assert_eq!((got.value, got.best), naive);
            assert_eq!(got.points as u128, spec.size_u128());
        }
    }

    #[test]
    fn parallel_search_matches_sequential() {
        let inst = Lin2Instance::new(
            16,
            3,
            (0..30).map(|i| (vec![i % 16, (i * 5 + 1) % 16, (i * 3 + 7) % 16], int(1 - 2 * (i as i64 % 2)))).filter(|(v, _)| {
                v[0] != v[1] && v[1] != v[2] && v[0] != v[2]
            }),
        )
        .unwrap();
        let obj = Objective::from_lin2(&inst).unwrap();
        let spec = BallSpec::full(Assignment::from_mask(16, 0xbeef).unwrap(), 16);
        let par = ball_search_min(&obj, &spec);
        let seq = search_layers(&obj, &spec, &spec.coords(), 0..17);
        assert_eq!(par, seq);
    }
}
