//! Seeded instance generators.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha
//! 0.3) in a fixed order, so a seed identifies an instance across releases.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ratio, Assignment, Constraint, CspInstance, Lin2Instance, Rational, TruthTable, MAX_ARITY};

/// Number of distinct subsets below which the generators enumerate all of
/// them instead of rejecting duplicates.
const ENUMERATE_LIMIT: u128 = 1 << 20;

pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut s = sample(rng, n, k).into_vec();
    s.sort_unstable();
    s
}

/// `m` distinct sorted `k`-subsets of `0..n`, uniformly at random.
fn distinct_subsets(rng: &mut ChaCha8Rng, n: usize, k: usize, m: usize) -> Result<Vec<Vec<usize>>> {
    let total = binomial_u128(n, k);
    if m as u128 > total {
        return Err(Error::domain(format!("m = {m} exceeds C({n},{k}) = {total}")));
    }
    if total <= ENUMERATE_LIMIT {
        let all = all_subsets(n, k);
        let picks = sample(rng, all.len(), m);
        return Ok(picks.into_iter().map(|i| all[i].clone()).collect());
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let s = random_subset(rng, n, k);
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    Ok(out)
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// `m` distinct uniformly random `k`-subsets with coefficients drawn
/// uniformly from `coeff_set`.
pub fn gen_random_lin2(
    n: usize,
    k: usize,
    m: usize,
    coeff_set: &[Rational],
    seed: u64,
) -> Result<Lin2Instance> {
    if coeff_set.is_empty() || coeff_set.iter().any(Zero::is_zero) {
        return Err(Error::domain("coefficient set must be nonempty and exclude 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets = distinct_subsets(&mut rng, n, k, m)?;
    let terms: Vec<_> = subsets
        .into_iter()
        .map(|s| (s, coeff_set[rng.gen_range(0..coeff_set.len())].clone()))
        .collect();
    Lin2Instance::new(n, k, terms)
}

/// Like [`gen_random_lin2`], but every monomial takes value `-|c_S|` at
/// `planted`, so `H_min = H(planted) = -Σ|c_S|`.
pub fn gen_planted_lin2(
    n: usize,
    k: usize,
    m: usize,
    magnitudes: &[Rational],
    planted: &Assignment,
    seed: u64,
) -> Result<Lin2Instance> {
    if planted.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: planted.len() });
    }
    if magnitudes.is_empty() || magnitudes.iter().any(|c| !c.is_positive()) {
        return Err(Error::domain("magnitudes must be nonempty and positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets = distinct_subsets(&mut rng, n, k, m)?;
    let terms: Vec<_> = subsets
        .into_iter()
        .map(|s| {
            let c = magnitudes[rng.gen_range(0..magnitudes.len())].clone();
            let odd = s.iter().filter(|&&v| planted.bit(v)).count() % 2 == 1;
            (s, if odd { c } else { -c })
        })
        .collect();
    Lin2Instance::new(n, k, terms)
}

/// Local predicate families for CSP generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredicateFamily {
    /// Clauses: exactly one falsifying local assignment (`s = 2^a - 1`).
    Sat,
    /// Parity constraints (`s = 2^(a-1)`).
    Parity,
    /// Exactly one satisfying local assignment (`s = 1`).
    And,
    /// Uniformly random nontrivial tables.
    Random,
}

impl std::str::FromStr for PredicateFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sat" => Ok(Self::Sat),
            "parity" => Ok(Self::Parity),
            "and" => Ok(Self::And),
            "random" => Ok(Self::Random),
            _ => Err(Error::domain(format!("unknown predicate family {s:?}"))),
        }
    }
}

/// How constraint weights are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    Unit,
    /// Uniform integer in `1..=max`.
    Integer { max: u32 },
    /// Uniform `p/q` with `p` in `1..=max_num` and `q` in `1..=max_den`.
    Rational { max_num: u32, max_den: u32 },
}

/// Shape of a generated CSP instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspSpec {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub family: PredicateFamily,
    /// Arity of every constraint is drawn uniformly from `min_arity..=k`.
    pub min_arity: usize,
    pub weights: WeightMode,
}

impl CspSpec {
    pub fn exact(n: usize, k: usize, m: usize, family: PredicateFamily) -> Self {
        CspSpec { n, k, m, family, min_arity: k, weights: WeightMode::Unit }
    }

    pub fn with_weights(mut self, weights: WeightMode) -> Self {
        self.weights = weights;
        self
    }

    fn check(&self) -> Result<()> {
        if self.k == 0 || self.k > MAX_ARITY || self.min_arity == 0 || self.min_arity > self.k {
            return Err(Error::domain(format!(
                "arity range {}..={} is invalid",
                self.min_arity, self.k
            )));
        }
        if self.m > 0 && self.k.min(self.n) < self.min_arity {
            return Err(Error::domain(format!("n = {} is too small for arity {}", self.n, self.min_arity)));
        }
        if let WeightMode::Integer { max: 0 } | WeightMode::Rational { max_num: 0, .. } | WeightMode::Rational { max_den: 0, .. } = self.weights {
            return Err(Error::domain("weight bounds must be positive"));
        }
        Ok(())
    }
}

fn draw_weight(rng: &mut ChaCha8Rng, mode: WeightMode) -> Rational {
    match mode {
        WeightMode::Unit => ratio(1, 1),
        WeightMode::Integer { max } => ratio(rng.gen_range(1..=max as i64), 1),
        WeightMode::Rational { max_num, max_den } => ratio(
            rng.gen_range(1..=max_num as i64),
            rng.gen_range(1..=max_den as i64),
        ),
    }
}

/// A table from `family` that is satisfied at local index `keep` when given.
fn draw_table(rng: &mut ChaCha8Rng, family: PredicateFamily, arity: usize, keep: Option<usize>) -> Result<TruthTable> {
    let size = 1usize << arity;
    match family {
        PredicateFamily::Sat => {
            let falsifying = loop {
                let b = rng.gen_range(0..size);
                if Some(b) != keep {
                    break b;
                }
            };
            TruthTable::all_but(arity, falsifying)
        }
        PredicateFamily::Parity => {
            let odd = match keep {
                Some(b) => b.count_ones() % 2 == 1,
                None => rng.gen(),
            };
            TruthTable::parity(arity, odd)
        }
        PredicateFamily::And => {
            let only = keep.unwrap_or_else(|| rng.gen_range(0..size));
            TruthTable::from_fn(arity, |b| b == only)
        }
        PredicateFamily::Random => loop {
            let bits: Vec<bool> = (0..size).map(|b| Some(b) == keep || rng.gen()).collect();
            let s = bits.iter().filter(|&&x| x).count();
            if s > 0 && s < size {
                return TruthTable::from_fn(arity, |b| bits[b]);
            }
        },
    }
}

fn generate(spec: &CspSpec, planted: Option<&Assignment>, seed: u64) -> Result<CspInstance> {
    spec.check()?;
    if let Some(p) = planted {
        if p.len() != spec.n {
            return Err(Error::DimensionMismatch { expected: spec.n, found: p.len() });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut constraints = Vec::with_capacity(spec.m);
    for _ in 0..spec.m {
        let arity = rng.gen_range(spec.min_arity..=spec.k);
        let vars = sample(&mut rng, spec.n, arity).into_vec();
        let keep = planted.map(|p| {
            vars.iter()
                .enumerate()
                .fold(0usize, |b, (t, &v)| b | ((p.bit(v) as usize) << t))
        });
        let table = draw_table(&mut rng, spec.family, arity, keep)?;
        let weight = draw_weight(&mut rng, spec.weights);
        constraints.push(Constraint::new(vars, weight, table)?);
    }
    CspInstance::new(spec.n, spec.k, constraints)
}

/// Random CSP instance with independent constraints.
pub fn gen_random_csp(spec: &CspSpec, seed: u64) -> Result<CspInstance> {
    generate(spec, None, seed)
}

/// CSP instance in which every constraint is satisfied by `planted`, so
/// `H_min = H(planted) = -W`.
pub fn gen_planted_csp(spec: &CspSpec, planted: &Assignment, seed: u64) -> Result<CspInstance> {
    generate(spec, Some(planted), seed)
}

/// Uniformly random assignment derived from `seed`, for use as a planted point.
pub fn random_assignment(n: usize, seed: u64) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Assignment::ones(n);
    for i in 0..n {
        a.set_bit(i, rng.gen());
    }
    a
}
