//! Integer-scaled objective with single-flip incremental updates.
//!
//! Every contribution of an instance is a rational; multiplying by the least
//! common multiple of their denominators turns the objective into an integer
//! function `value(x) = scale · H(x)`. Enumeration, sampling, and ball search
//! all run on these integers, so threshold tests stay exact while costing a
//! machine comparison.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::assignment::Assignment;
use super::csp::{CspInstance, TruthTable};
use super::lin2::Lin2Instance;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Scaled factor magnitudes are kept below this bound so that sums over up to
/// 2^32 factors cannot overflow `i128`.
const FACTOR_LIMIT: i64 = 1 << 62;

#[derive(Debug, Clone)]
enum FactorKind {
    /// `coef · (−1)^{popcount(local)}`.
    Parity { coef: i64 },
    /// `satisfied` where the table bit is set, `violated` elsewhere.
    Table {
        table: TruthTable,
        satisfied: i64,
        violated: i64,
    },
}

#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<u32>,
    kind: FactorKind,
}

impl Factor {
    #[inline]
    fn value(&self, local: u32) -> i64 {
        match &self.kind {
            FactorKind::Parity { coef } => {
                if local.count_ones() % 2 == 0 {
                    *coef
                } else {
                    -*coef
                }
            }
            FactorKind::Table {
                table,
                satisfied,
                violated,
            } => {
                if table.get(local as usize) {
                    *satisfied
                } else {
                    *violated
                }
            }
        }
    }

    #[inline]
    fn local_index(&self, x: &Assignment) -> u32 {
        self.vars
            .iter()
            .enumerate()
            .fold(0, |b, (t, &v)| b | ((x.bit(v as usize) as u32) << t))
    }
}

/// An instance compiled to integer factors with a variable incidence index.
#[derive(Debug, Clone)]
pub struct Objective {
    n: usize,
    scale: BigInt,
    factors: Vec<Factor>,
    /// CSR incidence: entries for variable `i` are `inc[off[i]..off[i + 1]]`.
    off: Vec<u32>,
    inc: Vec<(u32, u8)>,
}

impl Objective {
    pub fn from_lin2(inst: &Lin2Instance) -> Result<Self> {
        let scale = common_denominator(inst.terms().iter().map(|t| &t.coef));
        let factors = inst
            .terms()
            .iter()
            .map(|t| {
                Ok(Factor {
                    vars: t.vars.iter().map(|&v| v as u32).collect(),
                    kind: FactorKind::Parity {
                        coef: scaled_i64(&t.coef, &scale)?,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(inst.n(), scale, factors))
    }

    pub fn from_csp(inst: &CspInstance) -> Result<Self> {
        let values: Vec<(Rational, Rational)> = inst
            .constraints()
            .iter()
            .map(|c| (c.satisfied_value(), c.violated_value()))
            .collect();
        let scale = common_denominator(values.iter().flat_map(|(s, v)| [s, v]));
        let factors = inst
            .constraints()
            .iter()
            .zip(&values)
            .map(|(c, (s, v))| {
                Ok(Factor {
                    vars: c.vars().iter().map(|&v| v as u32).collect(),
                    kind: FactorKind::Table {
                        table: c.table().clone(),
                        satisfied: scaled_i64(s, &scale)?,
                        violated: scaled_i64(v, &scale)?,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(inst.n(), scale, factors))
    }

    fn assemble(n: usize, scale: BigInt, factors: Vec<Factor>) -> Self {
        let mut counts = vec![0u32; n + 1];
        for f in &factors {
            for &v in &f.vars {
                counts[v as usize + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let off = counts;
        let mut fill = off.clone();
        let mut inc = vec![(0u32, 0u8); off[n] as usize];
        for (fi, f) in factors.iter().enumerate() {
            for (pos, &v) in f.vars.iter().enumerate() {
                let slot = &mut fill[v as usize];
                inc[*slot as usize] = (fi as u32, pos as u8);
                *slot += 1;
            }
        }
        Objective {
            n,
            scale,
            factors,
            off,
            inc,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Positive integer with `value(x) = scale · H(x)`.
    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// Number of factors touching variable `i`.
    pub fn degree(&self, i: usize) -> usize {
        (self.off[i + 1] - self.off[i]) as usize
    }

    /// Full evaluation of the scaled objective.
    pub fn value(&self, x: &Assignment) -> i128 {
        debug_assert_eq!(x.len(), self.n);
        self.factors
            .iter()
            .map(|f| f.value(f.local_index(x)) as i128)
            .sum()
    }

    pub fn to_rational(&self, value: i128) -> Rational {
        Rational::new(BigInt::from(value), self.scale.clone())
    }

    /// `scale · r` when it is an integer, i.e. when some assignment could
    /// attain exactly `r`.
    pub fn scale_exact(&self, r: &Rational) -> Option<i128> {
        let s = r * Rational::from_integer(self.scale.clone());
        if s.is_integer() {
            s.to_integer().to_i128()
        } else {
            None
        }
    }

    /// `⌊scale · r⌋`; `value(x) ≤ scale_floor(r)` iff `H(x) ≤ r`.
    pub fn scale_floor(&self, r: &Rational) -> i128 {
        let s = (r * Rational::from_integer(self.scale.clone())).floor().to_integer();
        s.to_i128().unwrap_or(if s.is_negative() { i128::MIN } else { i128::MAX })
    }

    /// Scaled membership bound for `T_η = {x : H(x) ≤ (1 − η) h_min}`.
    pub fn threshold(&self, h_min: &Rational, eta: &Rational) -> i128 {
        self.scale_floor(&((Rational::one() - eta) * h_min))
    }

    pub fn walker(&self, x: Assignment) -> Walker<'_> {
        Walker::new(self, x)
    }
}

fn common_denominator<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

fn scaled_i64(r: &Rational, scale: &BigInt) -> Result<i64> {
    let s = r * Rational::from_integer(scale.clone());
    debug_assert!(s.is_integer());
    s.to_integer()
        .to_i64()
        .filter(|v| v.abs() < FACTOR_LIMIT)
        .ok_or_else(|| {
            Error::Overflow(format!(
                "contribution {r} scaled by {scale} does not fit in 62 bits"
            ))
        })
}

/// A point of the cube together with its scaled objective value, updated in
/// `O(deg(i))` per coordinate flip.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    obj: &'a Objective,
    x: Assignment,
    local: Vec<u32>,
    value: i128,
}

impl<'a> Walker<'a> {
    pub fn new(obj: &'a Objective, x: Assignment) -> Self {
        assert_eq!(x.len(), obj.n, "walker dimension mismatch");
        let local: Vec<u32> = obj.factors.iter().map(|f| f.local_index(&x)).collect();
        let value = obj
            .factors
            .iter()
            .zip(&local)
            .map(|(f, &b)| f.value(b) as i128)
            .sum();
        Walker {
            obj,
            x,
            local,
            value,
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        let (lo, hi) = (self.obj.off[i] as usize, self.obj.off[i + 1] as usize);
        let mut delta: i128 = 0;
        for &(f, pos) in &self.obj.inc[lo..hi] {
            let factor = &self.obj.factors[f as usize];
            let old = self.local[f as usize];
            let new = old ^ (1 << pos);
            self.local[f as usize] = new;
            delta += (factor.value(new) - factor.value(old)) as i128;
        }
        self.value += delta;
        self.x.flip(i);
    }

    #[inline]
    pub fn value(&self) -> i128 {
        self.value
    }

    pub fn assignment(&self) -> &Assignment {
        &self.x
    }

    pub fn into_assignment(self) -> Assignment {
        self.x
    }

    /// Moves to `target` by flipping the differing coordinates.
    pub fn jump_to(&mut self, target: &Assignment) {
        for i in self.x.differing_coords(target) {
            self.flip(i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::csp::Constraint;
    use crate::model::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn scale_clears_denominators() {
        let c1 = Constraint::new(vec![0, 1], ratio(1, 2), TruthTable::all_but(2, 0).unwrap()).unwrap();
        let c2 = Constraint::new(vec![1, 2, 3], ratio(2, 3), TruthTable::from_fn(3, |b| b < 3).unwrap()).unwrap();
        let inst = CspInstance::new(4, 3, vec![c1, c2]).unwrap();
        let obj = Objective::from_csp(&inst).unwrap();
        for mask in 0..16 {
            let x = Assignment::from_mask(4, mask).unwrap();
            assert_eq!(obj.to_rational(obj.value(&x)), inst.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn threshold_is_exact() {
        let inst = Lin2Instance::new(2, 2, vec![(vec![0, 1], ratio(-3, 2))]).unwrap();
        let obj = Objective::from_lin2(&inst).unwrap();
        assert_eq!(obj.scale(), &BigInt::from(2));
        // (1 − 1/3)·(−3/2) = −1 → scaled −2
        assert_eq!(obj.threshold(&ratio(-3, 2), &ratio(1, 3)), -2);
        assert_eq!(obj.scale_exact(&ratio(-1, 3)), None);
        assert_eq!(obj.scale_exact(&int(-1)), Some(-2));
    }

    #[test]
    fn overflow_is_reported() {
        let huge = Rational::from_integer(BigInt::from(1u64 << 63));
        let inst = Lin2Instance::new(2, 2, vec![(vec![0, 1], huge)]).unwrap();
        assert!(matches!(Objective::from_lin2(&inst), Err(Error::Overflow(_))));
    }

    proptest! {
        #[test]
        fn incremental_matches_full(terms in prop::collection::vec((0usize..7, 0usize..7, 0usize..7, -5i64..=5), 1..12),
                                    flips in prop::collection::vec(0usize..7, 0..40),
                                    start in 0u64..128) {
            let terms: Vec<_> = terms.into_iter()
                .filter(|(a, b, c, _)| a != b && b != c && a != c)
                .map(|(a, b, c, w)| (vec![a, b, c], int(w)))
                .collect();
            let inst = Lin2Instance::new(7, 3, terms).unwrap();
            let obj = Objective::from_lin2(&inst).unwrap();
            let mut w = obj.walker(Assignment::from_mask(7, start).unwrap());
            for i in flips {
                w.flip(i);
                prop_assert_eq!(w.value(), obj.value(w.assignment()));
                prop_assert_eq!(obj.to_rational(w.value()), inst.evaluate(w.assignment()).unwrap());
            }
        }
    }
}
