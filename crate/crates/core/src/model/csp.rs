use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::assignment::Assignment;
use super::lin2::Lin2Instance;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Largest supported constraint arity; the truth table has `2^arity` bits.
pub const MAX_ARITY: usize = 16;

/// Truth table of a local predicate over `arity` sign variables.
///
/// Bit `b` describes the local assignment in which `vars[t]` is `-1` exactly
/// when bit `t` of `b` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    bits: Vec<u64>,
}

impl TruthTable {
    pub fn from_fn(arity: usize, mut satisfied: impl FnMut(usize) -> bool) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(Error::domain(format!("arity {arity} exceeds {MAX_ARITY}")));
        }
        let size = 1usize << arity;
        let mut bits = vec![0u64; size.div_ceil(64)];
        for b in 0..size {
            if satisfied(b) {
                bits[b >> 6] |= 1 << (b & 63);
            }
        }
        Ok(TruthTable { arity, bits })
    }

    /// Table with bits copied from the low `2^arity` bits of `words`.
    pub fn from_words(arity: usize, words: &[u64]) -> Result<Self> {
        let size = 1usize << arity.min(MAX_ARITY);
        let needed = size.div_ceil(64);
        let mut ws = words.to_vec();
        let excess = ws.iter().skip(needed).any(|&w| w != 0)
            || (size < 64 && ws.first().is_some_and(|&w| w >> size != 0));
        if arity > MAX_ARITY || excess {
            return Err(Error::domain(format!(
                "truth table does not fit arity {arity}"
            )));
        }
        ws.resize(needed, 0);
        Ok(TruthTable { arity, bits: ws })
    }

    /// Clause-style table: every local assignment except `falsifying` satisfies.
    pub fn all_but(arity: usize, falsifying: usize) -> Result<Self> {
        Self::from_fn(arity, |b| b != falsifying)
    }

    /// Parity table: satisfied iff the number of `-1` entries is even
    /// (`odd == false`) or odd (`odd == true`).
    pub fn parity(arity: usize, odd: bool) -> Result<Self> {
        Self::from_fn(arity, |b| (b.count_ones() % 2 == 1) == odd)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, local: usize) -> bool {
        (self.bits[local >> 6] >> (local & 63)) & 1 == 1
    }

    /// `s_j`, the number of satisfying local assignments.
    pub fn satisfied_count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `Some(odd)` when this is one of the two arity-`k` parity predicates.
    pub fn parity_kind(&self) -> Option<bool> {
        [false, true].into_iter().find(|&odd| {
            (0..1usize << self.arity).all(|b| self.get(b) == ((b.count_ones() % 2 == 1) == odd))
        })
    }
}

/// A weighted constraint `(vars, w_j, P_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    vars: Vec<usize>,
    weight: Rational,
    table: TruthTable,
}

impl Constraint {
    /// Validates distinct variables, matching table arity, `w > 0`, and a
    /// nontrivial predicate (`1 ≤ s ≤ 2^arity − 1`). Variable bounds are
    /// checked by [`CspInstance::new`].
    pub fn new(vars: Vec<usize>, weight: Rational, table: TruthTable) -> Result<Self> {
        let bad = |m: String| Err(Error::invalid("constraint", 0, m));
        if vars.is_empty() {
            return bad("has no variables".into());
        }
        if vars.len() != table.arity() {
            return bad(format!(
                "lists {} variables but its truth table has arity {}",
                vars.len(),
                table.arity()
            ));
        }
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("repeats a variable".into());
        }
        if !weight.is_positive() {
            return bad("weight must be positive".into());
        }
        let s = table.satisfied_count();
        if s == 0 || s == 1u64 << table.arity() {
            return bad(format!("predicate is trivial (s = {s})"));
        }
        Ok(Constraint { vars, weight, table })
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub fn satisfied_count(&self) -> u64 {
        self.table.satisfied_count()
    }

    /// `Λ_j = 2^{k_j} / (2^{k_j} − s_j)`.
    pub fn lambda(&self) -> Rational {
        let size = 1u64 << self.arity();
        Rational::new(
            BigInt::from(size),
            BigInt::from(size - self.satisfied_count()),
        )
    }

    /// Contribution when satisfied: `−w_j`.
    pub fn satisfied_value(&self) -> Rational {
        -self.weight.clone()
    }

    /// Contribution when violated: `s_j/(2^{k_j} − s_j) · w_j`.
    pub fn violated_value(&self) -> Rational {
        let size = 1u64 << self.arity();
        let s = self.satisfied_count();
        Rational::new(BigInt::from(s), BigInt::from(size - s)) * &self.weight
    }

    pub fn local_index(&self, x: &Assignment) -> usize {
        self.vars
            .iter()
            .enumerate()
            .fold(0, |b, (t, &v)| b | ((x.bit(v) as usize) << t))
    }

    pub fn is_satisfied(&self, x: &Assignment) -> bool {
        self.table.get(self.local_index(x))
    }

    /// Centered contribution `C_j(x)`.
    pub fn value(&self, x: &Assignment) -> Rational {
        if self.is_satisfied(x) {
            self.satisfied_value()
        } else {
            self.violated_value()
        }
    }
}

/// Average of `C_j` over all `2^{k_j}` local assignments; always exactly zero.
pub fn centered_mean_check(c: &Constraint) -> Rational {
    let size = 1usize << c.arity();
    let sat = c.satisfied_value();
    let vio = c.violated_value();
    let total: Rational = (0..size)
        .map(|b| if c.table.get(b) { &sat } else { &vio })
        .sum();
    total / Rational::from_integer(BigInt::from(size))
}

/// A weighted MAX-`k`-CSP instance with centered objective `H = Σ_j C_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    n: usize,
    k: usize,
    constraints: Vec<Constraint>,
}

impl CspInstance {
    pub fn new(n: usize, k: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if k == 0 || k > MAX_ARITY {
            return Err(Error::domain(format!("arity bound k = {k} must lie in 1..={MAX_ARITY}")));
        }
        for (j, c) in constraints.iter().enumerate() {
            if c.arity() > k {
                return Err(Error::invalid(
                    "constraint",
                    j,
                    format!("arity {} exceeds k = {k}", c.arity()),
                ));
            }
            if let Some(&v) = c.vars.iter().find(|&&v| v >= n) {
                return Err(Error::invalid(
                    "constraint",
                    j,
                    format!("variable {} is outside 1..={n}", v + 1),
                ));
            }
        }
        Ok(CspInstance { n, k, constraints })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Total weight `W`.
    pub fn total_weight(&self) -> Rational {
        self.constraints.iter().map(|c| c.weight.clone()).sum()
    }

    pub fn is_unweighted(&self) -> bool {
        self.constraints.iter().all(|c| c.weight.is_one())
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<Rational> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self.constraints.iter().map(|c| c.value(x)).sum())
    }

    /// Total weight of constraints satisfied by `x`.
    pub fn satisfied_weight(&self, x: &Assignment) -> Result<Rational> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self
            .constraints
            .iter()
            .filter(|c| c.is_satisfied(x))
            .map(|c| c.weight.clone())
            .sum())
    }
}

/// Exact centered objective at `x`.
pub fn evaluate_csp(inst: &CspInstance, x: &Assignment) -> Result<Rational> {
    inst.evaluate(x)
}

/// Rewrites an all-parity, all-arity-`k` CSP as the equivalent homogeneous
/// degree-`k` polynomial.
///
/// A parity constraint satisfied when `Π x_i = σ` contributes `−w σ Π x_i`,
/// so the monomial coefficient is `−w` for even parity and `+w` for odd.
pub fn lin2_of_csp_parity(inst: &CspInstance) -> Result<Lin2Instance> {
    let mut terms = Vec::with_capacity(inst.constraints.len());
    for (j, c) in inst.constraints.iter().enumerate() {
        if c.arity() != inst.k {
            return Err(Error::invalid(
                "constraint",
                j,
                format!("arity {} differs from k = {}", c.arity(), inst.k),
            ));
        }
        let odd = c.table.parity_kind().ok_or_else(|| {
            Error::invalid("constraint", j, "is not a parity predicate")
        })?;
        let coef = if odd {
            c.weight.clone()
        } else {
            -c.weight.clone()
        };
        terms.push((c.vars.clone(), coef));
    }
    Lin2Instance::new(inst.n, inst.k, terms)
}
