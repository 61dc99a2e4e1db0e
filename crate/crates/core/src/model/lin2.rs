use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::assignment::Assignment;
use super::rational::Rational;
use crate::error::{Error, Result};

/// One monomial `coef · Π_{i ∈ vars} x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    /// Strictly increasing 0-based variable indices.
    pub vars: Vec<usize>,
    pub coef: Rational,
}

/// A homogeneous degree-`k` multilinear objective over `{-1, +1}^n`.
///
/// Repeated monomials are merged on construction and zero aggregates are
/// dropped, so `terms` is a set of distinct `k`-subsets with nonzero
/// coefficients, sorted by variable tuple. An instance with no terms is the
/// identically-zero objective and is reported as trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lin2Instance {
    n: usize,
    k: usize,
    terms: Vec<Term>,
}

impl Lin2Instance {
    pub fn new<I>(n: usize, k: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        if k == 0 {
            return Err(Error::domain("monomial degree k must be at least 1"));
        }
        let mut merged: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (index, (mut vars, coef)) in terms.into_iter().enumerate() {
            if vars.len() != k {
                return Err(Error::invalid(
                    "term",
                    index,
                    format!("has {} variables, expected k = {k}", vars.len()),
                ));
            }
            vars.sort_unstable();
            if vars.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("term", index, "repeats a variable"));
            }
            if let Some(&v) = vars.iter().find(|&&v| v >= n) {
                return Err(Error::invalid(
                    "term",
                    index,
                    format!("variable {} is outside 1..={n}", v + 1),
                ));
            }
            *merged.entry(vars).or_insert_with(Rational::zero) += coef;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(vars, coef)| Term { vars, coef })
            .collect();
        Ok(Lin2Instance { n, k, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// `H ≡ 0`: every assignment is optimal.
    pub fn is_trivial(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of `|c_S|`; an upper bound on `|H(x)|`.
    pub fn l1_norm(&self) -> Rational {
        self.terms.iter().map(|t| t.coef.abs()).sum()
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<Rational> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut total = Rational::zero();
        for t in &self.terms {
            let negative = t.vars.iter().filter(|&&v| x.bit(v)).count() % 2 == 1;
            if negative {
                total -= &t.coef;
            } else {
                total += &t.coef;
            }
        }
        Ok(total)
    }
}

/// Exact value of the multilinear form at `x`.
pub fn evaluate_lin2(inst: &Lin2Instance, x: &Assignment) -> Result<Rational> {
    inst.evaluate(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational::int;

    #[test]
    fn single_monomial() {
        let inst = Lin2Instance::new(2, 2, vec![(vec![0, 1], int(-1))]).unwrap();
        let pp: Assignment = "++".parse().unwrap();
        let pm: Assignment = "+-".parse().unwrap();
        assert_eq!(evaluate_lin2(&inst, &pp).unwrap(), int(-1));
        assert_eq!(evaluate_lin2(&inst, &pm).unwrap(), int(1));
    }

    #[test]
    fn two_cubic_terms() {
        let inst = Lin2Instance::new(
            4,
            3,
            vec![(vec![0, 1, 2], int(2)), (vec![1, 2, 3], int(-1))],
        )
        .unwrap();
        let x: Assignment = "++-+".parse().unwrap();
        // hand expansion: 2·(1·1·-1) + (-1)·(1·-1·1)
        let expected = int(2) * int(-1) + int(-1) * int(-1);
        assert_eq!(evaluate_lin2(&inst, &x).unwrap(), expected);
        assert_eq!(expected, int(-1));
    }

    #[test]
    fn merges_duplicates_and_drops_zeros() {
        let inst = Lin2Instance::new(
            3,
            2,
            vec![
                (vec![1, 0], int(1)),
                (vec![0, 1], int(-1)),
                (vec![1, 2], int(3)),
                (vec![2, 1], int(1)),
            ],
        )
        .unwrap();
        assert_eq!(inst.terms().len(), 1);
        assert_eq!(inst.terms()[0].vars, vec![1, 2]);
        assert_eq!(inst.terms()[0].coef, int(4));
    }

    #[test]
    fn validation_errors() {
        assert!(Lin2Instance::new(3, 2, vec![(vec![0], int(1))]).is_err());
        assert!(Lin2Instance::new(3, 2, vec![(vec![0, 0], int(1))]).is_err());
        assert!(Lin2Instance::new(3, 2, vec![(vec![0, 3], int(1))]).is_err());
        assert!(Lin2Instance::new(3, 0, Vec::new()).is_err());
        let inst = Lin2Instance::new(3, 2, vec![(vec![0, 1], int(1))]).unwrap();
        assert!(matches!(
            inst.evaluate(&Assignment::ones(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trivial_flag() {
        let inst = Lin2Instance::new(10, 3, Vec::new()).unwrap();
        assert!(inst.is_trivial());
    }
}
