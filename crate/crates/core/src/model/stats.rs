use num_traits::{One, Zero};
use serde::Serialize;

use super::csp::CspInstance;
use super::rational::{format_rational, int, to_f64, Rational};

/// Derived weight statistics of a CSP instance, all exact.
///
/// For an instance without constraints, `Σ = 0`; the irregularity is then
/// reported as 1 and every coordinate counts as light.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceStats {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// `W = Σ_j w_j`.
    pub total_weight: Rational,
    /// `Σ = Σ_i d_i = Σ_j k_j w_j`.
    pub sigma: Rational,
    /// `d_avg = Σ / n`.
    pub d_avg: Rational,
    /// Weighted degree `d_i` of every variable.
    pub degrees: Vec<Rational>,
    /// `D = n Σ d_i² / Σ²`.
    pub irregularity: Rational,
    /// `Λ_max = max_j Λ_j` (zero when there are no constraints).
    pub lambda_max: Rational,
    /// `{i : d_i ≤ 2 d_avg}`, ascending.
    pub light_set: Vec<usize>,
}

pub fn compute_stats(inst: &CspInstance) -> InstanceStats {
    let n = inst.n();
    let mut degrees = vec![Rational::zero(); n];
    let mut sigma = Rational::zero();
    let mut lambda_max = Rational::zero();
    for c in inst.constraints() {
        for &v in c.vars() {
            degrees[v] += c.weight();
        }
        sigma += c.weight() * int(c.arity() as i64);
        let lambda = c.lambda();
        if lambda > lambda_max {
            lambda_max = lambda;
        }
    }
    let total_weight = inst.total_weight();
    let (d_avg, irregularity) = if sigma.is_zero() || n == 0 {
        (Rational::zero(), Rational::one())
    } else {
        let sum_sq: Rational = degrees.iter().map(|d| d * d).sum();
        (
            &sigma / int(n as i64),
            int(n as i64) * sum_sq / (&sigma * &sigma),
        )
    };
    let threshold = &d_avg * int(2);
    let light_set = (0..n).filter(|&i| degrees[i] <= threshold).collect();
    InstanceStats {
        n,
        k: inst.k(),
        m: inst.constraints().len(),
        total_weight,
        sigma,
        d_avg,
        degrees,
        irregularity,
        lambda_max,
        light_set,
    }
}

/// Serializable summary; exact fields as `"p/q"` strings plus float views.
#[derive(Debug, Clone, Serialize)]
pub struct StatsSummary {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub total_weight: String,
    pub sigma: String,
    pub d_avg: String,
    pub irregularity: String,
    pub irregularity_f64: f64,
    pub lambda_max: String,
    pub light_count: usize,
    pub degrees: Vec<String>,
}

impl InstanceStats {
    pub fn summary(&self) -> StatsSummary {
        StatsSummary {
            n: self.n,
            k: self.k,
            m: self.m,
            total_weight: format_rational(&self.total_weight),
            sigma: format_rational(&self.sigma),
            d_avg: format_rational(&self.d_avg),
            irregularity: format_rational(&self.irregularity),
            irregularity_f64: to_f64(&self.irregularity),
            lambda_max: format_rational(&self.lambda_max),
            light_count: self.light_set.len(),
            degrees: self.degrees.iter().map(format_rational).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::csp::{Constraint, TruthTable};
    use crate::model::rational::ratio;

    fn pair(a: usize, b: usize) -> Constraint {
        Constraint::new(vec![a, b], int(1), TruthTable::all_but(2, 0).unwrap()).unwrap()
    }

    #[test]
    fn single_pair() {
        let s = compute_stats(&CspInstance::new(2, 2, vec![pair(0, 1)]).unwrap());
        assert_eq!(s.degrees, vec![int(1), int(1)]);
        assert_eq!(s.sigma, int(2));
        assert_eq!(s.d_avg, int(1));
        assert_eq!(s.irregularity, int(1));
        assert_eq!(s.light_set, vec![0, 1]);
        assert_eq!(s.lambda_max, int(4));
    }

    #[test]
    fn path_of_two_pairs() {
        let s = compute_stats(&CspInstance::new(3, 2, vec![pair(0, 1), pair(0, 2)]).unwrap());
        assert_eq!(s.degrees, vec![int(2), int(1), int(1)]);
        assert_eq!(s.sigma, int(4));
        // 3·(4+1+1)/16
        assert_eq!(s.irregularity, ratio(9, 8));
    }

    #[test]
    fn regular_cycle_has_unit_irregularity() {
        let cs = (0..6).map(|i| pair(i, (i + 1) % 6)).collect();
        let s = compute_stats(&CspInstance::new(6, 2, cs).unwrap());
        assert_eq!(s.irregularity, int(1));
        assert_eq!(s.light_set.len(), 6);
    }

    #[test]
    fn star_excludes_hub() {
        let cs = (1..20).map(|i| pair(0, i)).collect();
        let s = compute_stats(&CspInstance::new(20, 2, cs).unwrap());
        assert!(!s.light_set.contains(&0));
        assert_eq!(s.light_set.len(), 19);
    }

    #[test]
    fn empty_instance() {
        let s = compute_stats(&CspInstance::new(4, 3, Vec::new()).unwrap());
        assert_eq!(s.sigma, int(0));
        assert_eq!(s.irregularity, int(1));
        assert_eq!(s.light_set.len(), 4);
    }
}
