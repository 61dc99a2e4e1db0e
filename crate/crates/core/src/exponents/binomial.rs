//! Exact checks of the entropy lower bounds on binomial coefficients.
//!
//! The layer bound `C(N, r) ≥ 2^{N h(r/N)} / (N + 1)` is an inequality between
//! integers once both sides are multiplied out. The rounded bound
//! `C(N, ⌊Nt⌋) ≥ 2^{N h(t)} / (e N (N + 1))` involves `e` and an irrational
//! power of two; it is decided by a floating comparison when the margin is
//! far above rounding error, and otherwise by raising both sides to the
//! power `b` (for `t = a/b`) and bracketing `e` between rationals.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::entropy::entropy_unchecked;
use crate::error::{Error, Result};
use crate::model::{format_rational, Rational};

/// Largest `N` accepted by [`verify_binomial_bounds`].
pub const BINOMIAL_N_CAP: u64 = 10_000;

/// Floating margins above this many bits are trusted without the exact check.
const FLOAT_TRUST_BITS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinomialCheck {
    pub n: u64,
    pub t: String,
    pub r: u64,
    /// `C(N, r) ≥ 2^{N h(r/N)}/(N+1)`, decided exactly.
    pub layer_pass: bool,
    pub layer_margin_bits: f64,
    /// `C(N, ⌊Nt⌋) ≥ 2^{N h(t)}/(e N (N+1))`.
    pub rounded_pass: bool,
    pub rounded_margin_bits: f64,
    /// Whether the rounded bound needed the exact fallback.
    pub rounded_exact: bool,
}

impl BinomialCheck {
    pub fn passed(&self) -> bool {
        self.layer_pass && self.rounded_pass
    }
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `log₂` of a positive big integer, accurate to about 1e-15 relative.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().expect("small").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64 bits");
    top.log2() + shift as f64
}

fn pow_u(base: u64, exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

/// Checks both lemmas for one `(N, t)` with `1 ≤ N ≤ 10⁴` and `0 ≤ t ≤ 1/2`.
pub fn verify_binomial_bounds(n: u64, t: &Rational) -> Result<BinomialCheck> {
    if n == 0 || n > BINOMIAL_N_CAP {
        return Err(Error::domain(format!("N = {n} is outside 1..={BINOMIAL_N_CAP}")));
    }
    if t.is_negative() || t > &Rational::new(1.into(), 2.into()) {
        return Err(Error::domain(format!("t = {} is outside [0, 1/2]", format_rational(t))));
    }
    let a = t.numer().to_u64().expect("nonnegative numerator");
    let b = t.denom().to_u64().ok_or_else(|| Error::domain("denominator of t is too large"))?;
    let r = (BigInt::from(n) * t.numer()).div_floor(t.denom()).to_u64().expect("r ≤ N");
    let c = binomial(n, r);
    let log_c = log2_big(&c);
    let poly = (n * (n + 1)) as f64;

    // Layer bound: C·(N+1)·r^r·(N−r)^{N−r} ≥ N^N.
    let lhs = &c * (n + 1) * pow_u(r, r) * pow_u(n - r, n - r);
    let layer_pass = lhs >= pow_u(n, n);
    let layer_rhs = n as f64 * entropy_unchecked(r as f64 / n as f64) - ((n + 1) as f64).log2();
    let layer_margin_bits = log_c - layer_rhs;

    let tf = a as f64 / b as f64;
    let rounded_rhs = n as f64 * entropy_unchecked(tf) - std::f64::consts::LOG2_E - poly.log2();
    let rounded_margin_bits = log_c - rounded_rhs;
    let (rounded_pass, rounded_exact) = if rounded_margin_bits.abs() > FLOAT_TRUST_BITS {
        (rounded_margin_bits > 0.0, false)
    } else {
        (rounded_bound_exact(n, a, b, &c)?, true)
    };

    Ok(BinomialCheck {
        n,
        t: format_rational(t),
        r,
        layer_pass,
        layer_margin_bits,
        rounded_pass,
        rounded_margin_bits,
        rounded_exact,
    })
}

/// Rational bracket `lo < e < hi` from the series `Σ 1/j!` with `terms` terms.
fn e_bracket(terms: u64) -> (Rational, Rational) {
    let mut sum = Rational::zero();
    let mut fact = BigInt::one();
    for j in 0..terms {
        if j > 0 {
            fact *= j;
        }
        sum += Rational::new(BigInt::one(), fact.clone());
    }
    // Tail after `terms` terms is below 2/terms!.
    let tail = Rational::new(BigInt::from(2), fact * terms);
    (sum.clone(), sum + tail)
}

/// Decides `C · e · N(N+1) ≥ 2^{N h(a/b)}` exactly by comparing `b`-th powers:
/// `(C e N(N+1))^b` against `(b/a)^{Na} (b/(b−a))^{N(b−a)}`.
pub fn rounded_bound_exact(n: u64, a: u64, b: u64, c: &BigUint) -> Result<bool> {
    if a == 0 {
        // h(0) = 0 and C(N, 0) = 1.
        return Ok(true);
    }
    let target_num = pow_u(b, n * b);
    let target_den = pow_u(a, n * a) * pow_u(b - a, n * (b - a));
    let base = c * n * (n + 1);
    let base_b = num_traits::pow(base, b as usize);
    for terms in [20u64, 40, 80, 160] {
        let (lo, hi) = e_bracket(terms);
        let cmp = |e: &Rational| {
            let e_b = num_traits::pow(e.clone(), b as usize);
            // base^b · e^b · target_den ≥ target_num
            let lhs = Rational::from_integer(BigInt::from(base_b.clone() * &target_den)) * e_b;
            lhs >= Rational::from_integer(BigInt::from(target_num.clone()))
        };
        if cmp(&lo) {
            return Ok(true);
        }
        if !cmp(&hi) {
            return Ok(false);
        }
    }
    Err(Error::Refused(format!(
        "rounded binomial bound at N = {n}, t = {a}/{b} is too close to call"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ratio;

    #[test]
    fn ten_choose_five() {
        let check = verify_binomial_bounds(10, &ratio(1, 2)).unwrap();
        assert_eq!(check.r, 5);
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert!(check.passed());
        // 2^10/(e·10·11) ≈ 3.42
        let rhs = 1024.0 / (std::f64::consts::E * 110.0);
        assert!((rhs - 3.4245).abs() < 1e-3);
        assert!((check.rounded_margin_bits - (252f64 / rhs).log2()).abs() < 1e-9);
    }

    #[test]
    fn t_zero_is_trivial() {
        let check = verify_binomial_bounds(37, &ratio(0, 1)).unwrap();
        assert_eq!(check.r, 0);
        assert!(check.passed());
    }

    #[test]
    fn quarter_at_hundred() {
        let check = verify_binomial_bounds(100, &ratio(1, 4)).unwrap();
        assert!(check.passed());
        assert!(check.rounded_margin_bits > 0.0);
        assert!(check.layer_margin_bits > 0.0);
    }

    #[test]
    fn exact_fallback_agrees_with_float() {
        for (n, a, b) in [(10u64, 1u64, 2u64), (50, 1, 3), (64, 5, 16), (7, 1, 7)] {
            let r = n * a / b;
            let c = binomial(n, r);
            let float = log2_big(&c) - (n as f64 * entropy_unchecked(a as f64 / b as f64)
                - std::f64::consts::LOG2_E
                - ((n * (n + 1)) as f64).log2());
            assert_eq!(rounded_bound_exact(n, a, b, &c).unwrap(), float > 0.0);
        }
        // a deliberately false instance of the inequality: C replaced by 1
        assert!(!rounded_bound_exact(200, 1, 2, &BigUint::one()).unwrap());
    }

    #[test]
    fn domain_errors() {
        assert!(verify_binomial_bounds(0, &ratio(1, 4)).is_err());
        assert!(verify_binomial_bounds(10, &ratio(3, 4)).is_err());
        assert!(verify_binomial_bounds(10_001, &ratio(1, 4)).is_err());
    }
}
