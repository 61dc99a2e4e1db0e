//! Exact rational helpers shared by the model, formats, and calculators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or an integer. Decimal points and exponents are rejected.
pub fn parse_rational(token: &str) -> Result<Rational> {
    let bad = || Error::domain(format!("{token:?} is not an exact rational (expected p/q or an integer)"));
    let (num, den) = match token.split_once('/') {
        Some((p, q)) => (p, q),
        None => (token, "1"),
    };
    let valid = |s: &str, allow_sign: bool| {
        let digits = if allow_sign {
            s.strip_prefix(['-', '+']).unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return Err(bad());
    }
    let num: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::domain(format!("{token:?} has a zero denominator")));
    }
    Ok(Rational::new(num, den))
}

/// Formats in lowest terms as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles big numerators/denominators without overflow.
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Checks `0 < eta < 1`.
pub fn check_open_unit(name: &str, eta: &Rational) -> Result<()> {
    if eta.is_positive() && eta < &Rational::one() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} = {} must lie strictly between 0 and 1",
            format_rational(eta)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("-1").unwrap(), int(-1));
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("+2").unwrap(), int(2));
        assert_eq!(parse_rational("-3/9").unwrap(), ratio(-1, 3));
    }

    #[test]
    fn rejects_floats_and_garbage() {
        for bad in ["0.5", "1e3", "1/0", "", "/3", "3/", "1/-2", "abc", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format_rational(&ratio(4, 8)), "1/2");
        assert_eq!(format_rational(&ratio(-6, 3)), "-2");
    }
}
