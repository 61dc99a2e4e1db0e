use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Binary entropy `h(t) = -t log₂ t - (1-t) log₂(1-t)` with `h(0) = h(1) = 0`.
pub fn binary_entropy(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("entropy argument {t} is outside [0, 1]")));
    }
    Ok(entropy_unchecked(t))
}

pub(crate) fn entropy_unchecked(t: f64) -> f64 {
    if t == 0.0 || t == 1.0 {
        return 0.0;
    }
    // Evaluate on the smaller side so log1p keeps full precision near 0 and 1.
    let s = t.min(1.0 - t);
    -(s * s.ln() + (1.0 - s) * (-s).ln_1p()) / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // 2 - (3/4) log₂ 3
        let exact = 2.0 - 0.75 * 3f64.log2();
        assert!((binary_entropy(0.25).unwrap() - exact).abs() < 1e-12);
        assert!((exact - 0.811_278_124_459_132_9).abs() < 1e-12);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn tiny_arguments_keep_precision() {
        let t = 1e-300;
        let h = binary_entropy(t).unwrap();
        assert!(h > 0.0 && h.is_finite());
        let series = t * (1.0 / t).log2() + t / LN_2;
        assert!((h - series).abs() / series < 1e-12);
    }

    proptest! {
        #[test]
        fn symmetric_and_above_chord(t in 0.0f64..=0.5) {
            let h = binary_entropy(t).unwrap();
            prop_assert!((h - binary_entropy(1.0 - t).unwrap()).abs() < 1e-12);
            prop_assert!(h >= 2.0 * t - 1e-12);
        }
    }
}
