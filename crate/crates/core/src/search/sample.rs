use num_traits::{Signed, ToPrimitive};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::exponents::{flip_rates, shell_half_width};
use crate::model::{format_rational, Assignment, InstanceStats, Objective, Problem, Rational};

/// Uniform point of `{-1, +1}^n` built from full 64-bit words with the bits
/// beyond `n` discarded.
pub fn uniform_assignment(n: usize, rng: &mut impl RngCore) -> Assignment {
    let words = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
    Assignment::from_words(n, words)
}

/// Result of a budgeted rejection sampler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Draw {
    /// An accepted point, its scaled value, and the draws used including it.
    Hit { x: Assignment, value: i128, draws: u64 },
    /// No point accepted within the budget.
    Exhausted { draws: u64 },
}

/// Uniform sampler for `{x : value(x) ≤ threshold}` on a compiled objective.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdSampler<'a> {
    obj: &'a Objective,
    threshold: i128,
}

impl<'a> ThresholdSampler<'a> {
    pub fn new(obj: &'a Objective, threshold: i128) -> Self {
        ThresholdSampler { obj, threshold }
    }

    /// For `T_η = {x : H(x) ≤ (1-η) h_min}`.
    pub fn for_threshold_set(obj: &'a Objective, h_min: &Rational, eta: &Rational) -> Self {
        Self::new(obj, obj.threshold(h_min, eta))
    }

    pub fn threshold(&self) -> i128 {
        self.threshold
    }

    pub fn accepts(&self, value: i128) -> bool {
        value <= self.threshold
    }

    pub fn draw(&self, rng: &mut impl RngCore, max_draws: u64) -> Draw {
        for draws in 1..=max_draws {
            let x = uniform_assignment(self.obj.n(), rng);
            let value = self.obj.value(&x);
            if value <= self.threshold {
                return Draw::Hit { x, value, draws };
            }
        }
        Draw::Exhausted { draws: max_draws }
    }
}

/// Draws uniformly from `T_η` by rejection. Fails with
/// [`Error::Refused`] when `max_draws` draws all miss.
pub fn rejection_sample_threshold(
    inst: &impl Problem,
    h_min: &Rational,
    eta: &Rational,
    rng: &mut impl RngCore,
    max_draws: u64,
) -> Result<(Assignment, u64)> {
    if !h_min.is_negative() {
        return Err(Error::Degenerate(format!("H_min = {} is not negative", format_rational(h_min))));
    }
    crate::model::rational::check_open_unit("eta", eta)?;
    let obj = inst.compile()?;
    match ThresholdSampler::for_threshold_set(&obj, h_min, eta).draw(rng, max_draws) {
        Draw::Hit { x, draws, .. } => Ok((x, draws)),
        Draw::Exhausted { draws } => Err(Error::Refused(format!(
            "no point of the threshold set in {draws} raw draws"
        ))),
    }
}

/// Default raw-draw budget `64 · 2^n / max(1, estimate)`.
pub fn default_draw_budget(n: usize, threshold_estimate: u64) -> u64 {
    let cube = if n >= 64 { u128::MAX } else { 1u128 << n };
    (64 * cube / threshold_estimate.max(1) as u128).min(u64::MAX as u128) as u64
}

/// Flips each coordinate of `x_star` independently with probability `q`.
pub fn correlated_sample(x_star: &Assignment, q: &Rational, rng: &mut impl RngCore) -> Result<Assignment> {
    if q.is_negative() || q > &Rational::new(1.into(), 2.into()) {
        return Err(Error::domain(format!("flip probability {} is outside [0, 1/2]", format_rational(q))));
    }
    let (Some(a), Some(b)) = (q.numer().to_u64(), q.denom().to_u64()) else {
        return Err(Error::domain("flip probability denominator exceeds 64 bits"));
    };
    let mut x = x_star.clone();
    if a == 0 {
        return Ok(x);
    }
    for i in 0..x.len() {
        if rng.gen_range(0..b) < a {
            x.flip(i);
        }
    }
    Ok(x)
}

/// `|d_H(x, x*) - q_{η,n} n| ≤ n^{2/3}`.
pub fn in_typical_shell(x: &Assignment, x_star: &Assignment, eta: &Rational, k: usize, n: usize) -> Result<bool> {
    let d = x.hamming_distance(x_star)?;
    shell_contains(d, eta, k, n)
}

/// Shell membership by distance alone.
pub fn shell_contains(distance: usize, eta: &Rational, k: usize, n: usize) -> Result<bool> {
    let rates = flip_rates(eta, k, n)?;
    Ok((distance as f64 - rates.q_eta_n * n as f64).abs() <= shell_half_width(n))
}

/// The light coordinates `{i : d_i ≤ 2 d_avg}`.
pub fn light_coords(stats: &InstanceStats) -> Vec<usize> {
    stats.light_set.clone()
}
