//! Closed-form exponents, radii, and flip rates.
//!
//! Exact rational inputs (`η`, `H_min`, instance statistics) are combined
//! exactly as far as each formula allows; only the final transcendental step
//! (entropy, `ln 2`, fractional powers) is done in binary64.

pub mod binomial;
pub mod entropy;

use std::f64::consts::LN_2;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use binomial::{binomial, verify_binomial_bounds, BinomialCheck};
pub use entropy::binary_entropy;

use entropy::entropy_unchecked;
use crate::error::{Error, Result};
use crate::model::rational::{check_open_unit, to_f64};
use crate::model::{format_rational, int, InstanceStats, Rational};

/// `1/(2(2 + ln 2))`, the leading constant of the quantum MAX-Ek-LIN2 exponent.
pub fn quantum_a_constant() -> f64 {
    1.0 / (2.0 * (2.0 + LN_2))
}

/// Leading constant of the quantum MAX-k-CSP exponent.
pub const QUANTUM_B_CONSTANT: f64 = 0.0578;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipRates {
    /// `q_η = (1 - (1-η)^{1/k})/2`.
    pub q_eta: f64,
    /// `q_{η,n} = (1 - (1-η+η/n)^{1/k})/2`.
    pub q_eta_n: f64,
    /// `r_ns = ⌈q_η n + 2 n^{2/3}⌉`.
    pub r_ns: u64,
}

/// `(1 - (1-x)^{1/k})/2` without cancellation for small `x`.
fn half_one_minus_root(x: f64, k: usize) -> f64 {
    -((-x).ln_1p() / k as f64).exp_m1() / 2.0
}

pub fn flip_rates(eta: &Rational, k: usize, n: usize) -> Result<FlipRates> {
    check_open_unit("eta", eta)?;
    if k == 0 || n == 0 {
        return Err(Error::domain("flip rates need k ≥ 1 and n ≥ 1"));
    }
    let q_eta = half_one_minus_root(to_f64(eta), k);
    // 1 - η + η/n = 1 - η(n-1)/n
    let shrunk = eta * Rational::new((n as i64 - 1).into(), (n as i64).into());
    let q_eta_n = half_one_minus_root(to_f64(&shrunk), k);
    let nf = n as f64;
    let r_ns = (q_eta * nf + 2.0 * nf.cbrt().powi(2)).ceil() as u64;
    Ok(FlipRates { q_eta, q_eta_n, r_ns })
}

/// `n^{2/3}`, the half-width of the typical shell.
pub fn shell_half_width(n: usize) -> f64 {
    (n as f64).cbrt().powi(2)
}

fn require_negative(h_min: &Rational) -> Result<()> {
    if h_min.is_negative() {
        Ok(())
    } else {
        Err(Error::Degenerate(format!(
            "H_min = {} is not negative; every assignment is near-optimal",
            format_rational(h_min)
        )))
    }
}

/// `θ_η = η|H_min|/(Λ_max Σ)` and `r_lip = ⌊θ_η n/2⌋`.
pub fn lipschitz_params(stats: &InstanceStats, h_min: &Rational, eta: &Rational) -> Result<(Rational, u64)> {
    require_negative(h_min)?;
    check_open_unit("eta", eta)?;
    let theta = eta * h_min.abs() / (&stats.lambda_max * &stats.sigma);
    let r_lip = (&theta * int(stats.n as i64) / int(2)).floor().to_integer();
    Ok((theta, r_lip.to_u64().expect("nonnegative radius")))
}

/// Radius `⌊η|U|/(2Λ_max d_avg)⌋` of the light ball for a candidate bound `U`.
pub fn lipschitz_radius(stats: &InstanceStats, u: &Rational, eta: &Rational) -> u64 {
    if stats.sigma.is_zero() {
        return 0;
    }
    (eta * u.abs() / (int(2) * &stats.lambda_max * &stats.d_avg))
        .floor()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX)
}

/// Exact rational part `(1-η)² |U|² / (Λ_max² D Σ²)` of the McDiarmid exponent.
fn mcdiarmid_core(stats: &InstanceStats, u: &Rational, eta: &Rational) -> Rational {
    let one_minus = Rational::one() - eta;
    let ratio = u.abs() / &stats.sigma;
    &one_minus * &one_minus * &ratio * &ratio
        / (&stats.lambda_max * &stats.lambda_max * &stats.irregularity)
}

/// `γ_η = (2(1-η)²/ln 2) · (|H_min|/Σ)² / (Λ_max² D)`.
pub fn mcdiarmid_gamma(stats: &InstanceStats, h_min: &Rational, eta: &Rational) -> Result<f64> {
    require_negative(h_min)?;
    check_open_unit("eta", eta)?;
    Ok(2.0 * to_f64(&mcdiarmid_core(stats, h_min, eta)) / LN_2)
}

/// Tail exponent `c^tail_η(U)`: the McDiarmid exponent with `|U|` in place
/// of `|H_min|`.
pub fn tail_exponent(stats: &InstanceStats, u: &Rational, eta: &Rational) -> f64 {
    if stats.sigma.is_zero() {
        return 0.0;
    }
    2.0 * to_f64(&mcdiarmid_core(stats, u, eta)) / LN_2
}

/// Ball exponent `c^ball_η(U) = h(η|U|/(Λ_max Σ))/2`.
pub fn ball_exponent(stats: &InstanceStats, u: &Rational, eta: &Rational) -> f64 {
    if stats.sigma.is_zero() {
        return 0.0;
    }
    let theta = to_f64(&(eta * u.abs() / (&stats.lambda_max * &stats.sigma)));
    entropy_unchecked(theta.clamp(0.0, 0.5)) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    CorrelatedPair,
    LocalLipschitz,
}

/// Exponents for one `(instance or parameters, η)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub eta: String,
    pub regime: Regime,
    /// Threshold exponent: the given `γ` or the derived `γ_η`.
    pub gamma: f64,
    /// Successful-set exponent `h(q_η)` or `h(θ_η)/2`.
    pub kappa: f64,
    pub c_cl: f64,
    /// Quantum comparison exponent `c^q_A` or `c^q_B`.
    pub c_q: f64,
    /// `c_cl / c_q`.
    pub ratio: f64,
    /// Closed-form lower bound on `c_cl`: `γη/k`, or at `η = 1/2` the
    /// explicit `(1/(2 ln 2))·(|H_min|/W)²/(Λ_max² k² D)`.
    pub lower_bound: Option<f64>,
    pub q_eta: Option<f64>,
    pub q_eta_n: Option<f64>,
    pub r_ns: Option<u64>,
    pub theta_eta: Option<String>,
    pub theta_eta_f64: Option<f64>,
    pub r_lip: Option<u64>,
}

/// `c^q_A = γη/(2k(2 + ln 2))`.
pub fn quantum_exponent_a(gamma: f64, eta: f64, k: usize) -> f64 {
    quantum_a_constant() * gamma * eta / k as f64
}

/// `c^q_B = 0.0578 · Δ³/(2^{3k} k³ D)`.
pub fn quantum_exponent_b(delta: f64, k: usize, irregularity: f64) -> f64 {
    let kf = k as f64;
    QUANTUM_B_CONSTANT * delta.powi(3) / ((8f64).powi(k as i32) * kf.powi(3) * irregularity)
}

/// Inputs of the matching quantum exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantumInputs {
    A { gamma: f64, eta: f64, k: usize },
    B { delta: f64, k: usize, irregularity: f64 },
}

/// `(c_q, c_cl / c_q)` for the given classical exponent.
pub fn quantum_comparison(c_cl: f64, inputs: QuantumInputs) -> (f64, f64) {
    let c_q = match inputs {
        QuantumInputs::A { gamma, eta, k } => quantum_exponent_a(gamma, eta, k),
        QuantumInputs::B { delta, k, irregularity } => quantum_exponent_b(delta, k, irregularity),
    };
    (c_q, c_cl / c_q)
}

/// `c = min{γ, h(q_η)}` for a given threshold exponent `γ`. With `n`, the
/// report also carries `q_{η,n}` and `r_ns`.
pub fn classical_exponent_case1(gamma: f64, eta: &Rational, k: usize, n: Option<usize>) -> Result<ExponentReport> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain(format!("gamma = {gamma} must lie in (0, 1]")));
    }
    let rates = flip_rates(eta, k, n.unwrap_or(1))?;
    let kappa = entropy_unchecked(rates.q_eta);
    let c_cl = gamma.min(kappa);
    let eta_f = to_f64(eta);
    let (c_q, ratio) = quantum_comparison(c_cl, QuantumInputs::A { gamma, eta: eta_f, k });
    Ok(ExponentReport {
        eta: format_rational(eta),
        regime: Regime::CorrelatedPair,
        gamma,
        kappa,
        c_cl,
        c_q,
        ratio,
        lower_bound: Some(gamma * eta_f / k as f64),
        q_eta: Some(rates.q_eta),
        q_eta_n: n.map(|_| rates.q_eta_n),
        r_ns: n.map(|_| rates.r_ns),
        theta_eta: None,
        theta_eta_f64: None,
        r_lip: None,
    })
}

/// `c = min{γ_η, h(θ_η)/2}` from instance statistics and the optimum.
pub fn classical_exponent_case2(stats: &InstanceStats, h_min: &Rational, eta: &Rational) -> Result<ExponentReport> {
    let gamma = mcdiarmid_gamma(stats, h_min, eta)?;
    let (theta, r_lip) = lipschitz_params(stats, h_min, eta)?;
    let theta_f = to_f64(&theta);
    let kappa = entropy_unchecked(theta_f) / 2.0;
    let c_cl = gamma.min(kappa);
    let delta = to_f64(&(h_min.abs() / &stats.total_weight));
    let irregularity = to_f64(&stats.irregularity);
    let k = stats.k;
    let (c_q, ratio) = quantum_comparison(c_cl, QuantumInputs::B { delta, k, irregularity });
    let lower_bound = (*eta == Rational::new(1.into(), 2.into())).then(|| {
        explicit_case2_bound(&stats.lambda_max, k, irregularity, delta)
    });
    Ok(ExponentReport {
        eta: format_rational(eta),
        regime: Regime::LocalLipschitz,
        gamma,
        kappa,
        c_cl,
        c_q,
        ratio,
        lower_bound,
        q_eta: None,
        q_eta_n: None,
        r_ns: None,
        theta_eta: Some(format_rational(&theta)),
        theta_eta_f64: Some(theta_f),
        r_lip: Some(r_lip),
    })
}

/// `(1/(2 ln 2)) · Δ² / (Λ_max² k² D)` with `Δ = |H_min|/W`.
pub fn explicit_case2_bound(lambda_max: &Rational, k: usize, irregularity: f64, delta: f64) -> f64 {
    let lambda = to_f64(lambda_max);
    let kf = k as f64;
    delta * delta / (2.0 * LN_2 * lambda * lambda * kf * kf * irregularity)
}

/// The further relaxation with `Λ_max ≤ 2^k`:
/// `(1/(2 ln 2)) · Δ² / (2^{2k} k² D)`.
pub fn headline_case2_bound(k: usize, irregularity: f64, delta: f64) -> f64 {
    let kf = k as f64;
    delta * delta / (2.0 * LN_2 * 4f64.powi(k as i32) * kf * kf * irregularity)
}

/// Predicted exponent `min{c^ball(U), c^tail(U)}` of a bounded-search stage.
pub fn stage_exponent(stats: &InstanceStats, u: &Rational, eta: &Rational) -> f64 {
    ball_exponent(stats, u, eta).min(tail_exponent(stats, u, eta))
}

/// Convenience: `η = 1/2`, the default throughout.
pub fn default_eta() -> Rational {
    Rational::new(1.into(), 2.into())
}
