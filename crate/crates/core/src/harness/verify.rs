//! The invariant suite: every module's properties checked against the
//! oracle on seeded corpora.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::bench::{bench_sweep, BenchConfig, BenchFamily};
use super::report::{Report, RunConfig};
use crate::error::Result;
use crate::exponents::{
    binary_entropy, classical_exponent_case1, classical_exponent_case2, flip_rates, headline_case2_bound,
    mcdiarmid_gamma, verify_binomial_bounds,
};
use crate::formats::{
    gen_planted_lin2, gen_random_csp, gen_random_lin2, import_dimacs_cnf, parse_instance, random_assignment,
    write_instance, CspSpec, PredicateFamily, WeightMode,
};
use crate::model::{
    centered_mean_check, compute_stats, int, lin2_of_csp_parity, ratio, Assignment, CspInstance, Instance,
    Lin2Instance, Problem, Rational,
};
use crate::model::rational::to_f64;
use crate::oracle::{
    brute_force_minimum, exact_correlated_expectation, exact_landing_probability, lipschitz_audit, lower_tail_bound,
    successful_set_ns_count, threshold_set_count, value_histogram, OracleResult,
};
use crate::search::{
    enumerate_ball, in_typical_shell, rejection_sample_threshold, BallSpec, RngStream,
};
use crate::solvers::{
    bounded_sweep_solve, ranked_plan, ranked_sample, ranked_solve, search_bounded, solve_case1, solve_case2,
    sweep_schedule, SolverConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// `n ≤ 14`, small corpora; seconds.
    Small,
    /// `n ≤ 16`, the full corpora; minutes.
    Full,
}

impl std::str::FromStr for Scale {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Scale::Small),
            "full" => Ok(Scale::Full),
            _ => Err(crate::Error::domain(format!("unknown scale {s:?}; expected small or full"))),
        }
    }
}

struct Params {
    ns: Vec<usize>,
    instances: usize,
    runs: usize,
    binomial_n: u64,
    round_trips: usize,
}

impl Scale {
    fn params(self) -> Params {
        match self {
            Scale::Small => Params { ns: vec![8, 10, 12], instances: 6, runs: 50, binomial_n: 160, round_trips: 100 },
            Scale::Full => Params { ns: vec![12, 14, 16], instances: 30, runs: 1000, binomial_n: 2000, round_trips: 1000 },
        }
    }
}

/// Outcome of one property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Number of cases examined.
    pub cases: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub scale: Scale,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Ctx {
    p: Params,
    seed: u64,
}

impl Ctx {
    fn sub_seed(&self, salt: u64, i: usize) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (salt << 32) ^ i as u64
    }

    fn n_at(&self, i: usize, cap: usize) -> usize {
        self.p.ns[i % self.p.ns.len()].min(cap)
    }

    fn lin2(&self, salt: u64, i: usize, cap: usize) -> Lin2Instance {
        let n = self.n_at(i, cap);
        let coeffs = [int(-1), int(1), int(2), ratio(-1, 2)];
        gen_random_lin2(n, 2 + i % 2, 2 * n, &coeffs, self.sub_seed(salt, i)).expect("valid generator input")
    }

    fn csp(&self, salt: u64, i: usize, cap: usize) -> CspInstance {
        let n = self.n_at(i, cap);
        let families = [PredicateFamily::Sat, PredicateFamily::Parity, PredicateFamily::And, PredicateFamily::Random];
        let weights = [WeightMode::Unit, WeightMode::Integer { max: 3 }, WeightMode::Rational { max_num: 3, max_den: 4 }];
        let spec = CspSpec::exact(n, 3, 3 * n, families[i % 4]).with_weights(weights[(i / 4) % 3]);
        gen_random_csp(&spec, self.sub_seed(salt, i)).expect("valid generator input")
    }
}

fn check(module: &'static str, name: &'static str, cases: u64, failures: Vec<String>) -> Check {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{cases} cases")
    } else {
        format!("{} of {cases} failed; first: {}", failures.len(), failures[0])
    };
    Check { module, name, passed, cases, detail }
}

fn minimum(p: &(impl Problem + ?Sized)) -> OracleResult {
    brute_force_minimum(p, 1).expect("within the enumeration cap")
}

fn centered_constraints(ctx: &Ctx) -> Check {
    let mut cases = 0;
    let mut bad = Vec::new();
    for i in 0..ctx.p.instances {
        for c in ctx.csp(1, i, 16).constraints() {
            cases += 1;
            if !centered_mean_check(c).is_zero() {
                bad.push(format!("instance {i}: {c:?}"));
            }
        }
    }
    check("instance_model", "constraint contributions average to zero", cases, bad)
}

fn histogram_mean_and_min(p: &(impl Problem + ?Sized)) -> (Rational, Rational) {
    let h = value_histogram(p).expect("within the enumeration cap");
    let total: Rational = h.iter().map(|(v, c)| v * int(*c as i64)).sum();
    (total, h.keys().next().cloned().unwrap_or_else(Rational::zero))
}

fn csp_average(ctx: &Ctx) -> Check {
    let bad: Vec<String> = (0..ctx.p.instances)
        .into_par_iter()
        .filter_map(|i| {
            let inst = ctx.csp(2, i, 16);
            let (sum, min) = histogram_mean_and_min(&inst);
            (!sum.is_zero() || min < -inst.total_weight()).then(|| format!("instance {i}: sum {sum}, min {min}"))
        })
        .collect();
    check("instance_model", "CSP objective averages to zero and stays above -W", ctx.p.instances as u64, bad)
}

fn lin2_average(ctx: &Ctx) -> Check {
    let bad: Vec<String> = (0..ctx.p.instances)
        .into_par_iter()
        .filter_map(|i| {
            let (sum, _) = histogram_mean_and_min(&ctx.lin2(3, i, 16));
            (!sum.is_zero()).then(|| format!("instance {i}: sum {sum}"))
        })
        .collect();
    check("instance_model", "Lin2 objective averages to zero", ctx.p.instances as u64, bad)
}

fn stats_bounds(ctx: &Ctx) -> Check {
    let mut bad = Vec::new();
    let count = ctx.p.instances * 10;
    for i in 0..count {
        let inst = ctx.csp(4, i, 64);
        let s = compute_stats(&inst);
        let k = int(inst.k() as i64);
        if s.irregularity < Rational::one() || s.sigma > k * inst.total_weight() || 2 * s.light_set.len() < inst.n() {
            bad.push(format!("instance {i}: {:?}", s.summary()));
        }
    }
    check("instance_model", "D >= 1, Sigma <= kW, |L_light| >= n/2", count as u64, bad)
}

fn parity_conversion(ctx: &Ctx) -> Check {
    let mut bad = Vec::new();
    let mut cases = 0;
    for i in 0..ctx.p.instances {
        let n = ctx.n_at(i, 14);
        let spec = CspSpec::exact(n, 3, 2 * n, PredicateFamily::Parity).with_weights(WeightMode::Integer { max: 4 });
        let inst = gen_random_csp(&spec, ctx.sub_seed(5, i)).expect("valid generator input");
        let lin = lin2_of_csp_parity(&inst).expect("parity constraints");
        let (a, b) = (inst.compile().expect("fits"), lin.compile().expect("fits"));
        for mask in 0..1u64 << n {
            let x = Assignment::from_mask(n, mask).expect("mask fits");
            cases += 1;
            if a.to_rational(a.value(&x)) != b.to_rational(b.value(&x)) {
                bad.push(format!("instance {i}, x = {x}"));
                break;
            }
        }
    }
    check("instance_model", "parity CSP and its Lin2 form agree everywhere", cases, bad)
}

fn round_trip(ctx: &Ctx) -> Check {
    let mut bad = Vec::new();
    for i in 0..ctx.p.round_trips {
        let inst: Instance = if i % 2 == 0 { ctx.lin2(6, i, 40).into() } else { ctx.csp(6, i, 40).into() };
        match parse_instance(&write_instance(&inst)) {
            Ok(back) if back == inst => {}
            other => bad.push(format!("instance {i}: {other:?}")),
        }
    }
    check("formats_io", "write then parse is the identity", ctx.p.round_trips as u64, bad)
}

fn dimacs_identity(ctx: &Ctx) -> Check {
    let mut bad = Vec::new();
    for i in 0..ctx.p.instances {
        let n = ctx.n_at(i, 14);
        let m = 4 * n;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.sub_seed(7, i));
        let mut clauses: Vec<Vec<i64>> = Vec::new();
        while clauses.len() < m {
            let mut vars: Vec<i64> = Vec::new();
            while vars.len() < 3 {
                let v = rng.gen_range(1..=n as i64);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            clauses.push(vars.into_iter().map(|v| if rng.gen_bool(0.5) { v } else { -v }).collect());
        }
        let mut text = format!("p cnf {n} {m}\n");
        for c in &clauses {
            text.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        let inst = import_dimacs_cnf(&text, Some(3)).expect("well-formed CNF");
        // boolean true is the sign -1, i.e. a set bit
        let m_star = (0..1u64 << n)
            .map(|mask| {
                clauses
                    .iter()
                    .filter(|c| c.iter().any(|&l| ((mask >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0)))
                    .count()
            })
            .max()
            .unwrap_or(0);
        let h = minimum(&inst).h_min;
        let expected = int(7 * m as i64 - 8 * m_star as i64);
        if h != expected {
            bad.push(format!("instance {i}: H_min {h}, 7m - 8m* = {expected}"));
        }
    }
    check("formats_io", "imported E3-CNF has H_min = 7m - 8m*", ctx.p.instances as u64, bad)
}

fn flip_probabilities() -> [Rational; 4] {
    [int(0), ratio(1, 8), ratio(1, 4), ratio(1, 2)]
}

fn correlated_identity(ctx: &Ctx) -> Check {
    let bad: Vec<String> = (0..ctx.p.instances)
        .into_par_iter()
        .flat_map_iter(|i| {
            let inst = ctx.lin2(8, i, 14);
            let x = minimum(&inst).minimizers[0].clone();
            flip_probabilities().into_iter().filter_map(move |q| {
                let e = exact_correlated_expectation(&inst, &x, &q).expect("valid q");
                (e.enumerated.as_ref() != Some(&e.closed_form)).then(|| format!("instance {i}, q = {q}: {e:?}"))
            })
        })
        .collect();
    check("oracle", "E[H(X)] closed form equals flip-pattern enumeration", 4 * ctx.p.instances as u64, bad)
}

fn landing_bound(ctx: &Ctx) -> Check {
    let etas = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    let bad: Vec<String> = (0..ctx.p.instances)
        .into_par_iter()
        .flat_map_iter(|i| {
            let inst = ctx.lin2(9, i, 14);
            let x = minimum(&inst).minimizers[0].clone();
            let etas = etas.clone();
            flip_probabilities().into_iter().flat_map(move |q| {
                let inst = inst.clone();
                let x = x.clone();
                etas.clone().into_iter().filter_map(move |eta| {
                    let p = exact_landing_probability(&inst, &x, &q, &eta).expect("valid input");
                    let b = lower_tail_bound(&q, inst.k(), &eta);
                    (p < b).then(|| format!("instance {i}, q = {q}, eta = {eta}: {p} < {b}"))
                })
            })
        })
        .collect();
    check("oracle", "landing probability meets the lower-tail bound", 12 * ctx.p.instances as u64, bad)
}

fn mcdiarmid(ctx: &Ctx, module: &'static str) -> Check {
    let etas = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    let bad: Vec<String> = (0..ctx.p.instances)
        .into_par_iter()
        .flat_map_iter(|i| {
            let inst = ctx.csp(10, i, 16);
            let h = minimum(&inst).h_min;
            let stats = compute_stats(&inst);
            let etas = etas.clone();
            etas.into_iter().filter_map(move |eta| {
                if !h.is_negative() {
                    return None;
                }
                let t = threshold_set_count(&inst, &h, &eta).expect("nondegenerate");
                let g = mcdiarmid_gamma(&stats, &h, &eta).expect("nondegenerate");
                let rhs = (1.0 - g) * inst.n() as f64;
                ((t as f64).log2() > rhs + 1e-9).then(|| format!("instance {i}, eta = {eta}: log2|T| = {} > {rhs}", (t as f64).log2()))
            })
        })
        .collect();
    check(module, "|T_eta| <= 2^((1 - gamma_eta) n)", 3 * ctx.p.instances as u64, bad)
}

fn oracle_equivalence(ctx: &Ctx) -> Check {
    let eta = ratio(1, 2);
    let delta = ratio(1, 10);
    let cfg = SolverConfig::default();
    let bad: Vec<String> = (0..ctx.p.instances)
        .into_par_iter()
        .flat_map_iter(|i| {
            let lin = ctx.lin2(11, i, 14);
            let csp = ctx.csp(11, i, 14);
            let lo = minimum(&lin);
            let co = minimum(&csp);
            let rng = RngStream::new(ctx.sub_seed(11, i), 0);
            let mut out = Vec::new();
            let mut audit = |name: &str, value: &Rational, best: &Assignment, certified: bool, h: &Rational, p: &dyn Problem| {
                if p.evaluate(best).ok().as_ref() != Some(value) || (certified && value != h) || value < h {
                    out.push(format!("{name} on instance {i}: value {value}, oracle {h}"));
                }
            };
            let o = solve_case1(&lin, &lo.h_min, &eta, rng, &cfg).expect("valid input");
            audit("case1", &o.value, &o.best, o.certified_optimal, &lo.h_min, &lin);
            if co.h_min.is_negative() {
                let o = solve_case2(&csp, &co.h_min, &eta, rng, &cfg).expect("valid input");
                audit("case2", &o.value, &o.best, o.certified_optimal, &co.h_min, &csp);
                let (o, _) = bounded_sweep_solve(&csp, &eta, &delta, rng, &cfg).expect("valid input");
                audit("sweep", &o.value, &o.best, o.certified_optimal, &co.h_min, &csp);
            }
            let (o, _) = ranked_solve(&lin, &eta, 0.05, &delta, rng, &cfg).expect("within budget");
            audit("ranked", &o.value, &o.best, o.certified_optimal, &lo.h_min, &lin);
            out
        })
        .collect();
    check("solvers", "certified outcomes equal the oracle optimum", 4 * ctx.p.instances as u64, bad)
}

fn entropy_properties() -> Check {
    let mut bad = Vec::new();
    let steps = 10_000;
    let mut prev = 0.0;
    for i in 0..=steps {
        let t = 0.5 * i as f64 / steps as f64;
        let h = binary_entropy(t).expect("in range");
        let mirror = binary_entropy(1.0 - t).expect("in range");
        if (h - mirror).abs() > 1e-12 || h < 2.0 * t - 1e-12 || h < prev - 1e-12 {
            bad.push(format!("t = {t}: h = {h}, h(1-t) = {mirror}"));
        }
        prev = h;
    }
    check("exponents", "binary entropy is symmetric, >= 2t and increasing on [0, 1/2]", steps as u64 + 1, bad)
}

fn flip_rate_bound() -> Check {
    let mut bad = Vec::new();
    let mut cases = 0;
    for k in 1..=8usize {
        for i in 1..20 {
            let eta = ratio(i, 20);
            let q = flip_rates(&eta, k, 100).expect("valid input").q_eta;
            cases += 1;
            if q < to_f64(&eta) / (2.0 * k as f64) - 1e-15 {
                bad.push(format!("k = {k}, eta = {eta}: q = {q}"));
            }
        }
    }
    check("exponents", "q_eta >= eta/(2k)", cases, bad)
}

fn binomial_grid(ctx: &Ctx) -> Check {
    let bad: Vec<String> = (1..=ctx.p.binomial_n)
        .into_par_iter()
        .flat_map_iter(|n| {
            (0..=32).filter_map(move |i| {
                let c = verify_binomial_bounds(n, &ratio(i, 64)).expect("within cap");
                (!c.passed()).then(|| format!("N = {n}, t = {i}/64: {c:?}"))
            })
        })
        .collect();
    check("exponents", "layer and rounded binomial bounds", ctx.p.binomial_n * 33, bad)
}

fn quantum_ratio(ctx: &Ctx) -> Check {
    let mut bad = Vec::new();
    let mut cases = 0;
    for k in 2..=6usize {
        for gi in 1..=10 {
            for ei in 1..10 {
                let gamma = gi as f64 / 10.0;
                let r = classical_exponent_case1(gamma, &ratio(ei, 10), k, None).expect("valid input");
                cases += 1;
                if r.ratio <= 1.0 {
                    bad.push(format!("case 1, k = {k}, gamma = {gamma}, eta = {ei}/10: {}", r.ratio));
                }
            }
        }
    }
    for i in 0..ctx.p.instances {
        let inst = ctx.csp(12, i, 14);
        let h = minimum(&inst).h_min;
        if !h.is_negative() {
            continue;
        }
        let r = classical_exponent_case2(&compute_stats(&inst), &h, &ratio(1, 2)).expect("nondegenerate");
        cases += 1;
        if r.ratio <= 1.0 {
            bad.push(format!("case 2, instance {i}: {}", r.ratio));
        }
    }
    check("exponents", "classical exponent exceeds the quantum one", cases, bad)
}

fn case2_closed_form(ctx: &Ctx) -> Check {
    let count = ctx.p.instances * 4;
    let bad: Vec<String> = (0..count)
        .into_par_iter()
        .filter_map(|i| {
            let n = ctx.n_at(i, 12);
            let spec = CspSpec::exact(n, 2 + i % 2, 3 * n, [PredicateFamily::Sat, PredicateFamily::Random][i % 2]);
            let inst = gen_random_csp(&spec, ctx.sub_seed(13, i)).expect("valid generator input");
            let h = minimum(&inst).h_min;
            let stats = compute_stats(&inst);
            let r = classical_exponent_case2(&stats, &h, &ratio(1, 2)).ok()?;
            let delta = to_f64(&(h.abs() / inst.total_weight()));
            let bound = headline_case2_bound(inst.k(), to_f64(&stats.irregularity), delta);
            let explicit = r.lower_bound.expect("eta = 1/2");
            (r.c_cl < explicit - 1e-9 || explicit < bound - 1e-9)
                .then(|| format!("instance {i}: c = {}, explicit {explicit}, headline {bound}", r.c_cl))
        })
        .collect();
    check("exponents", "case-2 exponent at eta = 1/2 meets the closed forms", count as u64, bad)
}

fn lipschitz_step(ctx: &Ctx) -> Check {
    let etas = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    let mut bad = Vec::new();
    let mut cases = 0;
    for i in 0..ctx.p.instances {
        let inst = ctx.csp(14, i, 14);
        let o = minimum(&inst);
        if !o.h_min.is_negative() {
            continue;
        }
        for eta in &etas {
            let a = lipschitz_audit(&inst, &o.minimizers[0], eta).expect("nondegenerate");
            cases += a.points;
            if a.outside_threshold + a.above_step_bound > 0 {
                bad.push(format!("instance {i}, eta = {eta}: {a:?}"));
            }
        }
    }
    check("sampling_search", "light balls stay within the step bound and inside T_eta", cases, bad)
}

fn sampler_uniformity(ctx: &Ctx) -> Check {
    let mut bad = Vec::new();
    let mut cases = 0;
    for i in 0..2 {
        let inst = gen_random_lin2(8, 2, 12, &[int(-1), int(1)], ctx.sub_seed(15, i)).expect("valid generator input");
        let h = minimum(&inst).h_min;
        let eta = ratio(1, 2);
        let obj = inst.compile().expect("fits");
        let thr = obj.threshold(&h, &eta);
        let members: Vec<u64> = (0..1u64 << 8)
            .filter(|&m| obj.value(&Assignment::from_mask(8, m).expect("mask fits")) <= thr)
            .collect();
        let draws = 200 * members.len();
        let mut rng = RngStream::new(ctx.sub_seed(15, i), 0).rng();
        let mut counts: BTreeMap<u64, u64> = members.iter().map(|&m| (m, 0)).collect();
        for _ in 0..draws {
            let (x, _) = rejection_sample_threshold(&inst, &h, &eta, &mut rng, 1 << 20).expect("T is nonempty");
            *counts.entry(x.to_mask().expect("small n")).or_insert(0) += 1;
        }
        cases += draws as u64;
        if counts.len() != members.len() {
            bad.push(format!("instance {i}: sampled outside T_eta"));
            continue;
        }
        if members.len() < 2 {
            continue;
        }
        let e = 200.0;
        let chi: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        let df = (members.len() - 1) as f64;
        let p = 1.0 - ChiSquared::new(df).expect("df > 0").cdf(chi);
        if p <= 0.001 {
            bad.push(format!("instance {i}: chi-square {chi} on {df} df, p = {p}"));
        }
    }
    check("sampling_search", "threshold sampler is uniform (chi-square p > 0.001)", cases, bad)
}

fn ball_counts(ctx: &Ctx) -> Check {
    let mut bad = Vec::new();
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.sub_seed(16, 0));
    let max_n = if ctx.p.round_trips > 100 { 16 } else { 12 };
    for n in 1..=max_n {
        for r in 0..=n.min(6) {
            let center = random_assignment(n, rng.gen());
            let allowed: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
            for spec in [BallSpec::full(center.clone(), r), BallSpec::restricted(center, r, allowed).expect("valid coords")] {
                cases += 1;
                let points = enumerate_ball(&spec);
                let mut distinct = points.clone();
                distinct.sort();
                distinct.dedup();
                if points.len() as u128 != spec.size_u128() || distinct.len() != points.len() {
                    bad.push(format!("n = {n}, r = {r}: {} points, expected {}", points.len(), spec.size_u128()));
                }
            }
        }
    }
    check("sampling_search", "ball enumeration matches the binomial sum", cases, bad)
}

fn ns_containment(ctx: &Ctx) -> Check {
    let eta = ratio(1, 2);
    let mut bad = Vec::new();
    let mut cases = 0;
    for i in 0..ctx.p.instances {
        let inst = ctx.lin2(17, i, 14);
        let n = inst.n();
        let all = brute_force_minimum(&inst, 1 << n).expect("within the enumeration cap");
        let r_ns = flip_rates(&eta, inst.k(), n).expect("valid input").r_ns as usize;
        let mut rng = RngStream::new(ctx.sub_seed(17, i), 0).rng();
        for _ in 0..50 {
            let (x, _) = rejection_sample_threshold(&inst, &all.h_min, &eta, &mut rng, 1 << 24).expect("T is nonempty");
            for star in &all.minimizers {
                if in_typical_shell(&x, star, &eta, inst.k(), n).expect("same length") {
                    cases += 1;
                    let d = x.hamming_distance(star).expect("same length");
                    if d > r_ns {
                        bad.push(format!("instance {i}: d = {d} > r_ns = {r_ns}"));
                    }
                }
            }
        }
    }
    check("sampling_search", "typical-shell samples lie within r_ns of an optimum", cases, bad)
}

fn one_sidedness(ctx: &Ctx) -> Check {
    let eta = ratio(1, 2);
    let delta = ratio(1, 10);
    let cfg = SolverConfig::default();
    let mut bad = Vec::new();
    let mut cases = 0;
    for i in 0..ctx.p.instances {
        let n = ctx.n_at(i, 12);
        let spec = CspSpec::exact(n, 3, 4 * n, PredicateFamily::Parity);
        let inst = gen_random_csp(&spec, ctx.sub_seed(18, i)).expect("valid generator input");
        let h = minimum(&inst).h_min;
        let w = inst.total_weight();
        if h <= -w.clone() {
            continue;
        }
        for j in 1..=4 {
            let u = -w.clone() + (h.clone() + w.clone()) * ratio(j, 5);
            for s in 0..5 {
                cases += 1;
                let run = search_bounded(&inst, &u, &eta, &delta, RngStream::new(ctx.sub_seed(18, i), s), &cfg)
                    .expect("valid bound");
                if !run.result.is_null() {
                    bad.push(format!("instance {i}, U = {u}: {:?}", run.result));
                }
            }
        }
    }
    check("solvers", "bounded search below the optimum returns NULL", cases, bad)
}

fn sweep_monotone(ctx: &Ctx) -> Check {
    let mut bad = Vec::new();
    let mut cases = 0;
    for i in 0..ctx.p.instances {
        let inst = ctx.csp(19, i, 64);
        let stats = compute_stats(&inst);
        for eta in [ratio(1, 4), ratio(1, 2), ratio(3, 4)] {
            let s = sweep_schedule(&stats, &eta, &ratio(1, 10), &SolverConfig::default()).expect("valid input");
            cases += 1;
            if s.windows(2).any(|w| w[0].stage_budget > w[1].stage_budget || w[0].plan.worst_case > w[0].stage_budget) {
                bad.push(format!("instance {i}, eta = {eta}"));
            }
        }
    }
    check("solvers", "sweep stage budgets are nonincreasing in r", cases, bad)
}

fn case1_iterations(ctx: &Ctx) -> Check {
    let eta = ratio(1, 2);
    let mut bad = Vec::new();
    let mut cases = 0;
    for i in 0..3.min(ctx.p.instances) {
        let n = ctx.n_at(i, 16);
        let planted = random_assignment(n, ctx.sub_seed(20, i));
        let inst = gen_planted_lin2(n, 3, 2 * n, &[int(1)], &planted, ctx.sub_seed(20, i)).expect("valid generator input");
        let h = inst.evaluate(&planted).expect("same length");
        let t = threshold_set_count(&inst, &h, &eta).expect("nondegenerate");
        let s = successful_set_ns_count(&inst, &planted, &h, &eta).expect("nondegenerate");
        if s == 0 {
            continue;
        }
        let total: u64 = (0..ctx.p.runs as u64)
            .into_par_iter()
            .map(|r| {
                solve_case1(&inst, &h, &eta, RngStream::new(ctx.sub_seed(20, i), r << 32), &SolverConfig::default())
                    .expect("valid input")
                    .iterations
            })
            .sum();
        cases += ctx.p.runs as u64;
        let mean = total as f64 / ctx.p.runs as f64;
        let bound = 4.0 * t as f64 / s as f64;
        if mean > bound {
            bad.push(format!("instance {i}: mean {mean} > 4|T|/|S| = {bound}"));
        }
    }
    check("solvers", "case-1 mean iterations <= 4|T|/|S_ns|", cases, bad)
}

fn ranked_retention(ctx: &Ctx) -> Check {
    let eta = ratio(1, 2);
    let delta = ratio(1, 10);
    let cfg = SolverConfig::default().with_radius(2);
    let mut bad = Vec::new();
    let mut events = 0;
    for i in 0..ctx.p.instances {
        let inst = ctx.lin2(21, i, 12);
        let n = inst.n();
        let all = brute_force_minimum(&inst, 1 << n).expect("within the enumeration cap");
        let obj = inst.compile().expect("fits");
        let thr = obj.threshold(&all.h_min, &eta);
        let t = threshold_set_count(&inst, &all.h_min, &eta).expect("nondegenerate");
        let gamma = (1.0 - (t as f64).log2() / n as f64).clamp(0.0, 1.0);
        let plan = ranked_plan(n, inst.k(), &eta, gamma, &delta, &cfg).expect("valid input");
        for s in 0..10 {
            let rng = RngStream::new(ctx.sub_seed(21, i), s << 32);
            let sample = ranked_sample(&obj, plan.n_samples, rng);
            let in_t = sample.iter().filter(|(v, _)| *v <= thr).count() as u64;
            let hits_s = sample.iter().any(|(v, x)| {
                *v <= thr && all.minimizers.iter().any(|m| x.hamming_distance(m).expect("same length") <= plan.radius)
            });
            if hits_s && in_t <= plan.k_retained {
                events += 1;
                let (o, _) = ranked_solve(&inst, &eta, gamma, &delta, rng, &cfg).expect("within budget");
                if o.value != all.h_min {
                    bad.push(format!("instance {i}, run {s}: {} vs {}", o.value, all.h_min));
                }
            }
        }
    }
    check("solvers", "ranked solve succeeds whenever the retention event holds", events, bad)
}

fn report_determinism(ctx: &Ctx) -> Check {
    let cfg = BenchConfig {
        family: BenchFamily::PlantedLin2 { k: 3, density: 2 },
        n_values: vec![8],
        eta_values: vec!["1/2".into()],
        seeds: vec![ctx.seed],
        runs: 3,
        solver: SolverConfig::default(),
    };
    let mut run = RunConfig::new("bench");
    run.seed = ctx.seed;
    let render = || {
        let body = bench_sweep(&cfg).expect("valid config");
        Report::new(run.clone(), body).to_json()
    };
    let (a, b) = (render(), render());
    let bad = if a == b { Vec::new() } else { vec!["reports differ".to_string()] };
    check("harness_cli", "equal configs give byte-identical reports", 2, bad)
}

/// Runs every check at the given scale.
pub fn run_verify(scale: Scale, seed: u64) -> Result<VerifyReport> {
    let ctx = Ctx { p: scale.params(), seed };
    let checks = vec![
        centered_constraints(&ctx),
        csp_average(&ctx),
        lin2_average(&ctx),
        stats_bounds(&ctx),
        parity_conversion(&ctx),
        round_trip(&ctx),
        dimacs_identity(&ctx),
        correlated_identity(&ctx),
        landing_bound(&ctx),
        mcdiarmid(&ctx, "oracle"),
        oracle_equivalence(&ctx),
        entropy_properties(),
        flip_rate_bound(),
        binomial_grid(&ctx),
        quantum_ratio(&ctx),
        case2_closed_form(&ctx),
        lipschitz_step(&ctx),
        sampler_uniformity(&ctx),
        ball_counts(&ctx),
        ns_containment(&ctx),
        one_sidedness(&ctx),
        sweep_monotone(&ctx),
        case1_iterations(&ctx),
        ranked_retention(&ctx),
        report_determinism(&ctx),
    ];
    Ok(VerifyReport { scale, seed, checks })
}
