use spx_core::harness::{bench_csv, bench_sweep, BenchConfig, BenchFamily, BENCH_COLUMNS};
use spx_core::solvers::SolverConfig;

fn planted_e3(n_values: Vec<usize>, runs: usize) -> BenchConfig {
    BenchConfig {
        family: BenchFamily::PlantedLin2 { k: 3, density: 2 },
        n_values,
        eta_values: vec!["1/2".into()],
        seeds: vec![1, 2, 3],
        runs,
        solver: SolverConfig::default(),
    }
}

#[test]
fn raw_draws_track_the_predicted_exponent() {
    let report = bench_sweep(&planted_e3(vec![10, 12, 14, 16], 50)).unwrap();
    assert_eq!(report.rows.len(), 12);
    for row in &report.rows {
        let measured = row.mean_raw_draws.log2() / row.n as f64;
        let predicted = row.predicted_exponent.unwrap();
        assert!((measured - predicted).abs() <= 0.15, "n = {}: {measured} vs {predicted}", row.n);
        assert_eq!(row.failures, 0);
    }
    let slope = report.slope.unwrap();
    assert!(slope > 0.0 && slope < 1.0, "{slope}");
}

#[test]
fn single_n_run_replays_bit_identically() {
    let a = bench_csv(&bench_sweep(&planted_e3(vec![12], 10)).unwrap());
    let b = bench_csv(&bench_sweep(&planted_e3(vec![12], 10)).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.lines().next().unwrap(), BENCH_COLUMNS.join(","));
}

#[test]
fn csp_family_rows() {
    let cfg = BenchConfig {
        family: BenchFamily::PlantedCsp { k: 2, density: 2, predicates: spx_core::formats::PredicateFamily::And },
        ..planted_e3(vec![10, 12], 5)
    };
    let report = bench_sweep(&cfg).unwrap();
    for row in &report.rows {
        assert_eq!(row.failures, 0);
        assert!(row.s_count >= 1);
        assert!(row.predicted_exponent.is_some());
    }
}
