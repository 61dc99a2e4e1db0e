//! Benchmarks, the invariant suite and the report envelope shared by the
//! command-line front end.

pub mod bench;
pub mod report;
pub mod verify;

pub use bench::{bench_csv, bench_sweep, regression_slope, BenchConfig, BenchFamily, BenchReport, BenchRow, BENCH_COLUMNS};
pub use report::{Report, ReportFormat, RunConfig, REPORT_SCHEMA};
pub use verify::{run_verify, Check, Scale, VerifyReport};
