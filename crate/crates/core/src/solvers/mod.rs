//! End-to-end solvers.
//!
//! * [`solve_case1`] and [`solve_case2`] take the optimum value as input and
//!   repeat sample-then-search until they reach it.
//! * [`ranked_solve`] and [`bounded_sweep_solve`] do without it.
//!
//! Every solver is driven by an [`RngStream`](crate::search::RngStream);
//! work is split over derived streams so results replay exactly and do not
//! depend on the number of threads.

mod bounded;
mod engine;
mod known;
mod ranked;

pub use bounded::{
    bounded_plan, bounded_sweep_solve, search_bounded, sweep_scale, sweep_schedule, Bounded, BoundedPlan, BoundedRun,
    NullReason, ScheduledStage, StageOutcome, SweepStage, SweepTrace,
};
pub use engine::{SolveOutcome, SolveStatus, SolverConfig};
pub use known::{solve_case1, solve_case2};
pub use ranked::{ranked_plan, ranked_sample, ranked_solve, RankedPlan};
