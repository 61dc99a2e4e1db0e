//! Exact optimization of MAX-Ek-LIN2 and weighted MAX-k-CSP instances by
//! conditioning on near-optimal threshold sets and exhaustively searching
//! Hamming balls around the sampled points.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the two problem representations, exact evaluation, and
//!   an integer-scaled kernel with single-flip updates.
//! * [`formats`] reads and writes instances and generates random or planted
//!   ones.
//! * [`oracle`] computes ground truth by full enumeration.
//! * [`exponents`] evaluates the closed-form exponents, radii, and flip rates.
//! * [`search`] provides the samplers and ball enumeration.
//! * [`solvers`] combines them into the end-to-end algorithms.
//! * [`harness`] runs the invariant suite and benchmark sweeps.

pub mod error;
pub mod exponents;
pub mod formats;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod search;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{Assignment, CspInstance, Instance, Lin2Instance, Problem, Rational};
