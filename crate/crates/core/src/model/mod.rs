//! Problem representations, exact evaluation, and derived statistics.

pub mod assignment;
pub mod csp;
pub mod kernel;
pub mod lin2;
pub mod rational;
pub mod stats;

pub use assignment::{Assignment, MASK_CAP};
pub use csp::{
    centered_mean_check, evaluate_csp, lin2_of_csp_parity, Constraint, CspInstance, TruthTable,
    MAX_ARITY,
};
pub use kernel::{Objective, Walker};
pub use lin2::{evaluate_lin2, Lin2Instance, Term};
pub use rational::{format_rational, int, parse_rational, ratio, Rational};
pub use stats::{compute_stats, InstanceStats, StatsSummary};

use crate::error::Result;

/// Common surface of both problem kinds, used by the oracle and solvers.
pub trait Problem: Sync {
    fn n(&self) -> usize;
    fn k(&self) -> usize;
    fn evaluate(&self, x: &Assignment) -> Result<Rational>;
    fn compile(&self) -> Result<Objective>;
    /// Structurally `H ≡ 0`.
    fn is_trivial(&self) -> bool;
}

impl Problem for Lin2Instance {
    fn n(&self) -> usize {
        Lin2Instance::n(self)
    }
    fn k(&self) -> usize {
        Lin2Instance::k(self)
    }
    fn evaluate(&self, x: &Assignment) -> Result<Rational> {
        Lin2Instance::evaluate(self, x)
    }
    fn compile(&self) -> Result<Objective> {
        Objective::from_lin2(self)
    }
    fn is_trivial(&self) -> bool {
        Lin2Instance::is_trivial(self)
    }
}

impl Problem for CspInstance {
    fn n(&self) -> usize {
        CspInstance::n(self)
    }
    fn k(&self) -> usize {
        CspInstance::k(self)
    }
    fn evaluate(&self, x: &Assignment) -> Result<Rational> {
        CspInstance::evaluate(self, x)
    }
    fn compile(&self) -> Result<Objective> {
        Objective::from_csp(self)
    }
    fn is_trivial(&self) -> bool {
        self.constraints().is_empty()
    }
}

/// Either problem kind, as produced by the parsers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Lin2(Lin2Instance),
    Csp(CspInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Lin2(_) => "lin2",
            Instance::Csp(_) => "csp",
        }
    }

    pub fn as_problem(&self) -> &dyn Problem {
        match self {
            Instance::Lin2(i) => i,
            Instance::Csp(i) => i,
        }
    }

    /// Number of terms or constraints.
    pub fn len(&self) -> usize {
        match self {
            Instance::Lin2(i) => i.terms().len(),
            Instance::Csp(i) => i.constraints().len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl From<Lin2Instance> for Instance {
    fn from(i: Lin2Instance) -> Self {
        Instance::Lin2(i)
    }
}

impl From<CspInstance> for Instance {
    fn from(i: CspInstance) -> Self {
        Instance::Csp(i)
    }
}
