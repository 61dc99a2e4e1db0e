//! Instance serialization, DIMACS import, JSON export, and generators.

pub mod dimacs;
pub mod generate;
pub mod json;
pub mod spx;

pub use dimacs::import_dimacs_cnf;
pub use generate::{
    gen_planted_csp, gen_planted_lin2, gen_random_csp, gen_random_lin2, random_assignment, CspSpec,
    PredicateFamily, WeightMode,
};
pub use json::{instance_to_json, instance_with_stats_json};
pub use spx::{parse_instance, write_instance};
