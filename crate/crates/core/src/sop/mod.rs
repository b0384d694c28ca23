//! Set orienteering solvers.
//!
//! [`solve_exact`] is a dynamic program over (visited-cluster subset, last
//! node) and serves as the oracle for small instances; [`solve_vns`] is a
//! variable neighbourhood search for everything larger. [`validate`] checks
//! any path against the instance.

mod exact;
pub mod random;
mod solution;
mod vns;

use thiserror::Error;

use crate::navgraph::InstanceError;

pub use exact::{solve_exact, solve_exact_with, SubsetTable, DEFAULT_EXACT_LIMIT};
pub use solution::{validate, SopSolution, ValidationReport, Violation, TOLERANCE};
pub use vns::{greedy, solve_vns, DEFAULT_VNS_ITERS};

pub(crate) use solution::tol;

#[derive(Debug, Error, PartialEq)]
pub enum SopError {
    #[error("{clusters} selectable clusters exceed the exact limit of {limit}; use the VNS solver")]
    TooLarge { clusters: usize, limit: usize },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
    #[error("no path from the start reaches the required end within the budget")]
    Infeasible,
}
