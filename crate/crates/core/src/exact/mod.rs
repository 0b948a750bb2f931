//! Exact solvers: exhaustive search and tree-decomposition dynamic programming.

pub mod dp;
pub mod naive;
pub mod treedec;

pub use dp::{decompose_free, solve_exact, solve_subproblem, td_solve, Subproblem};
pub use naive::solve_naive;
pub use treedec::{build_tree_decomposition, Effort, NiceTreeDecomposition};

use crate::instance::Assignment;
use crate::value::ExtRat;

pub const DEFAULT_NAIVE_BUDGET: u64 = 20_000_000;
pub const DEFAULT_DP_BUDGET: u64 = 50_000_000;

/// An optimum value and one assignment attaining it. When the instance is
/// infeasible the value is the mode's worst and the assignment is arbitrary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub value: ExtRat,
    pub assignment: Assignment,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        self.value.is_finite()
    }
}
