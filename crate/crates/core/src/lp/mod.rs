//! Linear programs for the randomized query complexity of Sink-or-Clash.
//!
//! The player's mixed strategy is a realization plan: one variable `x_S` per
//! sequence `S` (a history of answers plus the next vertex to query), with
//! flow conservation between a history and its extensions. Each adversary
//! outmap contributes one row bounding the expected number of queries by `v`.

mod format;
mod model;
mod simplex;

pub use format::{check_solution, parse_lp, parse_solution, write_lp, SolutionReport};
pub use model::{generate_lp, payoff, History, LpMode, Sequence, LP_DIM_LIMIT};
pub use simplex::{check_feasible, solve_exact, LpSolution, SimplexConfig};

/// A linear constraint row `sum coef * x_var (<= | =) rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    /// `(variable index, coefficient)` in increasing variable order.
    pub terms: Vec<(u32, i32)>,
    pub rhs: i64,
}

/// `minimize v` subject to `inequalities` (`<=`), `equalities` (`=`) and all
/// variables nonnegative. Coefficients are integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub variables: Vec<String>,
    /// Index of the objective variable `v`.
    pub objective: usize,
    pub inequalities: Vec<Row>,
    pub equalities: Vec<Row>,
}

impl LinearProgram {
    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.inequalities
            .iter()
            .chain(&self.equalities)
            .map(|r| r.terms.len())
            .sum()
    }
}
