//! Exact side of the problem: the MILP model as LP text, subtour separation
//! for integral candidates, and an exhaustive oracle for tiny instances.

mod brute;
mod milp;
mod subtour;

pub use brute::{search_size, solve_bruteforce, BruteLimits};
pub use milp::{export_milp, rows_to_lp, Assignment, MilpModel, Row, Sense, Var};
pub use subtour::{find_subtours, IntegralSolution};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("search space has {bound} leaf evaluations, above the limit {limit}")]
    SizeLimit { bound: u128, limit: u128 },
    #[error("malformed solution: {0}")]
    Malformed(String),
    #[error("no coverage-feasible assignment exists")]
    Infeasible,
}
