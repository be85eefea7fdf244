//! Exact arithmetic substrate: rationals, dense rational linear algebra and an
//! exact simplex solver.

pub mod matrix;
pub mod rational;
pub mod simplex;

pub use matrix::{rank, solve_square_system, RationalMatrix};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
pub use simplex::{lp_solve, LpResult, LpStatus};
