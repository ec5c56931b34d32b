//! Newton's method for multiobjective interval optimization.
//!
//! Objectives are interval-valued maps `G_i(x) = [G_i_lo(x), G_i_hi(x)]`.
//! At each iterate the solver builds a quadratic interval model from the
//! gH-gradient and gH-Hessian of every objective, minimizes the worst upper
//! model value to get a direction `v` and its value `ξ`, and backtracks until
//! both endpoints of every objective decrease enough. It stops once `ξ` is
//! within `ε` of zero, which certifies Pareto criticality.
//!
//! ```
//! use imo::{problems, solver::{solve, SolverParams, Termination}};
//!
//! let bk1 = problems::get_problem("I-BK1").unwrap();
//! let report = solve(&bk1, &[9.9862, -7.4332], &SolverParams::default()).unwrap();
//! assert_eq!(report.status, Termination::Critical);
//! assert!((report.final_x[0] - 3.914930).abs() < 5e-3);
//! ```

pub mod basis;
pub mod bench;
pub mod calculus;
pub mod direction;
pub mod error;
pub mod interval;
pub mod problems;
pub mod solver;

pub use calculus::{fd_validate, Ivm, Term};
pub use error::{
    BenchError, DirectionError, EvalError, IntervalError, LineSearchError, ProblemError, SolveError,
};
pub use interval::{DominanceRelation, Interval, IntervalMatrix, IntervalVector};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    pub mod intervals {}
    #[doc = include_str!("../../../book/src/objectives.md")]
    pub mod objectives {}
    #[doc = include_str!("../../../book/src/direction.md")]
    pub mod direction {}
    #[doc = include_str!("../../../book/src/solver.md")]
    pub mod solver {}
    #[doc = include_str!("../../../book/src/problems.md")]
    pub mod problems {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    pub mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/discrepancies.md")]
    pub mod discrepancies {}
}
