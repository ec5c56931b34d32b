use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoints reversed: lo={lo} > hi={hi}")]
    Reversed { lo: f64, hi: f64 },
    #[error("non-finite interval endpoint: [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },
}

/// Failure while evaluating a basis function or an interval-valued map.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("expected a point of dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{what} at x = {x:?}")]
    Domain { what: &'static str, x: Vec<f64> },
    #[error("non-finite value at x = {x:?}")]
    NonFinite { x: Vec<f64> },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DirectionError {
    #[error("oracle supports n <= 3, got n = {n}")]
    UnsupportedDimension { n: usize },
    #[error("direction data has inconsistent dimensions")]
    Dimension,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("evaluation failed at iterate {k}: {source}")]
    Evaluation { k: usize, source: EvalError },
    #[error("direction subproblem infeasible at iterate {k}")]
    Subproblem { k: usize },
    #[error("initial point has dimension {got}, problem has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("transformation matrix is singular or ill-conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("invalid solver parameters: {0}")]
    Params(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineSearchError {
    #[error("no step length down to {min_step:e} satisfies the sufficient decrease condition")]
    StepTooSmall { min_step: f64 },
    #[error("evaluation failed at the current point: {0}")]
    Evaluation(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("unknown problem `{name}`; valid names: {}", valid.join(", "))]
    Unknown { name: String, valid: Vec<String> },
    #[error("weight alpha = {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("weighted-sum closed form and numeric minimizer disagree by {0:e}")]
    WeightedSumMismatch(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot summarize an empty record set")]
    Empty,
    #[error("invalid campaign: {0}")]
    InvalidSpec(String),
    #[error("performance profiles need at least two solvers, got {0}")]
    TooFewSolvers(usize),
    #[error("no records for problem {problem} with solver {solver}")]
    MissingPair { problem: String, solver: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
