//! The outer Newton iteration with Armijo-type backtracking on both interval
//! endpoints, plus criticality and dominance utilities.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::direction::{
    newton_direction, steepest_direction, DirectionResult, DirectionStatus, PointData, DEFAULT_TOL,
};
use crate::error::{EvalError, LineSearchError, SolveError};
use crate::interval::{compare_vectors, DominanceRelation, Interval};
use crate::problems::ProblemDef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DirectionKind {
    Newton,
    SteepestDescent,
}

impl DirectionKind {
    pub fn label(self) -> &'static str {
        match self {
            DirectionKind::Newton => "newton",
            DirectionKind::SteepestDescent => "steepest",
        }
    }

    pub fn solve(self, p: &PointData) -> DirectionResult {
        match self {
            DirectionKind::Newton => newton_direction(p, DEFAULT_TOL),
            DirectionKind::SteepestDescent => steepest_direction(p, DEFAULT_TOL),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Step reduction factor.
    pub eta: f64,
    /// Sufficient-decrease parameter.
    pub sigma: f64,
    /// Stop once `ξ > −eps`.
    pub eps: f64,
    /// Maximum number of accepted steps.
    pub max_iters: usize,
    /// Smallest step length tried before giving up.
    pub min_step: f64,
    pub direction_kind: DirectionKind,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams::new(0.5, 1e-3, 1e-6, 500)
    }
}

impl SolverParams {
    /// Sets `min_step = eta⁴⁰` and uses Newton directions.
    pub fn new(eta: f64, sigma: f64, eps: f64, max_iters: usize) -> Self {
        SolverParams {
            eta,
            sigma,
            eps,
            max_iters,
            min_step: eta.powi(40),
            direction_kind: DirectionKind::Newton,
        }
    }

    pub fn with_direction(mut self, kind: DirectionKind) -> Self {
        self.direction_kind = kind;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::Params(msg));
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta = {} must lie in (0, 1)", self.eta));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad(format!("sigma = {} must lie in (0, 1)", self.sigma));
        }
        if self.eps <= 0.0 || self.eps.is_nan() {
            return bad(format!("eps = {} must be positive", self.eps));
        }
        if !(self.min_step > 0.0 && self.min_step <= 1.0) {
            return bad(format!("min_step = {} must lie in (0, 1]", self.min_step));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    Critical,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterateRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub g_values: Vec<Interval>,
    pub xi: f64,
    pub v: Vec<f64>,
    /// Accepted step length; `None` on the final record.
    pub t: Option<f64>,
    pub backtracks: u32,
    pub left_box: bool,
    /// `G_i(x^k) ⪯ G_i(x^0)` for every objective.
    pub in_level_set: bool,
    pub direction_status: DirectionStatus,
    pub regularization_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub problem: String,
    pub params: SolverParams,
    pub x0: Vec<f64>,
    pub iterates: Vec<IterateRecord>,
    pub status: Termination,
    pub final_x: Vec<f64>,
    /// Seconds.
    pub wall_time: f64,
    /// Seconds spent in the direction subproblem.
    pub subproblem_time: f64,
}

impl SolveReport {
    /// Number of accepted steps.
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn final_xi(&self) -> f64 {
        self.iterates.last().expect("nonempty").xi
    }

    pub fn final_g(&self) -> &[Interval] {
        &self.iterates.last().expect("nonempty").g_values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmijoStep {
    pub t: f64,
    pub backtracks: u32,
    pub x: Vec<f64>,
    pub g_values: Vec<Interval>,
}

/// Whether `trial` satisfies the sufficient decrease condition against
/// `base` on both endpoints of every objective.
pub fn sufficient_decrease(
    base: &[Interval],
    trial: &[Interval],
    sigma: f64,
    t: f64,
    xi: f64,
) -> bool {
    let shift = sigma * t * xi;
    base.iter()
        .zip(trial)
        .all(|(b, g)| g.lo() <= b.lo() + shift && g.hi() <= b.hi() + shift)
}

fn step(x: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(v).map(|(xi, vi)| xi + t * vi).collect()
}

/// Largest `t = η^b ≥ min_step` satisfying the sufficient decrease condition.
/// Trial points where an objective cannot be evaluated are rejected.
pub fn armijo_step(
    problem: &ProblemDef,
    x: &[f64],
    v: &[f64],
    xi: f64,
    params: &SolverParams,
) -> Result<ArmijoStep, LineSearchError> {
    let base = problem.eval(x)?;
    search(problem, x, &base, v, xi, params)
}

fn search(
    problem: &ProblemDef,
    x: &[f64],
    base: &[Interval],
    v: &[f64],
    xi: f64,
    params: &SolverParams,
) -> Result<ArmijoStep, LineSearchError> {
    let mut b = 0u32;
    loop {
        let t = params.eta.powi(b as i32);
        if t < params.min_step {
            return Err(LineSearchError::StepTooSmall {
                min_step: params.min_step,
            });
        }
        let trial = step(x, v, t);
        if let Ok(g) = problem.eval(&trial) {
            if sufficient_decrease(base, &g, params.sigma, t, xi) {
                return Ok(ArmijoStep {
                    t,
                    backtracks: b,
                    x: trial,
                    g_values: g,
                });
            }
        }
        b += 1;
    }
}

fn weakly_below(a: &[Interval], b: &[Interval]) -> bool {
    a.iter().zip(b).all(|(s, t)| s.weakly_dominates(t))
}

pub fn solve(
    problem: &ProblemDef,
    x0: &[f64],
    params: &SolverParams,
) -> Result<SolveReport, SolveError> {
    params.validate()?;
    if x0.len() != problem.n {
        return Err(SolveError::Dimension {
            expected: problem.n,
            got: x0.len(),
        });
    }
    let start = Instant::now();
    let mut subproblem_time = 0.0;
    let eval_err = |k: usize| move |source: EvalError| SolveError::Evaluation { k, source };

    let mut x = x0.to_vec();
    let g0 = problem.eval(&x).map_err(eval_err(0))?;
    let mut g = g0.clone();
    let mut iterates = Vec::new();
    let status = loop {
        let k = iterates.len();
        let data = problem.point_data(&x).map_err(eval_err(k))?;
        let clock = Instant::now();
        let dir = params.direction_kind.solve(&data);
        subproblem_time += clock.elapsed().as_secs_f64();
        if dir.status == DirectionStatus::Infeasible {
            return Err(SolveError::Subproblem { k });
        }
        let mut record = IterateRecord {
            k,
            x: x.clone(),
            g_values: g.clone(),
            xi: dir.xi,
            v: dir.v.clone(),
            t: None,
            backtracks: 0,
            left_box: !problem.in_box(&x),
            in_level_set: weakly_below(&g, &g0),
            direction_status: dir.status,
            regularization_shift: dir.regularization_shift,
        };
        if dir.xi > -params.eps {
            iterates.push(record);
            break Termination::Critical;
        }
        if k >= params.max_iters {
            iterates.push(record);
            break Termination::MaxIterations;
        }
        match search(problem, &x, &g, &dir.v, dir.xi, params) {
            Ok(accepted) => {
                record.t = Some(accepted.t);
                record.backtracks = accepted.backtracks;
                iterates.push(record);
                x = accepted.x;
                g = accepted.g_values;
            }
            Err(_) => {
                iterates.push(record);
                break Termination::LineSearchFailed;
            }
        }
    };
    Ok(SolveReport {
        problem: problem.name.clone(),
        params: *params,
        x0: x0.to_vec(),
        iterates,
        status,
        final_x: x,
        wall_time: start.elapsed().as_secs_f64(),
        subproblem_time,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub xi: f64,
    pub is_critical: bool,
    pub v: Vec<f64>,
}

/// One Newton subproblem solve; `x` is critical when `ξ(x) > −eps`.
pub fn criticality_certificate(
    problem: &ProblemDef,
    x: &[f64],
    eps: f64,
) -> Result<Certificate, SolveError> {
    let data = problem
        .point_data(x)
        .map_err(|source| SolveError::Evaluation { k: 0, source })?;
    let dir = newton_direction(&data, DEFAULT_TOL);
    if dir.status == DirectionStatus::Infeasible {
        return Err(SolveError::Subproblem { k: 0 });
    }
    Ok(Certificate {
        xi: dir.xi,
        is_critical: dir.xi > -eps,
        v: dir.v,
    })
}

/// Largest condition number accepted by [`check_scaling_invariance`].
pub const MAX_CONDITION: f64 = 1e8;

/// Problem in the coordinates `x̂ = Tx`, i.e. `Ĝ(x̂) = G(T⁻¹x̂)`. The box is
/// replaced by the bounding box of its image.
pub fn transformed_problem(
    problem: &ProblemDef,
    t: &DMatrix<f64>,
) -> Result<ProblemDef, SolveError> {
    let n = problem.n;
    if t.nrows() != n || t.ncols() != n {
        return Err(SolveError::Dimension {
            expected: n,
            got: t.nrows(),
        });
    }
    let sv = t.singular_values();
    let cond = sv.max() / sv.min();
    if !(cond.is_finite() && cond < MAX_CONDITION) {
        return Err(SolveError::IllConditioned { cond });
    }
    let s = t.clone().try_inverse().ok_or(SolveError::IllConditioned {
        cond: f64::INFINITY,
    })?;
    let (mut lb, mut ub) = (vec![0.0; n], vec![0.0; n]);
    for r in 0..n {
        for c in 0..n {
            let (a, b) = (t[(r, c)] * problem.lb[c], t[(r, c)] * problem.ub[c]);
            lb[r] += a.min(b);
            ub[r] += a.max(b);
        }
    }
    Ok(ProblemDef::new(
        &format!("{} (scaled)", problem.name),
        lb,
        ub,
        problem.objectives.iter().map(|g| g.pullback(&s)).collect(),
    ))
}

/// `‖v̂(Tx) − T v(x)‖₂`, where `v̂` is the Newton direction of the problem in
/// the coordinates `x̂ = Tx`.
pub fn check_scaling_invariance(
    problem: &ProblemDef,
    x: &[f64],
    t: &DMatrix<f64>,
) -> Result<f64, SolveError> {
    let scaled = transformed_problem(problem, t)?;
    let xv = nalgebra::DVector::from_column_slice(x);
    let x_hat = t * &xv;
    let v = criticality_certificate(problem, x, 0.0)?.v;
    let v_hat = criticality_certificate(&scaled, x_hat.as_slice(), 0.0)?.v;
    let tv = t * nalgebra::DVector::from_vec(v);
    Ok((nalgebra::DVector::from_vec(v_hat) - tv).norm())
}

/// Pairwise comparison of the objective vectors at `points`; entry `(a, b)`
/// is the relation of `G(points[a])` to `G(points[b])`.
pub fn mutual_nondominance(
    problem: &ProblemDef,
    points: &[Vec<f64>],
) -> Result<Vec<Vec<DominanceRelation>>, EvalError> {
    let values: Vec<Vec<Interval>> = points
        .iter()
        .map(|p| problem.eval(p))
        .collect::<Result<_, _>>()?;
    Ok(values
        .iter()
        .map(|a| values.iter().map(|b| compare_vectors(a, b)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisFn, Expr};
    use crate::calculus::{Ivm, Term};
    use crate::problems::{get_problem, portfolio_problem, BK1_CRITICAL, BK1_START};

    fn quartic() -> ProblemDef {
        let f = BasisFn::shared(1, Expr::var(0).powi(4));
        ProblemDef::new(
            "quartic",
            vec![-20.0],
            vec![20.0],
            vec![Ivm::combination(
                1,
                vec![Term::new(Interval::degenerate(1.0).unwrap(), f)],
            )],
        )
    }

    #[test]
    fn bk1_first_steps_are_full() {
        let bk1 = get_problem("I-BK1").unwrap();
        let params = SolverParams::default();
        let c = criticality_certificate(&bk1, &BK1_START, 1e-6).unwrap();
        assert!(!c.is_critical);
        assert!((c.xi + 3.920429).abs() < 1e-3);
        let s = armijo_step(&bk1, &BK1_START, &c.v, c.xi, &params).unwrap();
        assert_eq!((s.t, s.backtracks), (1.0, 0));
        let c1 = criticality_certificate(&bk1, &s.x, 1e-6).unwrap();
        let s1 = armijo_step(&bk1, &s.x, &c1.v, c1.xi, &params).unwrap();
        assert_eq!((s1.t, s1.backtracks), (1.0, 0));
    }

    #[test]
    fn armijo_matches_exhaustive_scan() {
        let p = quartic();
        let params = SolverParams::default();
        let (x, v, xi) = ([10.0], [-25.0], -100.0);
        let s = armijo_step(&p, &x, &v, xi, &params).unwrap();
        let base = p.eval(&x).unwrap();
        let first = (0..40)
            .find(|&b| {
                let t = 0.5f64.powi(b);
                sufficient_decrease(&base, &p.eval(&[10.0 - 25.0 * t]).unwrap(), 1e-3, t, xi)
            })
            .unwrap();
        assert!(first > 0);
        assert_eq!(s.backtracks, first as u32);
        assert_eq!(s.t, 0.5f64.powi(first));
    }

    #[test]
    fn line_search_failure_is_reported() {
        // v points uphill, so no step satisfies the condition.
        let err =
            armijo_step(&quartic(), &[1.0], &[1.0], -1.0, &SolverParams::default()).unwrap_err();
        assert!(matches!(err, LineSearchError::StepTooSmall { .. }));
    }

    #[test]
    fn bk1_trajectory() {
        let bk1 = get_problem("I-BK1").unwrap();
        let r = solve(&bk1, &BK1_START, &SolverParams::default()).unwrap();
        assert_eq!(r.status, Termination::Critical);
        assert!((9..=15).contains(&r.iterations()), "{}", r.iterations());
        assert!(
            (r.final_x[0] - BK1_CRITICAL[0]).abs() < 5e-3
                && (r.final_x[1] - BK1_CRITICAL[1]).abs() < 5e-3
        );
        assert!(r.final_xi() > -1e-6 && r.final_xi() <= 0.0);
        for w in r.iterates.windows(2) {
            assert!(weakly_below(&w[1].g_values, &w[0].g_values));
        }
    }

    #[test]
    fn start_at_minimizer_takes_no_steps() {
        let f = BasisFn::shared(2, Expr::var(0).powi(2) + Expr::var(1).powi(2));
        let p = ProblemDef::new(
            "bowl",
            vec![-1.0; 2],
            vec![1.0; 2],
            vec![Ivm::combination(
                2,
                vec![Term::new(Interval::degenerate(1.0).unwrap(), f)],
            )],
        );
        let r = solve(&p, &[0.0, 0.0], &SolverParams::default()).unwrap();
        assert_eq!((r.status, r.iterations()), (Termination::Critical, 0));
    }

    #[test]
    fn portfolio_from_three_quarters() {
        let p = portfolio_problem();
        let r = solve(&p, &[0.75], &SolverParams::default()).unwrap();
        let x = p.reported_solution(&r.final_x);
        assert!(
            (x[0] - 0.6).abs() < 1e-4 && (x[1] - 0.4).abs() < 1e-4,
            "{x:?}"
        );
    }

    #[test]
    fn solve_is_deterministic() {
        let bk1 = get_problem("I-BK1").unwrap();
        let a = solve(&bk1, &[3.0, -2.0], &SolverParams::default()).unwrap();
        let b = solve(&bk1, &[3.0, -2.0], &SolverParams::default()).unwrap();
        assert_eq!(a.iterates, b.iterates);
    }

    #[test]
    fn rejects_bad_input() {
        let bk1 = get_problem("I-BK1").unwrap();
        assert!(matches!(
            solve(&bk1, &[1.0], &SolverParams::default()),
            Err(SolveError::Dimension { .. })
        ));
        let params = SolverParams {
            eta: 1.5,
            ..SolverParams::default()
        };
        assert!(matches!(
            solve(&bk1, &[1.0, 1.0], &params),
            Err(SolveError::Params(_))
        ));
    }

    #[test]
    fn certificates() {
        let bk1 = get_problem("I-BK1").unwrap();
        assert!(
            criticality_certificate(&bk1, &BK1_CRITICAL, 1e-6)
                .unwrap()
                .is_critical
        );
        // Zero gH-gradients at the origin of a pure quadratic.
        let vfm2 = get_problem("I-MHHM2").unwrap();
        let c = criticality_certificate(&vfm2, &[0.8, 0.6], 1e-6).unwrap();
        assert!(c.xi <= 0.0);
    }

    #[test]
    fn scaling_identity_and_diagonal() {
        let bk1 = get_problem("I-BK1").unwrap();
        let id = DMatrix::identity(2, 2);
        assert!(check_scaling_invariance(&bk1, &BK1_START, &id).unwrap() < 1e-6);
        let t = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5]));
        assert!(check_scaling_invariance(&bk1, &BK1_START, &t).unwrap() < 1e-5);
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            check_scaling_invariance(&bk1, &BK1_START, &singular),
            Err(SolveError::IllConditioned { .. })
        ));
    }

    #[test]
    fn dominance_matrix() {
        let bk1 = get_problem("I-BK1").unwrap();
        let m = mutual_nondominance(
            &bk1,
            &[vec![0.0, 0.0], vec![-1.0, -1.0], BK1_CRITICAL.to_vec()],
        )
        .unwrap();
        assert_eq!(m[0][0], DominanceRelation::Equal);
        assert_eq!(m[0][1], DominanceRelation::StrictlyDominates);
        assert_eq!(m[1][0], DominanceRelation::StrictlyDominatedBy);
    }
}
