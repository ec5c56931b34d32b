//! The quadratic interval model at a point and the Newton-direction
//! subproblem built from it.

mod barrier;
mod oracle;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::calculus::Ivm;
use crate::error::{DirectionError, EvalError};

pub use oracle::oracle_direction;

/// Default subproblem tolerance on the barrier duality gap.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Budget of damped Newton steps inside one subproblem solve.
pub const MAX_NEWTON_STEPS: usize = 200;
/// Eigenvalue tolerance of the convexity guard.
pub const PSD_TOL: f64 = 1e-10;
/// Objectives whose model value is within this of the max are reported active.
pub const ACTIVE_TOL: f64 = 1e-10;

/// Boundary-decomposed gH-gradient and gH-Hessian of one objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveData {
    pub grad_lo: DVector<f64>,
    pub grad_hi: DVector<f64>,
    pub hess_lo: DMatrix<f64>,
    pub hess_hi: DMatrix<f64>,
}

/// Everything the direction subproblem needs about a point `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointData {
    pub x: DVector<f64>,
    pub objectives: Vec<ObjectiveData>,
}

impl PointData {
    /// Validates shapes, orderings and symmetry.
    pub fn new(x: DVector<f64>, objectives: Vec<ObjectiveData>) -> Result<Self, DirectionError> {
        let n = x.len();
        for o in &objectives {
            let shapes_ok = o.grad_lo.len() == n
                && o.grad_hi.len() == n
                && o.hess_lo.shape() == (n, n)
                && o.hess_hi.shape() == (n, n);
            if !shapes_ok {
                return Err(DirectionError::Dimension);
            }
            let ordered = o.grad_lo.iter().zip(o.grad_hi.iter()).all(|(a, b)| a <= b)
                && o.hess_lo.iter().zip(o.hess_hi.iter()).all(|(a, b)| a <= b);
            let symmetric =
                o.hess_lo == o.hess_lo.transpose() && o.hess_hi == o.hess_hi.transpose();
            if !ordered || !symmetric {
                return Err(DirectionError::Dimension);
            }
        }
        Ok(PointData { x, objectives })
    }

    /// Evaluates the gH-derivatives of every objective at `x`.
    pub fn from_ivms(objectives: &[Ivm], x: &[f64]) -> Result<Self, EvalError> {
        let data = objectives
            .iter()
            .map(|g| {
                let d = g.derivatives(x)?;
                Ok(ObjectiveData {
                    grad_lo: DVector::from_vec(d.gradient.lower()),
                    grad_hi: DVector::from_vec(d.gradient.upper()),
                    hess_lo: d.hessian.lower(),
                    hess_hi: d.hessian.upper(),
                })
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Ok(PointData {
            x: DVector::from_column_slice(x),
            objectives: data,
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn m(&self) -> usize {
        self.objectives.len()
    }
}

/// Lower and upper endpoint of the model interval `g_x^i(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelValue {
    pub lower: f64,
    pub upper: f64,
}

/// Evaluates the quadratic interval model of objective `i` at `v`.
pub fn eval_model(p: &PointData, i: usize, v: &[f64]) -> ModelValue {
    let o = &p.objectives[i];
    assert_eq!(v.len(), p.n(), "direction has wrong dimension");
    let v = DVector::from_column_slice(v);
    let abs = v.abs();
    let mid = (&o.grad_lo + &o.grad_hi).dot(&v) * 0.5;
    let spread = (&o.grad_hi - &o.grad_lo).dot(&abs) * 0.5;
    let curv = (&o.hess_lo + &o.hess_hi).quadratic_form(&v) * 0.25;
    let width = (&o.hess_hi - &o.hess_lo).quadratic_form(&abs) * 0.25;
    ModelValue {
        lower: mid - spread + curv - width,
        upper: mid + spread + curv + width,
    }
}

/// `max_i` of the upper model endpoints.
pub fn scalarized_value(p: &PointData, v: &[f64]) -> f64 {
    (0..p.m())
        .map(|i| eval_model(p, i, v).upper)
        .fold(f64::NEG_INFINITY, f64::max)
}

trait QuadraticForm {
    fn quadratic_form(&self, v: &DVector<f64>) -> f64;
}

impl QuadraticForm for DMatrix<f64> {
    fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(self * v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DirectionStatus {
    Converged,
    MaxIterations,
    Infeasible,
}

/// Solution of the direction subproblem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionResult {
    pub v: Vec<f64>,
    pub xi: f64,
    pub u: Vec<f64>,
    pub tau: f64,
    pub status: DirectionStatus,
    pub kkt_residual: f64,
    /// Largest Levenberg shift applied to any model block.
    pub regularization_shift: f64,
    /// Shift applied to the curvature block of each objective.
    pub curvature_shifts: Vec<f64>,
    pub active_set: Vec<usize>,
    pub newton_steps: usize,
}

impl DirectionResult {
    pub(crate) fn zero(n: usize, m: usize, status: DirectionStatus) -> Self {
        DirectionResult {
            v: vec![0.0; n],
            xi: 0.0,
            u: vec![0.0; n],
            tau: 0.0,
            status,
            kkt_residual: 0.0,
            regularization_shift: 0.0,
            curvature_shifts: vec![0.0; m],
            active_set: (0..m).collect(),
            newton_steps: 0,
        }
    }
}

/// The upper model `cᵀv + dᵀ|v| + vᵀAv + |v|ᵀB|v|` of one objective.
#[derive(Debug, Clone)]
pub(crate) struct QuadModel {
    pub c: DVector<f64>,
    pub d: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl QuadModel {
    fn newton(o: &ObjectiveData) -> Self {
        QuadModel {
            c: (&o.grad_lo + &o.grad_hi) * 0.5,
            d: (&o.grad_hi - &o.grad_lo) * 0.5,
            a: (&o.hess_lo + &o.hess_hi) * 0.25,
            b: (&o.hess_hi - &o.hess_lo) * 0.25,
        }
    }

    fn steepest(o: &ObjectiveData) -> Self {
        let n = o.grad_lo.len();
        QuadModel {
            c: (&o.grad_lo + &o.grad_hi) * 0.5,
            d: (&o.grad_hi - &o.grad_lo) * 0.5,
            a: DMatrix::identity(n, n) * 0.5,
            b: DMatrix::zeros(n, n),
        }
    }

    pub fn upper(&self, v: &DVector<f64>) -> f64 {
        let abs = v.abs();
        self.c.dot(v) + self.d.dot(&abs) + self.a.quadratic_form(v) + self.b.quadratic_form(&abs)
    }
}

/// Coordinates whose `|v_j|` enters some model.
fn coupled_coordinates(models: &[QuadModel], n: usize) -> Vec<usize> {
    (0..n)
        .filter(|&j| {
            models
                .iter()
                .any(|q| q.d[j] != 0.0 || (0..n).any(|k| q.b[(j, k)] != 0.0))
        })
        .collect()
}

/// Smallest doubling shift `μ ≥ 1e-8` with `λ_min(M + μI) ≥ μ/2`, or zero
/// when `M` is already positive semidefinite within [`PSD_TOL`].
fn levenberg_shift(m: &DMatrix<f64>) -> Option<f64> {
    if m.nrows() == 0 {
        return Some(0.0);
    }
    let lmin = SymmetricEigen::new(m.clone()).eigenvalues.min();
    if !lmin.is_finite() {
        return None;
    }
    if lmin >= -PSD_TOL {
        return Some(0.0);
    }
    let mut mu = 1e-8;
    while lmin + mu < 0.5 * mu {
        mu *= 2.0;
        if !mu.is_finite() {
            return None;
        }
    }
    Some(mu)
}

fn submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, s| m[(idx[r], idx[s])])
}

/// Applies the convexity guard in place. Returns the per-objective curvature
/// shifts and the largest shift overall, or `None` if a block is not finite.
fn regularize(models: &mut [QuadModel], coupled: &[usize]) -> Option<(Vec<f64>, f64)> {
    let mut curvature = Vec::with_capacity(models.len());
    let mut largest: f64 = 0.0;
    for q in models.iter_mut() {
        let n = q.a.nrows();
        let mu_a = levenberg_shift(&q.a)?;
        if mu_a > 0.0 {
            q.a += DMatrix::identity(n, n) * mu_a;
        }
        let mu_b = levenberg_shift(&submatrix(&q.b, coupled))?;
        if mu_b > 0.0 {
            for &j in coupled {
                q.b[(j, j)] += mu_b;
            }
        }
        curvature.push(mu_a);
        largest = largest.max(mu_a).max(mu_b);
    }
    Some((curvature, largest))
}

fn solve_models(mut models: Vec<QuadModel>, tol: f64) -> DirectionResult {
    assert!(tol > 0.0, "tolerance must be positive");
    let m = models.len();
    let n = models.first().map_or(0, |q| q.c.len());
    let coupled = coupled_coordinates(&models, n);
    let Some((curvature_shifts, shift)) = regularize(&mut models, &coupled) else {
        return DirectionResult::zero(n, m, DirectionStatus::Infeasible);
    };
    if models
        .iter()
        .any(|q| !q.c.iter().chain(q.d.iter()).all(|v| v.is_finite()))
    {
        return DirectionResult::zero(n, m, DirectionStatus::Infeasible);
    }

    let out = barrier::solve(&models, &coupled, tol, MAX_NEWTON_STEPS);
    let mut v = DVector::from_vec(out.v);
    let mut xi = models
        .iter()
        .map(|q| q.upper(&v))
        .fold(f64::NEG_INFINITY, f64::max);
    // v = 0 is always feasible with value 0; never report worse.
    if xi > 0.0 || xi.is_nan() {
        v = DVector::zeros(n);
        xi = 0.0;
    }
    let values: Vec<f64> = models.iter().map(|q| q.upper(&v)).collect();
    let active_set = (0..m).filter(|&i| values[i] >= xi - ACTIVE_TOL).collect();
    DirectionResult {
        u: v.iter().map(|x| x.abs()).collect(),
        v: v.as_slice().to_vec(),
        xi,
        tau: xi,
        status: out.status,
        kkt_residual: out.kkt_residual,
        regularization_shift: shift,
        curvature_shifts,
        active_set,
        newton_steps: out.newton_steps,
    }
}

/// Solves `min_v max_i ḡ_x^i(v)` through its smooth epigraph reformulation.
///
/// With a curvature shift in play, `xi` is the optimal value of the
/// regularized model, which bounds the raw model from above.
pub fn newton_direction(p: &PointData, tol: f64) -> DirectionResult {
    solve_models(p.objectives.iter().map(QuadModel::newton).collect(), tol)
}

/// First-order baseline: the same subproblem with every Hessian replaced by
/// the identity.
pub fn steepest_direction(p: &PointData, tol: f64) -> DirectionResult {
    solve_models(p.objectives.iter().map(QuadModel::steepest).collect(), tol)
}
