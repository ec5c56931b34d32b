//! Interval-valued maps and their gH-gradients and gH-Hessians.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::{Jet, LinearPullback, ScalarField};
use crate::error::EvalError;
use crate::interval::{Interval, IntervalMatrix, IntervalVector};

/// One summand `C ⊙ φ(x)` of a coefficient combination.
#[derive(Clone)]
pub struct Term {
    pub coef: Interval,
    pub field: Arc<dyn ScalarField>,
}

impl Term {
    pub fn new(coef: Interval, field: Arc<dyn ScalarField>) -> Self {
        Term { coef, field }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊙ {:?}", self.coef, self.field)
    }
}

/// An interval-valued map `G = [G_lo, G_hi]` on `R^n`.
#[derive(Debug, Clone)]
pub enum Ivm {
    /// `⊕_j C_j ⊙ φ_j(x)` folded with Moore arithmetic.
    Combination { dim: usize, terms: Vec<Term> },
    /// Explicit lower and upper boundary functions.
    BoundaryPair {
        dim: usize,
        lower: Arc<dyn ScalarField>,
        upper: Arc<dyn ScalarField>,
    },
}

/// Value and both derivative levels at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IvmDerivatives {
    pub value: Interval,
    pub gradient: IntervalVector,
    pub hessian: IntervalMatrix,
}

impl Ivm {
    /// Panics if a term's dimension differs from `dim`.
    pub fn combination(dim: usize, terms: Vec<Term>) -> Self {
        for t in &terms {
            assert_eq!(t.field.dim(), dim, "term dimension mismatch");
        }
        Ivm::Combination { dim, terms }
    }

    pub fn boundary_pair(lower: Arc<dyn ScalarField>, upper: Arc<dyn ScalarField>) -> Self {
        let dim = lower.dim();
        assert_eq!(upper.dim(), dim, "boundary dimension mismatch");
        Ivm::BoundaryPair { dim, lower, upper }
    }

    pub fn dim(&self) -> usize {
        match self {
            Ivm::Combination { dim, .. } | Ivm::BoundaryPair { dim, .. } => *dim,
        }
    }

    pub fn is_combination(&self) -> bool {
        matches!(self, Ivm::Combination { .. })
    }

    fn check(&self, x: &[f64]) -> Result<(), EvalError> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(EvalError::Dimension {
                expected: self.dim(),
                got: x.len(),
            })
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Interval, EvalError> {
        self.check(x)?;
        match self {
            Ivm::Combination { terms, .. } => {
                let mut acc = Interval::ZERO;
                for t in terms {
                    let phi = t.field.value(x)?;
                    acc = acc.try_add(t.coef.try_scale(phi)?)?;
                }
                Ok(acc)
            }
            Ivm::BoundaryPair { lower, upper, .. } => {
                Ok(Interval::from_unordered(lower.value(x)?, upper.value(x)?)?)
            }
        }
    }

    /// Jets of the lower and upper boundary functions at `x`.
    ///
    /// For a combination the lower boundary picks `C_lo` where `φ ≥ 0` and
    /// `C_hi` where `φ < 0`, so these are the exact one-sided derivatives of
    /// `G_lo` and `G_hi` away from sign changes of the `φ_j`.
    pub fn boundary_jets(&self, x: &[f64]) -> Result<(Jet, Jet), EvalError> {
        self.check(x)?;
        let n = self.dim();
        match self {
            Ivm::Combination { terms, .. } => {
                let mut lo = Jet::constant(n, 0.0);
                let mut hi = Jet::constant(n, 0.0);
                for t in terms {
                    let j = t.field.jet(x)?;
                    let (cl, ch) = if j.value >= 0.0 {
                        (t.coef.lo(), t.coef.hi())
                    } else {
                        (t.coef.hi(), t.coef.lo())
                    };
                    accumulate(&mut lo, cl, &j);
                    accumulate(&mut hi, ch, &j);
                }
                Ok((lo, hi))
            }
            Ivm::BoundaryPair { lower, upper, .. } => {
                let (l, u) = (lower.jet(x)?, upper.jet(x)?);
                Ok(if l.value <= u.value { (l, u) } else { (u, l) })
            }
        }
    }

    pub fn derivatives(&self, x: &[f64]) -> Result<IvmDerivatives, EvalError> {
        let (lo, hi) = self.boundary_jets(x)?;
        let n = self.dim();
        let gradient = (0..n)
            .map(|r| Interval::from_unordered(lo.grad[r], hi.grad[r]))
            .collect::<Result<Vec<_>, _>>()?;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for s in 0..n {
                entries.push(Interval::from_unordered(lo.hess[(r, s)], hi.hess[(r, s)])?);
            }
        }
        Ok(IvmDerivatives {
            value: self.eval(x)?,
            gradient: IntervalVector(gradient),
            hessian: IntervalMatrix::from_row_major(n, entries),
        })
    }

    /// gH-gradient: component `r` is `[min, max]` of the boundary partials.
    pub fn gh_gradient(&self, x: &[f64]) -> Result<IntervalVector, EvalError> {
        Ok(self.derivatives(x)?.gradient)
    }

    /// gH-Hessian: entry `(r, s)` is `[min, max]` of the boundary second partials.
    pub fn gh_hessian(&self, x: &[f64]) -> Result<IntervalMatrix, EvalError> {
        Ok(self.derivatives(x)?.hessian)
    }

    /// The termwise rule `⊕_j C_j ⊙ ∂φ_j/∂x_r`.
    ///
    /// It agrees with [`Ivm::gh_gradient`] when each coordinate enters at most
    /// one non-degenerate term, and can be wider otherwise. Boundary pairs
    /// fall back to the definitional rule.
    pub fn gh_gradient_per_term(&self, x: &[f64]) -> Result<IntervalVector, EvalError> {
        self.check(x)?;
        match self {
            Ivm::Combination { dim, terms } => {
                let mut acc = IntervalVector::zeros(*dim);
                for t in terms {
                    let g = t.field.gradient(x)?;
                    let part = g
                        .iter()
                        .map(|&d| t.coef.try_scale(d))
                        .collect::<Result<Vec<_>, _>>()?;
                    acc = acc.try_add(&IntervalVector(part))?;
                }
                Ok(acc)
            }
            Ivm::BoundaryPair { .. } => self.gh_gradient(x),
        }
    }

    /// The same map composed with `x̂ ↦ S x̂`.
    pub fn pullback(&self, s: &DMatrix<f64>) -> Ivm {
        let wrap = |f: &Arc<dyn ScalarField>| -> Arc<dyn ScalarField> {
            Arc::new(LinearPullback::new(f.clone(), s.clone()))
        };
        match self {
            Ivm::Combination { terms, .. } => Ivm::Combination {
                dim: s.ncols(),
                terms: terms
                    .iter()
                    .map(|t| Term::new(t.coef, wrap(&t.field)))
                    .collect(),
            },
            Ivm::BoundaryPair { lower, upper, .. } => Ivm::BoundaryPair {
                dim: s.ncols(),
                lower: wrap(lower),
                upper: wrap(upper),
            },
        }
    }

    /// Signs of the basis values, used to detect kinks of the boundaries.
    fn sign_pattern(&self, x: &[f64]) -> Result<Vec<bool>, EvalError> {
        match self {
            Ivm::Combination { terms, .. } => terms
                .iter()
                .filter(|t| !t.coef.is_degenerate())
                .map(|t| Ok(t.field.value(x)? >= 0.0))
                .collect(),
            Ivm::BoundaryPair { lower, upper, .. } => Ok(vec![lower.value(x)? <= upper.value(x)?]),
        }
    }
}

fn accumulate(acc: &mut Jet, c: f64, j: &Jet) {
    if c == 0.0 {
        return;
    }
    acc.value += c * j.value;
    acc.grad.axpy(c, &j.grad, 1.0);
    acc.hess += &j.hess * c;
}

/// Why a finite-difference check was not performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SkipReason {
    /// A stencil point is outside the domain of definition.
    OutOfDomain,
    /// A basis function changes sign across the stencil.
    SignChange,
}

/// Outcome of [`fd_validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Largest endpoint deviation of the gradient, relative to `max(1, ‖∇‖∞)`.
    pub gradient_deviation: f64,
    /// Largest endpoint deviation of the Hessian, relative to `max(1, ‖∇²‖max)`.
    pub hessian_deviation: f64,
    pub skipped: Option<SkipReason>,
}

impl ValidationReport {
    pub fn deviation(&self) -> f64 {
        self.gradient_deviation.max(self.hessian_deviation)
    }

    fn skipped(reason: SkipReason) -> Self {
        ValidationReport {
            gradient_deviation: 0.0,
            hessian_deviation: 0.0,
            skipped: Some(reason),
        }
    }
}

/// Compares the analytic gH-gradient and gH-Hessian against central
/// differences of the boundary functions.
///
/// Gradient partials come from differences of boundary values; second
/// partials from differences of the boundary gradients. Each difference
/// quotient pair is turned into an interval with the `[min, max]` rule.
pub fn fd_validate(g: &Ivm, x: &[f64], h: f64) -> ValidationReport {
    assert!(h > 0.0, "step must be positive");
    let n = g.dim();
    let exact = match g.derivatives(x) {
        Ok(d) => d,
        Err(_) => return ValidationReport::skipped(SkipReason::OutOfDomain),
    };
    let center = match g.sign_pattern(x) {
        Ok(s) => s,
        Err(_) => return ValidationReport::skipped(SkipReason::OutOfDomain),
    };

    let mut stencil = Vec::with_capacity(2 * n);
    for r in 0..n {
        for sign in [1.0, -1.0] {
            let mut p = x.to_vec();
            p[r] += sign * h;
            let (Ok(v), Ok(jets), Ok(pattern)) =
                (g.eval(&p), g.boundary_jets(&p), g.sign_pattern(&p))
            else {
                return ValidationReport::skipped(SkipReason::OutOfDomain);
            };
            if pattern != center {
                return ValidationReport::skipped(SkipReason::SignChange);
            }
            stencil.push((v, jets));
        }
    }

    let grad_scale = exact
        .gradient
        .iter()
        .map(Interval::norm)
        .fold(1.0, f64::max);
    let mut gradient_deviation: f64 = 0.0;
    for r in 0..n {
        let (plus, minus) = (&stencil[2 * r].0, &stencil[2 * r + 1].0);
        let dl = (plus.lo() - minus.lo()) / (2.0 * h);
        let du = (plus.hi() - minus.hi()) / (2.0 * h);
        let fd = Interval::from_unordered(dl, du).expect("finite quotients");
        let e = exact.gradient[r];
        gradient_deviation = gradient_deviation
            .max((fd.lo() - e.lo()).abs())
            .max((fd.hi() - e.hi()).abs());
    }

    let mut hess_scale: f64 = 1.0;
    for r in 0..n {
        for s in 0..n {
            hess_scale = hess_scale.max(exact.hessian.get(r, s).norm());
        }
    }
    let mut hessian_deviation: f64 = 0.0;
    for s in 0..n {
        let (plus, minus) = (&stencil[2 * s].1, &stencil[2 * s + 1].1);
        for r in 0..n {
            let dl = (plus.0.grad[r] - minus.0.grad[r]) / (2.0 * h);
            let du = (plus.1.grad[r] - minus.1.grad[r]) / (2.0 * h);
            let fd = Interval::from_unordered(dl, du).expect("finite quotients");
            let e = exact.hessian.get(r, s);
            hessian_deviation = hessian_deviation
                .max((fd.lo() - e.lo()).abs())
                .max((fd.hi() - e.hi()).abs());
        }
    }

    ValidationReport {
        gradient_deviation: gradient_deviation / grad_scale,
        hessian_deviation: hessian_deviation / hess_scale,
        skipped: None,
    }
}
