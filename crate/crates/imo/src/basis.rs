//! Smooth real basis functions with analytic first and second derivatives.
//!
//! Problem objectives are interval-weighted sums of these. The expression
//! set is small and closed: polynomials, `exp`, `sin`, `cos`, reciprocals,
//! products, and linear combinations. Each node carries its own
//! differentiation rule.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::EvalError;

/// Reciprocals of values smaller than this in magnitude are rejected.
pub const RECIP_GUARD: f64 = 1e-6;

/// Value, gradient and Hessian of a scalar function at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl Jet {
    pub fn constant(n: usize, c: f64) -> Self {
        Jet {
            value: c,
            grad: DVector::zeros(n),
            hess: DMatrix::zeros(n, n),
        }
    }

    fn add_scaled(&mut self, c: f64, other: &Jet) {
        self.value += c * other.value;
        self.grad.axpy(c, &other.grad, 1.0);
        self.hess += &other.hess * c;
    }

    fn mul(&self, other: &Jet) -> Jet {
        let outer = &self.grad * other.grad.transpose();
        let hess = &other.hess * self.value + &self.hess * other.value + &outer + outer.transpose();
        Jet {
            value: self.value * other.value,
            grad: &other.grad * self.value + &self.grad * other.value,
            hess,
        }
    }

    /// Chain rule for `f(self)` given `f`, `f'`, `f''` at `self.value`.
    fn compose(&self, f: f64, df: f64, d2f: f64) -> Jet {
        let outer = &self.grad * self.grad.transpose();
        Jet {
            value: f,
            grad: &self.grad * df,
            hess: outer * d2f + &self.hess * df,
        }
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.hess.iter().all(|v| v.is_finite())
    }
}

/// A twice-differentiable real function on `R^n`.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64, EvalError>;

    fn jet(&self, x: &[f64]) -> Result<Jet, EvalError>;

    fn gradient(&self, x: &[f64]) -> Result<DVector<f64>, EvalError> {
        Ok(self.jet(x)?.grad)
    }

    fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        Ok(self.jet(x)?.hess)
    }
}

fn check_dim(expected: usize, x: &[f64]) -> Result<(), EvalError> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(EvalError::Dimension {
            expected,
            got: x.len(),
        })
    }
}

/// A monomial `coef * prod x_v^e` with sparse, sorted exponents.
#[derive(Debug, Clone, PartialEq)]
struct Monomial {
    coef: f64,
    powers: Vec<(usize, u32)>,
}

impl Monomial {
    fn value(&self, x: &[f64]) -> f64 {
        self.powers
            .iter()
            .fold(self.coef, |acc, &(v, e)| acc * x[v].powi(e as i32))
    }

    /// Product of all factors, with the listed factors replaced by the given
    /// values.
    fn product_with(&self, x: &[f64], replace: &[(usize, f64)]) -> f64 {
        let mut acc = self.coef;
        for &(v, e) in &self.powers {
            match replace.iter().find(|(r, _)| *r == v) {
                Some(&(_, val)) => acc *= val,
                None => acc *= x[v].powi(e as i32),
            }
        }
        acc
    }

    fn accumulate(&self, x: &[f64], jet: &mut Jet) {
        jet.value += self.value(x);
        for (a, &(r, er)) in self.powers.iter().enumerate() {
            let dr = er as f64 * x[r].powi(er as i32 - 1);
            jet.grad[r] += self.product_with(x, &[(r, dr)]);
            if er >= 2 {
                let d2 = (er * (er - 1)) as f64 * x[r].powi(er as i32 - 2);
                jet.hess[(r, r)] += self.product_with(x, &[(r, d2)]);
            }
            for &(s, es) in &self.powers[a + 1..] {
                let ds = es as f64 * x[s].powi(es as i32 - 1);
                let h = self.product_with(x, &[(r, dr), (s, ds)]);
                jet.hess[(r, s)] += h;
                jet.hess[(s, r)] += h;
            }
        }
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut powers = self.powers.clone();
        for &(v, e) in &other.powers {
            match powers.iter_mut().find(|(w, _)| *w == v) {
                Some(p) => p.1 += e,
                None => powers.push((v, e)),
            }
        }
        powers.sort_unstable();
        Monomial {
            coef: self.coef * other.coef,
            powers,
        }
    }
}

/// A polynomial as a sum of monomials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: Vec<Monomial>,
}

impl Poly {
    fn constant(c: f64) -> Self {
        Poly {
            terms: vec![Monomial {
                coef: c,
                powers: vec![],
            }],
        }
    }

    fn var(i: usize) -> Self {
        Poly {
            terms: vec![Monomial {
                coef: 1.0,
                powers: vec![(i, 1)],
            }],
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        for m in other.terms {
            match self.terms.iter_mut().find(|t| t.powers == m.powers) {
                Some(t) => t.coef += m.coef,
                None => self.terms.push(m),
            }
        }
        self
    }

    fn scale(mut self, c: f64) -> Poly {
        self.terms.iter_mut().for_each(|t| t.coef *= c);
        self
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for a in &self.terms {
            for b in &other.terms {
                out = out.add(Poly {
                    terms: vec![a.mul(b)],
                });
            }
        }
        out
    }

    fn max_var(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|t| t.powers.iter().map(|p| p.0))
            .max()
    }
}

/// An expression tree over the closed basis set.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Poly(Poly),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Recip(Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Sum(Vec<(f64, Expr)>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Poly(Poly::constant(c))
    }

    /// The coordinate function `x_i` (zero-based).
    pub fn var(i: usize) -> Expr {
        Expr::Poly(Poly::var(i))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn recip(self) -> Expr {
        Expr::Recip(Box::new(self))
    }

    pub fn powi(self, k: u32) -> Expr {
        (1..k).fold(self.clone(), |acc, _| acc * self.clone())
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Poly(p) => p.max_var(),
            Expr::Exp(e) | Expr::Sin(e) | Expr::Cos(e) | Expr::Recip(e) => e.max_var(),
            Expr::Product(a, b) => a.max_var().max(b.max_var()),
            Expr::Sum(ts) => ts.iter().filter_map(|(_, e)| e.max_var()).max(),
        }
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Poly(p) => p.terms.iter().map(|m| m.value(x)).sum(),
            Expr::Exp(e) => e.value(x)?.exp(),
            Expr::Sin(e) => e.value(x)?.sin(),
            Expr::Cos(e) => e.value(x)?.cos(),
            Expr::Recip(e) => 1.0 / guarded(e.value(x)?, x)?,
            Expr::Product(a, b) => a.value(x)? * b.value(x)?,
            Expr::Sum(ts) => {
                let mut acc = 0.0;
                for (c, e) in ts {
                    acc += c * e.value(x)?;
                }
                acc
            }
        })
    }

    fn jet(&self, x: &[f64]) -> Result<Jet, EvalError> {
        let n = x.len();
        Ok(match self {
            Expr::Poly(p) => {
                let mut j = Jet::constant(n, 0.0);
                p.terms.iter().for_each(|m| m.accumulate(x, &mut j));
                j
            }
            Expr::Exp(e) => {
                let g = e.jet(x)?;
                let f = g.value.exp();
                g.compose(f, f, f)
            }
            Expr::Sin(e) => {
                let g = e.jet(x)?;
                let (s, c) = g.value.sin_cos();
                g.compose(s, c, -s)
            }
            Expr::Cos(e) => {
                let g = e.jet(x)?;
                let (s, c) = g.value.sin_cos();
                g.compose(c, -s, -c)
            }
            Expr::Recip(e) => {
                let g = e.jet(x)?;
                let r = 1.0 / guarded(g.value, x)?;
                g.compose(r, -r * r, 2.0 * r * r * r)
            }
            Expr::Product(a, b) => a.jet(x)?.mul(&b.jet(x)?),
            Expr::Sum(ts) => {
                let mut j = Jet::constant(n, 0.0);
                for (c, e) in ts {
                    j.add_scaled(*c, &e.jet(x)?);
                }
                j
            }
        })
    }
}

fn guarded(v: f64, x: &[f64]) -> Result<f64, EvalError> {
    if v.abs() < RECIP_GUARD {
        Err(EvalError::Domain {
            what: "reciprocal of a near-zero value",
            x: x.to_vec(),
        })
    } else {
        Ok(v)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Poly(a), Expr::Poly(b)) => Expr::Poly(a.add(b)),
            (Expr::Sum(mut a), Expr::Sum(b)) => {
                a.extend(b);
                Expr::Sum(a)
            }
            (Expr::Sum(mut a), b) => {
                a.push((1.0, b));
                Expr::Sum(a)
            }
            (a, b) => Expr::Sum(vec![(1.0, a), (1.0, b)]),
        }
    }
}

impl Add<f64> for Expr {
    type Output = Expr;
    fn add(self, rhs: f64) -> Expr {
        self + Expr::constant(rhs)
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-1.0) * rhs
    }
}

impl Sub<f64> for Expr {
    type Output = Expr;
    fn sub(self, rhs: f64) -> Expr {
        self + Expr::constant(-rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -1.0 * self
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Poly(a), Expr::Poly(b)) => Expr::Poly(a.mul(&b)),
            (a, b) => Expr::Product(Box::new(a), Box::new(b)),
        }
    }
}

impl Mul<Expr> for f64 {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match rhs {
            Expr::Poly(p) => Expr::Poly(p.scale(self)),
            Expr::Sum(ts) => Expr::Sum(ts.into_iter().map(|(c, e)| (self * c, e)).collect()),
            e => Expr::Sum(vec![(self, e)]),
        }
    }
}

impl Mul<f64> for Expr {
    type Output = Expr;
    fn mul(self, rhs: f64) -> Expr {
        rhs * self
    }
}

impl Add<Expr> for f64 {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::constant(self) + rhs
    }
}

impl Sub<Expr> for f64 {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::constant(self) - rhs
    }
}

/// An expression bound to a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFn {
    n: usize,
    expr: Expr,
}

impl BasisFn {
    /// Panics if the expression references a coordinate `>= n`.
    pub fn new(n: usize, expr: Expr) -> Self {
        if let Some(v) = expr.max_var() {
            assert!(v < n, "expression uses x{} but dimension is {n}", v + 1);
        }
        BasisFn { n, expr }
    }

    pub fn shared(n: usize, expr: Expr) -> Arc<dyn ScalarField> {
        Arc::new(BasisFn::new(n, expr))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl ScalarField for BasisFn {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        check_dim(self.n, x)?;
        let v = self.expr.value(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x: x.to_vec() })
        }
    }

    fn jet(&self, x: &[f64]) -> Result<Jet, EvalError> {
        check_dim(self.n, x)?;
        let j = self.expr.jet(x)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(EvalError::NonFinite { x: x.to_vec() })
        }
    }
}

/// `x̂ ↦ inner(S x̂)` for a square matrix `S`.
#[derive(Debug, Clone)]
pub struct LinearPullback {
    inner: Arc<dyn ScalarField>,
    s: DMatrix<f64>,
}

impl LinearPullback {
    pub fn new(inner: Arc<dyn ScalarField>, s: DMatrix<f64>) -> Self {
        assert_eq!(
            s.nrows(),
            inner.dim(),
            "pullback matrix rows must match inner dimension"
        );
        LinearPullback { inner, s }
    }

    fn map(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        check_dim(self.s.ncols(), x)?;
        Ok((&self.s * DVector::from_column_slice(x))
            .as_slice()
            .to_vec())
    }
}

impl ScalarField for LinearPullback {
    fn dim(&self) -> usize {
        self.s.ncols()
    }

    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        self.inner.value(&self.map(x)?)
    }

    fn jet(&self, x: &[f64]) -> Result<Jet, EvalError> {
        let j = self.inner.jet(&self.map(x)?)?;
        let st = self.s.transpose();
        let hess = &st * j.hess * &self.s;
        Ok(Jet {
            value: j.value,
            grad: &st * j.grad,
            hess: symmetrize(hess),
        })
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Expr {
        Expr::var(i)
    }

    /// Central differences of `value` as an independent derivative check.
    fn fd_check(f: &dyn ScalarField, p: &[f64]) {
        let h = 1e-5;
        let j = f.jet(p).unwrap();
        let n = p.len();
        for r in 0..n {
            let mut a = p.to_vec();
            let mut b = p.to_vec();
            a[r] += h;
            b[r] -= h;
            let g = (f.value(&a).unwrap() - f.value(&b).unwrap()) / (2.0 * h);
            assert!(
                (g - j.grad[r]).abs() <= 1e-5 * (1.0 + g.abs()),
                "grad[{r}]: fd {g} vs {}",
                j.grad[r]
            );
            let ga = f.gradient(&a).unwrap();
            let gb = f.gradient(&b).unwrap();
            for s in 0..n {
                let hs = (ga[s] - gb[s]) / (2.0 * h);
                assert!(
                    (hs - j.hess[(s, r)]).abs() <= 1e-5 * (1.0 + hs.abs()),
                    "hess[{s},{r}]: fd {hs} vs {}",
                    j.hess[(s, r)]
                );
            }
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let e = 3.0 * x(0).powi(3) * x(1).powi(2) - 10.0 * x(0) + 4.0 * x(1) + 7.0;
        let f = BasisFn::new(2, e);
        let j = f.jet(&[2.0, -1.0]).unwrap();
        assert_eq!(j.value, 3.0 * 8.0 - 20.0 - 4.0 + 7.0);
        assert_eq!(j.grad[0], 9.0 * 4.0 - 10.0);
        assert_eq!(j.grad[1], -(3.0 * 8.0 * 2.0) + 4.0);
        assert_eq!(j.hess[(0, 0)], 18.0 * 2.0);
        assert_eq!(j.hess[(0, 1)], 9.0 * 4.0 * -2.0);
        assert_eq!(j.hess[(1, 0)], j.hess[(0, 1)]);
        assert_eq!(j.hess[(1, 1)], 6.0 * 8.0);
        fd_check(&f, &[0.7, -1.3]);
    }

    #[test]
    fn transcendental_derivatives_match_differences() {
        let r = x(0).powi(2) + x(1).powi(2);
        let fields = [
            (r.clone() * -1.0).exp(),
            r.clone().sin(),
            (0.5 * x(0) + 0.25 * x(1)).cos() * (x(0) - 1.0).powi(2),
            (r.clone() + 1.0).recip(),
            (1.0 + 0.5 * (2.0 * x(0)).cos()) * (40.0 * x(1).sin() + 45.0).cos(),
        ];
        for e in fields {
            let f = BasisFn::new(2, e);
            fd_check(&f, &[0.3, -0.45]);
            fd_check(&f, &[-1.1, 0.8]);
        }
    }

    #[test]
    fn reciprocal_guard_reports_point() {
        let f = BasisFn::new(1, x(0).recip());
        match f.value(&[1e-9]) {
            Err(EvalError::Domain { x, .. }) => assert_eq!(x, vec![1e-9]),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(f.jet(&[0.0]).is_err());
        assert_eq!(f.value(&[4.0]).unwrap(), 0.25);
    }

    #[test]
    fn overflow_is_reported() {
        let f = BasisFn::new(1, x(0).exp());
        assert!(matches!(
            f.value(&[1000.0]),
            Err(EvalError::NonFinite { .. })
        ));
    }

    #[test]
    fn dimension_is_checked() {
        let f = BasisFn::new(2, x(1));
        assert_eq!(
            f.value(&[1.0]),
            Err(EvalError::Dimension {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    #[should_panic(expected = "uses x3")]
    fn out_of_range_variable_panics() {
        BasisFn::new(2, x(2));
    }

    #[test]
    fn pullback_transforms_derivatives() {
        let inner = BasisFn::shared(2, (x(0) - 2.0 * x(1)).powi(2) + x(0).exp());
        let s = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, -0.25, 2.0]);
        let f = LinearPullback::new(inner.clone(), s.clone());
        let p = [0.2, -0.4];
        let y = &s * DVector::from_column_slice(&p);
        assert_eq!(f.value(&p).unwrap(), inner.value(y.as_slice()).unwrap());
        fd_check(&f, &p);
    }
}
