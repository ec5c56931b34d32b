//! Brute-force minimizer of the scalarized model, for cross-checking the
//! barrier solver in low dimension.

use super::{scalarized_value, DirectionResult, DirectionStatus, PointData};
use crate::error::DirectionError;

/// Scans `[-radius, radius]^n` on a grid with `grid` points per axis, then
/// repeatedly halves the window around the best point and finishes with a
/// compass search. Halving (rather than zooming onto one cell) keeps narrow
/// curved valleys of the max-function inside the window.
pub fn oracle_direction(
    p: &PointData,
    radius: f64,
    grid: usize,
) -> Result<DirectionResult, DirectionError> {
    let n = p.n();
    if n == 0 || n > 3 {
        return Err(DirectionError::UnsupportedDimension { n });
    }
    assert!(
        radius > 0.0 && grid >= 3,
        "need a positive radius and at least 3 grid points"
    );
    let f = |v: &[f64]| scalarized_value(p, v);

    let mut best = vec![0.0; n];
    let mut best_val = f(&best);
    let mut center = vec![0.0; n];
    let mut half = radius;
    let mut points = grid;
    for _ in 0..100 {
        let step = 2.0 * half / (points - 1) as f64;
        let mut idx = vec![0usize; n];
        loop {
            let v: Vec<f64> = (0..n)
                .map(|r| center[r] - half + step * idx[r] as f64)
                .collect();
            let val = f(&v);
            if val < best_val {
                best_val = val;
                best = v;
            }
            let mut r = 0;
            while r < n {
                idx[r] += 1;
                if idx[r] < points {
                    break;
                }
                idx[r] = 0;
                r += 1;
            }
            if r == n {
                break;
            }
        }
        center.clone_from(&best);
        if points != 21 {
            half = (4.0 * step).min(half);
            points = 21;
        } else {
            half *= 0.5;
        }
        if half < 1e-12 * (1.0 + radius) {
            break;
        }
    }

    let nested = nested_golden(&f, n, radius);
    let nested_val = f(&nested);
    if nested_val < best_val {
        best_val = nested_val;
        best = nested;
    }

    let mut h = half.max(1e-6);
    let dirs = compass_directions(n);
    while h > 1e-13 {
        let mut improved = false;
        for d in &dirs {
            let v: Vec<f64> = best.iter().zip(d).map(|(b, di)| b + h * di).collect();
            let val = f(&v);
            if val < best_val {
                best_val = val;
                best = v;
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }

    let mut out = DirectionResult::zero(n, p.m(), DirectionStatus::Converged);
    out.u = best.iter().map(|v| v.abs()).collect();
    out.v = best;
    out.xi = best_val;
    out.tau = best_val;
    out.active_set = (0..p.m())
        .filter(|&i| super::eval_model(p, i, &out.v).upper >= best_val - super::ACTIVE_TOL)
        .collect();
    Ok(out)
}

/// Minimizes `f` over `[-radius, radius]^n` by nesting one-dimensional
/// golden-section searches, innermost coordinate last. Exact for convex `f`.
fn nested_golden(f: &dyn Fn(&[f64]) -> f64, n: usize, radius: f64) -> Vec<f64> {
    fn inner(f: &dyn Fn(&[f64]) -> f64, prefix: &mut Vec<f64>, n: usize, radius: f64) -> f64 {
        if prefix.len() == n {
            return f(prefix);
        }
        let value_at = |t: f64, prefix: &mut Vec<f64>| {
            prefix.push(t);
            let v = inner(f, prefix, n, radius);
            prefix.pop();
            v
        };
        let t = golden(|t| value_at(t, prefix), -radius, radius);
        value_at(t, prefix)
    }
    let mut point = Vec::with_capacity(n);
    while point.len() < n {
        let t = golden(
            |t| {
                let mut p = point.clone();
                p.push(t);
                inner(f, &mut p, n, radius)
            },
            -radius,
            radius,
        );
        point.push(t);
    }
    point
}

fn golden(mut g: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if gc <= gd {
        c
    } else {
        d
    }
}

/// Coordinate axes plus all diagonal sign patterns, normalized. In the plane
/// a finer fan of 32 directions is added.
fn compass_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    if n == 2 {
        for k in 0..32 {
            let a = std::f64::consts::TAU * k as f64 / 32.0;
            dirs.push(vec![a.cos(), a.sin()]);
        }
    }
    for r in 0..n {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[r] = s;
            dirs.push(d);
        }
    }
    for mask in 0..(1u32 << n) {
        let norm = (n as f64).sqrt();
        dirs.push(
            (0..n)
                .map(|r| {
                    if mask & (1 << r) != 0 {
                        -1.0 / norm
                    } else {
                        1.0 / norm
                    }
                })
                .collect(),
        );
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::ObjectiveData;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn rejects_large_dimension() {
        let p = PointData::new(DVector::zeros(4), vec![]).unwrap();
        assert_eq!(
            oracle_direction(&p, 1.0, 5).unwrap_err(),
            DirectionError::UnsupportedDimension { n: 4 }
        );
    }

    #[test]
    fn finds_one_dimensional_minimum() {
        let p = PointData::new(
            DVector::zeros(1),
            vec![ObjectiveData {
                grad_lo: DVector::from_vec(vec![-3.0]),
                grad_hi: DVector::from_vec(vec![-1.0]),
                hess_lo: DMatrix::from_element(1, 1, 1.0),
                hess_hi: DMatrix::from_element(1, 1, 3.0),
            }],
        )
        .unwrap();
        // For v > 0 the upper model is -2v + v + v^2 + 0.5v^2, minimized at v = 1/3.
        let d = oracle_direction(&p, 10.0, 2001).unwrap();
        assert!((d.v[0] - 1.0 / 3.0).abs() < 1e-6, "{:?}", d.v);
        assert!((d.xi + 1.0 / 6.0).abs() < 1e-12);
    }
}
