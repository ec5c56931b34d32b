//! Log-barrier interior-point method for
//!
//! ```text
//! min τ  s.t.  cᵢᵀv + dᵢᵀu + vᵀAᵢv + uᵀBᵢu ≤ τ,   −u ≤ v ≤ u
//! ```
//!
//! `u` only exists for coordinates that enter some `dᵢ` or `Bᵢ`. The problem
//! is rescaled so that `v`, `u` and `τ` are of order one before solving.

use nalgebra::{DMatrix, DVector};

use super::{DirectionStatus, QuadModel};

/// Multiplier applied to `t` after each centering (barrier weight × 0.2).
const T_GROWTH: f64 = 5.0;
const CENTERING_TOL: f64 = 1e-10;
const ARMIJO: f64 = 0.25;

pub(super) struct BarrierOutput {
    pub v: Vec<f64>,
    pub status: DirectionStatus,
    pub kkt_residual: f64,
    pub newton_steps: usize,
}

struct Scaled {
    c: DVector<f64>,
    d: DVector<f64>,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

struct Problem<'a> {
    n: usize,
    coupled: &'a [usize],
    models: Vec<Scaled>,
}

impl Problem<'_> {
    fn k(&self) -> usize {
        self.coupled.len()
    }

    fn dim(&self) -> usize {
        self.n + self.k() + 1
    }

    fn split(&self, z: &DVector<f64>) -> (DVector<f64>, DVector<f64>, f64) {
        let v = z.rows(0, self.n).into_owned();
        let u = z.rows(self.n, self.k()).into_owned();
        (v, u, z[self.n + self.k()])
    }

    /// Constraint values `q_i(z) < 0` and slacks `u_j ∓ v_j > 0`.
    fn residuals(&self, z: &DVector<f64>) -> (Vec<f64>, Vec<f64>) {
        let (v, u, tau) = self.split(z);
        let q = self
            .models
            .iter()
            .map(|s| s.c.dot(&v) + s.d.dot(&u) + v.dot(&(&s.a * &v)) + u.dot(&(&s.b * &u)) - tau)
            .collect();
        let mut slack = Vec::with_capacity(2 * self.k());
        for (jj, &j) in self.coupled.iter().enumerate() {
            slack.push(u[jj] - v[j]);
            slack.push(u[jj] + v[j]);
        }
        (q, slack)
    }

    fn strictly_feasible(&self, z: &DVector<f64>) -> bool {
        let (q, slack) = self.residuals(z);
        q.iter().all(|&x| x < 0.0) && slack.iter().all(|&x| x > 0.0)
    }

    fn barrier(&self, t: f64, z: &DVector<f64>) -> f64 {
        let (q, slack) = self.residuals(z);
        if q.iter().any(|&x| x >= 0.0 || x.is_nan())
            || slack.iter().any(|&x| x <= 0.0 || x.is_nan())
        {
            return f64::INFINITY;
        }
        t * z[self.dim() - 1]
            - q.iter().map(|x| (-x).ln()).sum::<f64>()
            - slack.iter().map(|x| x.ln()).sum::<f64>()
    }

    fn grad_hess(&self, t: f64, z: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let (n, k, dim) = (self.n, self.k(), self.dim());
        let (v, u, _) = self.split(z);
        let (q, slack) = self.residuals(z);
        let mut g = DVector::zeros(dim);
        let mut h = DMatrix::zeros(dim, dim);
        g[dim - 1] = t;
        for (s, &qi) in self.models.iter().zip(&q) {
            let mut dq = DVector::zeros(dim);
            dq.rows_mut(0, n).copy_from(&(&s.c + &s.a * &v * 2.0));
            dq.rows_mut(n, k).copy_from(&(&s.d + &s.b * &u * 2.0));
            dq[dim - 1] = -1.0;
            let w = -1.0 / qi;
            g.axpy(w, &dq, 1.0);
            h.ger(w * w, &dq, &dq, 1.0);
            h.view_mut((0, 0), (n, n))
                .zip_apply(&s.a, |hij, aij| *hij += 2.0 * w * aij);
            h.view_mut((n, n), (k, k))
                .zip_apply(&s.b, |hij, bij| *hij += 2.0 * w * bij);
        }
        for (jj, &j) in self.coupled.iter().enumerate() {
            let (minus, plus) = (slack[2 * jj], slack[2 * jj + 1]);
            // -log(u - v): gradient (v: +1/s, u: -1/s)
            g[j] += 1.0 / minus;
            g[n + jj] -= 1.0 / minus;
            // -log(u + v): gradient (v: -1/s, u: -1/s)
            g[j] -= 1.0 / plus;
            g[n + jj] -= 1.0 / plus;
            let (a, b) = (1.0 / (minus * minus), 1.0 / (plus * plus));
            h[(j, j)] += a + b;
            h[(n + jj, n + jj)] += a + b;
            h[(j, n + jj)] += b - a;
            h[(n + jj, j)] += b - a;
        }
        (g, h)
    }
}

fn newton_step(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = h.diagonal().amax().max(f64::MIN_POSITIVE);
    let mut jitter = 0.0;
    for _ in 0..30 {
        let hj = if jitter > 0.0 {
            h + DMatrix::identity(h.nrows(), h.ncols()) * jitter
        } else {
            h.clone()
        };
        if let Some(ch) = hj.cholesky() {
            let step = ch.solve(&(-g));
            if step.iter().all(|x| x.is_finite()) {
                return Some(step);
            }
        }
        jitter = if jitter == 0.0 {
            1e-14 * scale
        } else {
            jitter * 10.0
        };
    }
    None
}

/// Length scale of the solution: the largest single-objective Newton step.
fn length_scale(models: &[QuadModel]) -> f64 {
    let mut r: f64 = 0.0;
    for q in models {
        let (c, a) = (q.c.amax(), q.a.amax());
        if c == 0.0 || a == 0.0 {
            continue;
        }
        let rough = 0.5 * c / a;
        let step = q.a.clone().cholesky().map(|ch| 0.5 * ch.solve(&q.c).amax());
        r = r.max(match step {
            Some(s) if s.is_finite() => s.min(1e6 * rough),
            _ => rough,
        });
    }
    if r == 0.0 && models.iter().any(|q| q.c.amax() > 0.0) {
        r = 1.0;
    }
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

pub(super) fn solve(
    models: &[QuadModel],
    coupled: &[usize],
    tol: f64,
    max_steps: usize,
) -> BarrierOutput {
    let n = models.first().map_or(0, |q| q.c.len());
    let trivial = |status| BarrierOutput {
        v: vec![0.0; n],
        status,
        kkt_residual: 0.0,
        newton_steps: 0,
    };

    let r = length_scale(models);
    if r == 0.0 {
        return trivial(DirectionStatus::Converged);
    }
    let sub = |m: &DMatrix<f64>| {
        DMatrix::from_fn(coupled.len(), coupled.len(), |i, j| {
            m[(coupled[i], coupled[j])]
        })
    };
    let sub_v =
        |v: &DVector<f64>| DVector::from_iterator(coupled.len(), coupled.iter().map(|&j| v[j]));
    let mut s: f64 = 0.0;
    for q in models {
        s = s
            .max(r * q.c.amax())
            .max(r * q.d.amax())
            .max(r * r * q.a.amax())
            .max(r * r * q.b.amax());
    }
    if !(s > 0.0 && s.is_finite()) {
        return trivial(DirectionStatus::Converged);
    }
    let problem = Problem {
        n,
        coupled,
        models: models
            .iter()
            .map(|q| Scaled {
                c: &q.c * (r / s),
                d: sub_v(&q.d) * (r / s),
                a: &q.a * (r * r / s),
                b: sub(&q.b) * (r * r / s),
            })
            .collect(),
    };

    let dim = problem.dim();
    let mut z = DVector::zeros(dim);
    z.rows_mut(n, coupled.len()).fill(1.0);
    let (q0, _) = problem.residuals(&z);
    z[dim - 1] = q0.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) + 1.0;

    let constraints = (models.len() + 2 * coupled.len()) as f64;
    let mut t = 1.0;
    let mut steps = 0;
    let mut status = DirectionStatus::Converged;
    let mut stationarity;
    'outer: loop {
        loop {
            let (g, h) = problem.grad_hess(t, &z);
            stationarity = g.amax() / t;
            let Some(dz) = newton_step(&h, &g) else {
                break;
            };
            let decrement = -g.dot(&dz);
            if decrement * 0.5 <= CENTERING_TOL {
                break;
            }
            if steps >= max_steps {
                status = DirectionStatus::MaxIterations;
                break 'outer;
            }
            steps += 1;
            let f0 = problem.barrier(t, &z);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial = &z + &dz * alpha;
                if problem.strictly_feasible(&trial) {
                    let pure_newton = decrement < 0.0625;
                    if pure_newton || problem.barrier(t, &trial) <= f0 - ARMIJO * alpha * decrement
                    {
                        z = trial;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let gap = constraints / t;
        if gap <= tol {
            break;
        }
        t *= T_GROWTH;
    }

    let (v, _, _) = problem.split(&z);
    BarrierOutput {
        v: (v * r).as_slice().to_vec(),
        status,
        kkt_residual: (constraints / t).max(stationarity),
        newton_steps: steps,
    }
}
