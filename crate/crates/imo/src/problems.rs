//! The test-problem registry: twenty box-constrained MIOPs, a reduced
//! two-asset portfolio problem, and the weighted-sum reference solutions for
//! I-BK1.
//!
//! Terms subtracted with the gH-difference in a problem statement are stored
//! as additions with a negated coefficient. Standalone interval constants are
//! terms whose basis function is identically one.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{BasisFn, Expr};
use crate::calculus::{Ivm, Term};
use crate::direction::PointData;
use crate::error::{EvalError, ProblemError};
use crate::interval::Interval;

/// Start point of the I-BK1 walkthrough.
pub const BK1_START: [f64; 2] = [9.9862, -7.4332];
/// Terminal iterate of the I-BK1 walkthrough.
pub const BK1_CRITICAL: [f64; 2] = [3.914930, 1.428474];

const PORTFOLIO: &str = "portfolio";

const NAMES: [&str; 21] = [
    "I-BK1",
    "I-VU2",
    "I-CH",
    "I-FON",
    "I-KW2",
    "I-Far1",
    "I-Hil1",
    "I-PNR",
    "I-Deb",
    "I-SD",
    "I-IKK1",
    "I-VFM1",
    "I-MHHM2",
    "I-Viennet",
    "I-AP1",
    "I-MOP7",
    "I-VFM2",
    "I-TR1",
    "I-AP4",
    "I-Comet",
    PORTFOLIO,
];

#[derive(Debug, Clone)]
pub struct ProblemDef {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub objectives: Vec<Ivm>,
}

/// Row of the `list` catalogue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogueEntry {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
}

impl ProblemDef {
    /// Panics if the bounds or objectives disagree on the dimension.
    pub fn new(name: &str, lb: Vec<f64>, ub: Vec<f64>, objectives: Vec<Ivm>) -> Self {
        let n = lb.len();
        assert_eq!(ub.len(), n);
        assert!(
            objectives.iter().all(|g| g.dim() == n),
            "{name}: objective dimension mismatch"
        );
        ProblemDef {
            name: name.to_string(),
            m: objectives.len(),
            n,
            lb,
            ub,
            objectives,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<Interval>, EvalError> {
        self.objectives.iter().map(|g| g.eval(x)).collect()
    }

    pub fn point_data(&self, x: &[f64]) -> Result<PointData, EvalError> {
        PointData::from_ivms(&self.objectives, x)
    }

    pub fn in_box(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.lb)
            .zip(&self.ub)
            .all(|((xi, lo), hi)| lo <= xi && xi <= hi)
    }

    /// The point as the problem's original formulation reports it. For the
    /// portfolio problem this appends the eliminated weight `x₂ = 1 − x₁`.
    pub fn reported_solution(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        if self.name == PORTFOLIO {
            out.push(1.0 - x[0]);
        }
        out
    }

    pub fn catalogue_entry(&self) -> CatalogueEntry {
        CatalogueEntry {
            name: self.name.clone(),
            m: self.m,
            n: self.n,
            lb: self.lb.clone(),
            ub: self.ub.clone(),
        }
    }

    /// Uniform point in the box.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lb
            .iter()
            .zip(&self.ub)
            .map(|(&lo, &hi)| rng.random_range(lo..=hi))
            .collect()
    }
}

pub fn names() -> &'static [&'static str] {
    &NAMES
}

/// The twenty test problems, without the portfolio problem.
pub fn corpus() -> Vec<ProblemDef> {
    NAMES[..20]
        .iter()
        .map(|name| get_problem(name).expect("registry name"))
        .collect()
}

pub fn get_problem(name: &str) -> Result<ProblemDef, ProblemError> {
    Ok(match name {
        "I-BK1" => bk1(),
        "I-VU2" => vu2(),
        "I-CH" => ch(),
        "I-FON" => fon(),
        "I-KW2" => kw2(),
        "I-Far1" => far1(),
        "I-Hil1" => hil1(),
        "I-PNR" => pnr(),
        "I-Deb" => deb(),
        "I-SD" => sd(),
        "I-IKK1" => ikk1(),
        "I-VFM1" => vfm1(),
        "I-MHHM2" => mhhm2(),
        "I-Viennet" => viennet(),
        "I-AP1" => ap1(),
        "I-MOP7" => mop7(),
        "I-VFM2" => vfm2(),
        "I-TR1" => tr1(),
        "I-AP4" => ap4(),
        "I-Comet" => comet(),
        PORTFOLIO => portfolio_problem(),
        _ => {
            return Err(ProblemError::Unknown {
                name: name.to_string(),
                valid: NAMES.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).expect("valid coefficient")
}

fn x(i: usize) -> Expr {
    Expr::var(i - 1)
}

fn one() -> Expr {
    Expr::constant(1.0)
}

fn sq(e: Expr) -> Expr {
    e.powi(2)
}

fn combo(n: usize, terms: Vec<(Interval, Expr)>) -> Ivm {
    Ivm::combination(
        n,
        terms
            .into_iter()
            .map(|(c, e)| Term::new(c, BasisFn::shared(n, e)))
            .collect(),
    )
}

fn bk1() -> ProblemDef {
    ProblemDef::new(
        "I-BK1",
        vec![-10.0; 2],
        vec![10.0; 2],
        vec![
            combo(2, vec![(iv(0.1, 0.2), sq(x(1))), (iv(0.1, 0.3), sq(x(2)))]),
            combo(
                2,
                vec![
                    (iv(0.1, 0.3), sq(x(1) - 5.0)),
                    (iv(0.1, 0.5), sq(x(2) - 5.0)),
                ],
            ),
        ],
    )
}

fn vu2() -> ProblemDef {
    ProblemDef::new(
        "I-VU2",
        vec![-4.0; 2],
        vec![4.0; 2],
        vec![
            combo(
                2,
                vec![
                    (iv(1.0, 1.5), x(1)),
                    (iv(1.0, 1.5), x(2)),
                    (iv(1.0, 1.0), one()),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(1.0, 1.5), sq(x(1))),
                    (iv(2.0, 3.0), sq(x(2))),
                    (iv(-1.0, -1.0), one()),
                ],
            ),
        ],
    )
}

fn ch() -> ProblemDef {
    ProblemDef::new(
        "I-CH",
        vec![-5.0, -4.0],
        vec![5.0, 4.0],
        vec![
            combo(
                2,
                vec![
                    (iv(1.0, 1.0), sq(x(1) - 1.0) + sq(x(2) - 2.0)),
                    (iv(-1.0, 1.0), one()),
                ],
            ),
            combo(
                2,
                vec![(iv(2.0, 3.0), sq(x(1)) - x(2)), (iv(-2.0, 2.0), one())],
            ),
        ],
    )
}

fn fon() -> ProblemDef {
    let s = FRAC_1_SQRT_2;
    ProblemDef::new(
        "I-FON",
        vec![-2.0; 2],
        vec![2.0; 2],
        vec![
            combo(
                2,
                vec![
                    (iv(1.0, 1.0), one()),
                    (iv(-3.0, -1.0), (-sq(x(1) - s) - sq(x(2) - s)).exp()),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(1.0, 1.0), one()),
                    (iv(-5.0, -1.0), (-sq(x(1) + s) - sq(x(2) + s)).exp()),
                ],
            ),
        ],
    )
}

fn kw2() -> ProblemDef {
    let g1 = combo(
        2,
        vec![
            (
                iv(-5.0, -3.0),
                sq(1.0 - x(1)) * (-sq(x(1)) - sq(x(2) + 1.0)).exp(),
            ),
            (
                iv(10.0, 10.0),
                (0.2 * x(1) - x(1).powi(3) - x(2).powi(5)) * (-sq(x(1)) - sq(x(2))).exp(),
            ),
            (iv(3.0, 5.0), (-sq(x(1) + 2.0) - sq(x(2))).exp()),
            (iv(-0.5, -0.5), 2.0 * x(1) + x(2)),
        ],
    );
    // The first term of G₂ depends on x₂ only.
    let g2 = combo(
        2,
        vec![
            (
                iv(-5.0, -3.0),
                sq(1.0 + x(2)) * (-sq(x(2)) - sq(1.0 - x(2))).exp(),
            ),
            (
                iv(10.0, 10.0),
                (-0.2 * x(2) + x(2).powi(3) + x(1).powi(5)) * (-sq(x(1)) - sq(x(2))).exp(),
            ),
            (iv(3.0, 5.0), (-sq(2.0 - x(2)) - sq(x(1))).exp()),
        ],
    );
    ProblemDef::new("I-KW2", vec![-3.0, -1.0], vec![0.0, 2.0], vec![g1, g2])
}

fn bump(k: f64, a: f64, b: f64) -> Expr {
    (k * (-sq(x(1) - a) - sq(x(2) - b))).exp()
}

fn far1() -> ProblemDef {
    ProblemDef::new(
        "I-Far1",
        vec![-1.0; 2],
        vec![1.0; 2],
        vec![
            combo(
                2,
                vec![
                    (iv(-2.0, -1.0), bump(15.0, 0.1, 0.0)),
                    (iv(-2.0, -1.0), bump(20.0, 0.6, 0.6)),
                    (iv(1.0, 3.0), bump(20.0, -0.6, 0.6)),
                    (iv(1.0, 2.0), bump(20.0, 0.6, -0.6)),
                    (iv(1.0, 2.0), bump(20.0, -0.6, -0.6)),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(2.0, 4.0), bump(20.0, 0.0, 0.0)),
                    (iv(1.0, 2.0), bump(20.0, 0.4, 0.6)),
                    (iv(-2.0, -1.0), bump(20.0, -0.5, 0.7)),
                    (iv(-2.0, -1.0), bump(20.0, 0.5, -0.7)),
                    (iv(1.0, 5.0), bump(20.0, -0.4, -0.8)),
                ],
            ),
        ],
    )
}

fn hil1() -> ProblemDef {
    let tau = 2.0 * PI;
    let radius = 1.0 + 0.5 * (tau * x(1)).cos();
    let angle = (tau / 360.0) * (45.0 + 40.0 * (tau * x(1)).sin() + 25.0 * (tau * x(2)).sin());
    ProblemDef::new(
        "I-Hil1",
        vec![-1.0; 2],
        vec![1.0; 2],
        vec![
            combo(
                2,
                vec![(iv(1.0, 2.0), radius.clone() * angle.clone().cos())],
            ),
            combo(2, vec![(iv(1.0, 3.0), radius * angle.sin())]),
        ],
    )
}

fn pnr() -> ProblemDef {
    ProblemDef::new(
        "I-PNR",
        vec![-2.0; 2],
        vec![2.0; 2],
        vec![
            combo(
                2,
                vec![
                    (iv(1.0, 1.5), x(1).powi(4) + x(2).powi(4)),
                    (iv(1.0, 2.6), sq(x(1)) + sq(x(2))),
                    (iv(10.0, 10.0), x(1) * x(2)),
                    (iv(0.25, 0.25), x(1)),
                    (iv(20.0, 24.0), one()),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(1.0, 2.0), sq(x(1) - 1.0)),
                    (iv(1.0, 1.5), sq(x(2))),
                    (iv(0.0, 2.0), one()),
                ],
            ),
        ],
    )
}

fn deb() -> ProblemDef {
    let inv = x(1).recip();
    ProblemDef::new(
        "I-Deb",
        vec![1.0, -1.0],
        vec![3.0, 1.0],
        vec![
            combo(2, vec![(iv(1.0, 2.0), x(1))]),
            combo(
                2,
                vec![
                    (iv(2.0, 2.0), inv.clone()),
                    (
                        iv(-3.0, -1.0),
                        inv.clone() * (-sq((x(2) - 0.2) * 250.0)).exp(),
                    ),
                    (iv(-1.5, -0.8), inv * (-sq((x(2) - 0.6) * 2.5)).exp()),
                ],
            ),
        ],
    )
}

fn sd() -> ProblemDef {
    let (r2, r3) = (SQRT_2, 3f64.sqrt());
    ProblemDef::new(
        "I-SD",
        vec![1.0, r2, r2, 1.0],
        vec![6.0; 4],
        vec![
            combo(
                4,
                vec![
                    (iv(2.0, 3.0), x(1)),
                    (iv(r2, r3), x(2)),
                    (iv(r2, r3), x(3)),
                    (iv(1.0, 3.0), x(4)),
                ],
            ),
            combo(
                4,
                vec![
                    (iv(2.0, 3.0), x(1).recip()),
                    (iv(2.0 * r2, 3.0 * r3), x(2).recip()),
                    (iv(2.0 * r2, 3.0 * r3), x(3).recip()),
                    (iv(2.0, 3.0), x(4).recip()),
                ],
            ),
        ],
    )
}

fn ikk1() -> ProblemDef {
    ProblemDef::new(
        "I-IKK1",
        vec![-50.0; 2],
        vec![50.0; 2],
        vec![
            combo(2, vec![(iv(1.0, 1.0), sq(x(1))), (iv(0.0, 1.0), sq(x(2)))]),
            combo(
                2,
                vec![
                    (iv(1.0, 1.0), sq(x(1) - 20.0)),
                    (iv(0.0, 1.0), sq(x(2) - 20.0)),
                ],
            ),
            combo(2, vec![(iv(0.0, 1.0), sq(x(1))), (iv(1.0, 1.0), sq(x(2)))]),
        ],
    )
}

fn vfm1() -> ProblemDef {
    ProblemDef::new(
        "I-VFM1",
        vec![-2.0; 2],
        vec![2.0; 2],
        vec![
            combo(
                2,
                vec![(iv(1.0, 2.0), sq(x(1))), (iv(1.0, 3.0), sq(x(2) - 1.0))],
            ),
            combo(
                2,
                vec![
                    (iv(1.0, 3.0), sq(x(1))),
                    (iv(1.0, 2.0), sq(x(2) + 1.0)),
                    (iv(1.0, 1.0), one()),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(1.0, 2.0), sq(x(1) - 1.0)),
                    (iv(1.0, 5.0), sq(x(2))),
                    (iv(2.0, 2.0), one()),
                ],
            ),
        ],
    )
}

fn mhhm2() -> ProblemDef {
    ProblemDef::new(
        "I-MHHM2",
        vec![0.0; 2],
        vec![1.0; 2],
        vec![
            combo(
                2,
                vec![
                    (iv(2.0, 3.0), sq(x(1) - 0.8)),
                    (iv(1.0, 2.0), sq(x(2) - 0.6)),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(1.0, 2.0), sq(x(1) - 0.85)),
                    (iv(1.0, 1.5), sq(x(2) - 0.7)),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(2.0, 2.5), sq(x(1) - 0.9)),
                    (iv(1.0, 1.2), sq(x(2) - 0.6)),
                ],
            ),
        ],
    )
}

fn viennet() -> ProblemDef {
    let r = || sq(x(1)) + sq(x(2));
    ProblemDef::new(
        "I-Viennet",
        vec![-3.0; 2],
        vec![3.0; 2],
        vec![
            combo(2, vec![(iv(0.5, 1.0), r()), (iv(1.0, 2.0), r().sin())]),
            combo(
                2,
                vec![
                    (iv(1.0 / 8.0, 0.25), sq(3.0 * x(1) - 2.0 * x(2) + 4.0)),
                    (iv(1.0 / 27.0, 1.0 / 9.0), sq(x(1) - x(2) + 1.0)),
                    (iv(15.0, 16.0), one()),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(0.25, 0.5), (r() + 1.0).recip()),
                    (iv(-1.1, -0.9), (-r()).exp()),
                ],
            ),
        ],
    )
}

fn ap1() -> ProblemDef {
    ProblemDef::new(
        "I-AP1",
        vec![-100.0; 2],
        vec![100.0; 2],
        vec![
            combo(
                2,
                vec![(
                    iv(0.25, 0.5),
                    (x(1) - 1.0).powi(4) + 2.0 * (x(2) - 2.0).powi(4),
                )],
            ),
            combo(
                2,
                vec![
                    (iv(1.0, 2.0), (0.5 * (x(1) + x(2))).exp()),
                    (iv(1.0, 1.5), sq(x(1)) + sq(x(2))),
                ],
            ),
            combo(
                2,
                vec![(iv(1.0 / 3.0, 0.5), (-x(1)).exp() + 2.0 * (-x(2)).exp())],
            ),
        ],
    )
}

fn mop7() -> ProblemDef {
    ProblemDef::new(
        "I-MOP7",
        vec![-400.0; 2],
        vec![400.0; 2],
        vec![
            combo(
                2,
                vec![
                    (iv(0.25, 0.5), sq(x(1) - 2.0)),
                    (iv(1.0 / 26.0, 1.0 / 13.0), sq(x(2) + 1.0)),
                    (iv(2.0, 3.0), one()),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(1.0 / 9.0, 0.25), sq(x(1) + x(2) - 3.0)),
                    (iv(1.0 / 16.0, 1.0 / 8.0), sq(-x(1) + x(2) + 2.0)),
                    (iv(-20.0, -17.0), one()),
                ],
            ),
            combo(
                2,
                vec![
                    (iv(1.0 / 25.0, 1.0 / 7.0), sq(x(1) + 2.0 * x(2) - 1.0)),
                    (iv(1.0 / 34.0, 1.0 / 17.0), sq(-x(1) + 2.0 * x(2))),
                    (iv(-15.0, -13.0), one()),
                ],
            ),
        ],
    )
}

fn vfm2() -> ProblemDef {
    ProblemDef::new(
        "I-VFM2",
        vec![-5.0; 3],
        vec![10.0; 3],
        vec![
            combo(
                3,
                vec![
                    (iv(0.1, 0.2), sq(x(1))),
                    (iv(0.1, 0.3), sq(x(2))),
                    (iv(0.1, 0.2), sq(x(3))),
                ],
            ),
            combo(
                3,
                vec![
                    (iv(0.1, 0.3), sq(x(1) - 5.0)),
                    (iv(0.1, 0.5), sq(x(2) - 5.0)),
                    (iv(0.1, 0.4), sq(x(3) - 5.0)),
                ],
            ),
            combo(
                3,
                vec![
                    (iv(0.1, 0.2), sq(x(1))),
                    (iv(-0.3, -0.1), sq(x(2))),
                    (iv(0.1, 0.2), sq(x(3))),
                ],
            ),
        ],
    )
}

fn tr1() -> ProblemDef {
    let cube = |i| x(i).powi(3);
    ProblemDef::new(
        "I-TR1",
        vec![1.0; 3],
        vec![4.0; 3],
        vec![
            combo(
                3,
                vec![
                    (iv(15.0, 30.0), one()),
                    (
                        iv(-0.3, -0.1),
                        cube(1) + sq(x(1)) * (1.0 + x(2) + x(3)) + cube(2) + cube(3),
                    ),
                ],
            ),
            combo(
                3,
                vec![
                    (iv(25.0, 45.0), one()),
                    (
                        iv(-0.2, -0.1),
                        cube(1) + 2.0 * cube(2) + sq(x(2)) * (2.0 + x(1) + x(3)) + cube(3),
                    ),
                ],
            ),
            combo(
                3,
                vec![
                    (iv(30.0, 60.0), one()),
                    (
                        iv(-0.3, -0.1),
                        cube(1) + cube(2) + 3.0 * cube(3) + sq(x(3)) * (3.0 + x(1) + x(2)),
                    ),
                ],
            ),
        ],
    )
}

fn ap4() -> ProblemDef {
    ProblemDef::new(
        "I-AP4",
        vec![-100.0; 3],
        vec![100.0; 3],
        vec![
            combo(
                3,
                vec![(
                    iv(1.0 / 9.0, 1.0 / 3.0),
                    (x(1) - 1.0).powi(4) + 2.0 * (x(2) - 2.0).powi(4) + 3.0 * (x(3) - 3.0).powi(4),
                )],
            ),
            combo(
                3,
                vec![
                    (iv(2.0, 3.0), ((x(1) + x(2) + x(3)) * (1.0 / 3.0)).exp()),
                    (iv(2.0, 5.0), sq(x(1)) + sq(x(2)) + sq(x(3))),
                ],
            ),
            combo(
                3,
                vec![(
                    iv(0.25, 1.0 / 3.0),
                    3.0 * (-x(1)).exp() + 4.0 * (-x(2)).exp() + 3.0 * (-x(3)).exp(),
                )],
            ),
        ],
    )
}

fn comet() -> ProblemDef {
    let lift = || 1.0 + x(3);
    let core = || x(1).powi(3) * sq(x(2)) - 10.0 * x(1);
    ProblemDef::new(
        "I-Comet",
        vec![1.0, -2.0, 0.0],
        vec![3.5, 2.0, 1.0],
        vec![
            combo(3, vec![(iv(1.0, 1.5), lift() * (core() - 4.0 * x(2)))]),
            combo(3, vec![(iv(1.0, 1.5), lift() * (core() + 4.0 * x(2)))]),
            combo(3, vec![(iv(0.2, 1.0), lift() * sq(x(1)))]),
        ],
    )
}

/// Two-asset mean-variance problem after eliminating `x₂ = 1 − x₁`; each
/// objective is given by its two boundary functions.
pub fn portfolio_problem() -> ProblemDef {
    let f = |e: Expr| BasisFn::shared(1, e);
    let quad = || 5.0 * sq(x(1)) - 6.0 * x(1);
    ProblemDef::new(
        PORTFOLIO,
        vec![0.0],
        vec![1.0],
        vec![
            Ivm::boundary_pair(f(3.0 * x(1) - 6.0), f(2.0 * x(1) - 4.0)),
            Ivm::boundary_pair(f(quad() + 2.0), f(quad() + 3.0)),
        ],
    )
}

/// Reference starting points and solutions of the portfolio problem.
pub const PORTFOLIO_TABLE: [(f64, [f64; 2]); 5] = [
    (0.0, [0.0, 1.0]),
    (0.25, [0.25, 0.75]),
    (0.5, [0.5, 0.5]),
    (0.75, [0.6, 0.4]),
    (1.0, [0.6, 0.4]),
];

/// Reference weighted-sum table for I-BK1: `(α, x, [G₁, G₂])` with intervals
/// as `[lo, hi]`.
pub const BK1_WEIGHTED_TABLE: [(f64, [f64; 2], [[f64; 2]; 2]); 11] = [
    (
        0.0,
        [0.000000, 0.000000],
        [[0.000000, 0.000000], [5.000000, 20.000000]],
    ),
    (
        0.1,
        [0.691498, 0.666658],
        [[0.092260, 0.228963], [3.734104, 14.957883]],
    ),
    (
        0.2,
        [1.326546, 1.285699],
        [[0.341274, 0.847851], [2.729029, 10.946295]],
    ),
    (
        0.3,
        [1.911783, 1.862051],
        [[0.712214, 1.771153], [1.938380, 7.784487]],
    ),
    (
        0.4,
        [2.452849, 2.399981],
        [[1.177638, 2.931263], [1.324898, 5.326893]],
    ),
    (
        0.5,
        [2.954564, 2.903207],
        [[1.715805, 4.274473], [0.858035, 3.453412]],
    ),
    (
        0.6,
        [3.421069, 3.374983],
        [[2.309422, 5.757895], [0.513370, 2.068246]],
    ),
    (
        0.7,
        [3.855945, 3.818168],
        [[2.944672, 7.347185], [0.270559, 1.091021]],
    ),
    (
        0.8,
        [4.262305, 4.628566],
        [[3.959086, 10.060535], [0.068215, 0.232240]],
    ),
    (
        0.9,
        [4.642862, 4.628566],
        [[4.297979, 10.738321], [0.026550, 0.107246]],
    ),
    (
        1.0,
        [5.000069, 5.000000],
        [[5.000069, 12.500138], [0.000000, 0.000000]],
    ),
];

/// Scalarized weights of the I-BK1 weighted-sum problem:
/// `(1−α)(a₁x₁² + a₂x₂²) + α(b₁(x₁−5)² + b₂(x₂−5)²)`.
const WEIGHTS: [f64; 4] = [0.15, 0.21667, 0.21667, 0.3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedSumSolution {
    pub alpha: f64,
    pub x: [f64; 2],
    pub g_values: [Interval; 2],
    /// The minimizer found by direct one-dimensional search.
    pub x_numeric: [f64; 2],
}

/// Closed-form minimizer of the weighted-sum scalarization of I-BK1,
/// cross-checked against a golden-section search on each coordinate.
pub fn bk1_weighted_solution(alpha: f64) -> Result<WeightedSumSolution, ProblemError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ProblemError::AlphaOutOfRange(alpha));
    }
    let x = [
        2.1667 * alpha / (0.3 + 0.13334 * alpha),
        3.0 * alpha / (0.43334 + 0.16666 * alpha),
    ];
    let [a1, a2, b1, b2] = WEIGHTS;
    let x1 = golden_section(
        |t| (1.0 - alpha) * a1 * t * t + alpha * b1 * (t - 5.0).powi(2),
        -10.0,
        10.0,
    );
    let x2 = golden_section(
        |t| (1.0 - alpha) * a2 * t * t + alpha * b2 * (t - 5.0).powi(2),
        -10.0,
        10.0,
    );
    let gap = (x[0] - x1).abs().max((x[1] - x2).abs());
    if gap > 1e-4 {
        return Err(ProblemError::WeightedSumMismatch(gap));
    }
    let g = bk1().eval(&x)?;
    Ok(WeightedSumSolution {
        alpha,
        x,
        g_values: [g[0], g[1]],
        x_numeric: [x1, x2],
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSample {
    pub points: Vec<(Vec<f64>, Vec<Interval>)>,
    pub skipped: usize,
}

/// Objective rectangles at `count` uniform box points.
pub fn sample_feasible_region(problem: &ProblemDef, count: usize, seed: u64) -> RegionSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = RegionSample {
        points: Vec::with_capacity(count),
        skipped: 0,
    };
    for _ in 0..count {
        let x = problem.sample(&mut rng);
        match problem.eval(&x) {
            Ok(g) => out.points.push((x, g)),
            Err(_) => out.skipped += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_twenty_one_entries() {
        assert_eq!(names().len(), 21);
        for name in names() {
            let p = get_problem(name).unwrap();
            assert_eq!(p.objectives.len(), p.m);
            assert!(p.lb.iter().zip(&p.ub).all(|(l, u)| l < u));
        }
        assert_eq!(corpus().len(), 20);
        assert!(corpus()
            .iter()
            .all(|p| p.objectives.iter().all(Ivm::is_combination)));
    }

    #[test]
    fn unknown_name_lists_valid_names() {
        let err = get_problem("bogus").unwrap_err();
        assert!(matches!(&err, ProblemError::Unknown { valid, .. } if valid.len() == 21));
        assert!(err.to_string().contains("I-Comet"));
    }

    #[test]
    fn bk1_values() {
        let p = get_problem("I-BK1").unwrap();
        assert_eq!((p.m, p.n), (2, 2));
        let g = p.eval(&[1.0, 2.0]).unwrap();
        // [0.1,0.2]·1 + [0.1,0.3]·4 and [0.1,0.3]·16 + [0.1,0.5]·9
        assert!((g[0].lo() - 0.5).abs() < 1e-12 && (g[0].hi() - 1.4).abs() < 1e-12);
        assert!((g[1].lo() - 2.5).abs() < 1e-12 && (g[1].hi() - 9.3).abs() < 1e-12);
    }

    #[test]
    fn sd_bounds() {
        let p = get_problem("I-SD").unwrap();
        assert_eq!(p.n, 4);
        assert_eq!(p.lb, vec![1.0, SQRT_2, SQRT_2, 1.0]);
        assert_eq!(p.ub, vec![6.0; 4]);
    }

    #[test]
    fn gh_difference_terms_are_negated_coefficients() {
        // I-FON at the bump centre: [1,1] ⊖ [1,3]·1 = [-2, 0].
        let s = FRAC_1_SQRT_2;
        let g = get_problem("I-FON").unwrap().eval(&[s, s]).unwrap();
        assert!((g[0].lo() + 2.0).abs() < 1e-12 && g[0].hi().abs() < 1e-12);
        let direct = Interval::new(1.0, 1.0)
            .unwrap()
            .gh_difference(Interval::new(1.0, 3.0).unwrap());
        assert_eq!(direct.unwrap(), g[0]);
    }

    #[test]
    fn portfolio_values() {
        let p = portfolio_problem();
        assert_eq!(
            (p.m, p.n, p.lb.clone(), p.ub.clone()),
            (2, 1, vec![0.0], vec![1.0])
        );
        let g = p.eval(&[0.0]).unwrap();
        assert_eq!((g[0].lo(), g[0].hi()), (-6.0, -4.0));
        let g = p.eval(&[0.6]).unwrap();
        assert!((g[1].lo() - 0.2).abs() < 1e-12 && (g[1].hi() - 1.2).abs() < 1e-12);
        assert_eq!(p.reported_solution(&[0.25]), vec![0.25, 0.75]);
    }

    #[test]
    fn weighted_sum_rows() {
        let s = bk1_weighted_solution(0.0).unwrap();
        assert_eq!(s.x, [0.0, 0.0]);
        assert_eq!((s.g_values[1].lo(), s.g_values[1].hi()), (5.0, 20.0));
        let s = bk1_weighted_solution(0.5).unwrap();
        assert!((s.x[0] - 2.954564).abs() < 1e-4 && (s.x[1] - 2.903207).abs() < 1e-4);
        let s = bk1_weighted_solution(1.0).unwrap();
        assert!((s.x[0] - 5.000069).abs() < 1e-3 && (s.x[1] - 5.0).abs() < 1e-3);
        assert!(matches!(
            bk1_weighted_solution(1.5),
            Err(ProblemError::AlphaOutOfRange(_))
        ));
    }

    #[test]
    fn region_samples() {
        let bk1 = get_problem("I-BK1").unwrap();
        assert_eq!(
            sample_feasible_region(&bk1, 1, 3),
            sample_feasible_region(&bk1, 1, 3)
        );
        let r = sample_feasible_region(&bk1, 5000, 1);
        assert!(r.points.iter().all(|(_, g)| g[0].lo() >= 0.0));
        let r = sample_feasible_region(&get_problem("I-Deb").unwrap(), 5000, 1);
        assert_eq!((r.skipped, r.points.len()), (0, 5000));
    }

    #[test]
    fn every_problem_evaluates_on_its_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in corpus() {
            for _ in 0..100 {
                let x = p.sample(&mut rng);
                p.eval(&x).unwrap_or_else(|e| panic!("{}: {e}", p.name));
            }
        }
    }
}
