use imo::direction::{eval_model, newton_direction, steepest_direction, PointData, DEFAULT_TOL};
use imo::interval::compare_vectors;
use imo::problems::{corpus, get_problem};
use imo::solver::{criticality_certificate, solve, SolverParams, Termination};
use imo::{DominanceRelation, Interval};
use proptest::prelude::*;

fn interval() -> impl Strategy<Value = Interval> {
    (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)).unwrap())
}

proptest! {
    #[test]
    fn gh_difference_inverts_addition_of_degenerate(a in interval(), c in -1e3..1e3f64) {
        let shifted = a + Interval::degenerate(c).unwrap();
        let back = shifted.gh_difference(Interval::degenerate(c).unwrap()).unwrap();
        prop_assert!((back.lo() - a.lo()).abs() <= 1e-9);
        prop_assert!((back.hi() - a.hi()).abs() <= 1e-9);
    }

    #[test]
    fn gh_difference_is_antisymmetric(a in interval(), b in interval()) {
        let ab = a.gh_difference(b).unwrap();
        let ba = b.gh_difference(a).unwrap();
        prop_assert_eq!(ab, -ba);
    }

    #[test]
    fn moore_product_contains_point_products(a in interval(), b in interval(), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let x = a.lo() + s * a.width();
        let y = b.lo() + t * b.width();
        let p = a * b;
        prop_assert!(p.lo() <= x * y + 1e-9 && x * y <= p.hi() + 1e-9);
    }

    #[test]
    fn vector_comparison_flips(a in prop::collection::vec(interval(), 1..4), b in prop::collection::vec(interval(), 1..4)) {
        let n = a.len().min(b.len());
        let (a, b) = (&a[..n], &b[..n]);
        prop_assert_eq!(compare_vectors(a, b).flip(), compare_vectors(b, a));
        prop_assert_eq!(compare_vectors(a, a), DominanceRelation::Equal);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newton_direction_is_descent_or_zero(k in 0usize..20, s in prop::collection::vec(0.0..1.0f64, 8)) {
        let p = &corpus()[k];
        let x: Vec<f64> = (0..p.n).map(|r| p.lb[r] + s[r % s.len()] * (p.ub[r] - p.lb[r])).collect();
        if let Ok(data) = PointData::from_ivms(&p.objectives, &x) {
            let newton = newton_direction(&data, DEFAULT_TOL);
            prop_assert!(newton.xi <= 1e-8);
            if newton.xi < -1e-8 {
                for i in 0..p.m {
                    prop_assert!(eval_model(&data, i, &newton.v).upper < 0.0);
                }
            }
            // The steepest model has identity curvature, so its first-order
            // part must carry the decrease.
            let steepest = steepest_direction(&data, DEFAULT_TOL);
            prop_assert!(steepest.xi <= 1e-8);
            if steepest.xi < -1e-8 {
                for o in &data.objectives {
                    let first_order: f64 = (0..p.n)
                        .map(|r| {
                            let v = steepest.v[r];
                            0.5 * (o.grad_lo[r] + o.grad_hi[r]) * v
                                + 0.5 * (o.grad_hi[r] - o.grad_lo[r]) * v.abs()
                        })
                        .sum();
                    prop_assert!(first_order < 0.0);
                }
            }
        }
    }

    #[test]
    fn bk1_runs_end_critical_and_monotone(x1 in -10.0..10.0f64, x2 in -10.0..10.0f64) {
        let bk1 = get_problem("I-BK1").unwrap();
        let r = solve(&bk1, &[x1, x2], &SolverParams::default()).unwrap();
        prop_assert_eq!(r.status, Termination::Critical);
        for w in r.iterates.windows(2) {
            for (a, b) in w[0].g_values.iter().zip(&w[1].g_values) {
                prop_assert!(b.weakly_dominates(a));
            }
        }
        let cert = criticality_certificate(&bk1, &r.final_x, 1e-6).unwrap();
        prop_assert!(cert.is_critical);
    }
}

#[test]
fn steepest_and_newton_share_critical_points_on_portfolio() {
    let p = get_problem("portfolio").unwrap();
    for x0 in [0.0, 0.3, 0.9] {
        let newton = solve(&p, &[x0], &SolverParams::default()).unwrap();
        let steepest = solve(
            &p,
            &[x0],
            &SolverParams::default().with_direction(imo::solver::DirectionKind::SteepestDescent),
        )
        .unwrap();
        assert_eq!(newton.status, Termination::Critical);
        assert_eq!(steepest.status, Termination::Critical);
        for r in [&newton, &steepest] {
            assert!(
                criticality_certificate(&p, &r.final_x, 1e-6)
                    .unwrap()
                    .is_critical
            );
        }
    }
}
