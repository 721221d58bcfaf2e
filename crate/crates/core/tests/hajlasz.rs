use friedrichs_lab::hajlasz::{lipschitz_quotient_gradient, min_slack, minimal_upper_gradient, BoundaryTrace, LpOptions, Objective};
use friedrichs_lab::Execution;
use proptest::prelude::*;

fn circle(k: usize) -> Vec<[f64; 3]> {
    (0..k)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / k as f64;
            [a.cos(), a.sin(), 0.0]
        })
        .collect()
}

fn values(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, k)
}

fn opts() -> LpOptions {
    LpOptions { exec: Execution::Sequential, ..LpOptions::default() }
}

fn best(pts: &[[f64; 3]], v: Vec<f64>, obj: Objective) -> f64 {
    minimal_upper_gradient(&BoundaryTrace::unweighted(pts.to_vec(), v).unwrap(), obj, &opts()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn minimal_gradient_is_homogeneous(v in values(12), c in -3.0f64..3.0) {
        let pts = circle(12);
        for obj in [Objective::Sup, Objective::Integral] {
            let a = best(&pts, v.clone(), obj);
            let b = best(&pts, v.iter().map(|x| c * x).collect(), obj);
            prop_assert!((b - c.abs() * a).abs() <= 1e-7 * (1.0 + a), "{obj:?}: {b} vs {}", c.abs() * a);
        }
    }

    #[test]
    fn minimal_gradient_is_subadditive(v in values(12), w in values(12)) {
        let pts = circle(12);
        let sum: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        for obj in [Objective::Sup, Objective::Integral] {
            let (a, b, s) = (best(&pts, v.clone(), obj), best(&pts, w.clone(), obj), best(&pts, sum.clone(), obj));
            prop_assert!(s <= a + b + 1e-7, "{obj:?}: {s} > {a} + {b}");
        }
    }

    #[test]
    fn optimum_is_feasible_and_beats_the_quotient(v in values(10)) {
        let tr = BoundaryTrace::unweighted(circle(10), v).unwrap();
        let q = lipschitz_quotient_gradient(&tr).unwrap();
        prop_assert!(min_slack(&tr, &q) >= -1e-12);
        let g = minimal_upper_gradient(&tr, Objective::Sup, &opts()).unwrap();
        prop_assert!(g.min_slack >= -1e-9);
        prop_assert!(g.value <= q.iter().copied().fold(0.0, f64::max) + 1e-9);
    }
}

#[test]
fn constants_need_no_gradient() {
    let tr = BoundaryTrace::unweighted(circle(8), vec![3.0; 8]).unwrap();
    assert_eq!(minimal_upper_gradient(&tr, Objective::Integral, &opts()).unwrap().value, 0.0);
}
