use friedrichs_lab::geometry::{builtin, lshape};
use friedrichs_lab::potential::{check_pointwise, parse_trial, riesz_potential, PointwiseConfig, PointwiseOrder};
use friedrichs_lab::Execution;

#[test]
fn empirical_constant_is_dilation_invariant() {
    let cases = [
        (PointwiseOrder::First, "lshape", "bump:2,0.2,0.3"),
        (PointwiseOrder::First, "comb:3,1,0.1", "linear:1,-2"),
        (PointwiseOrder::SecondGrad, "square", "poly:1,2,1,0;0.5,0,3,0"),
        (PointwiseOrder::Symmetric, "disk:96", "vec:bump:1,0.1,0|linear:0,1,0.5"),
    ];
    for (order, dom, u) in cases {
        let d = builtin(dom).unwrap();
        let u = parse_trial(u).unwrap();
        let cfg = PointwiseConfig { exec: Execution::Sequential, ..PointwiseConfig::new(d.diameter() / 24.0, 48) };
        let base = check_pointwise(order, &u, &d, &cfg).unwrap();
        for lambda in [0.25, 3.0] {
            let r = check_pointwise(order, &u.dilate(lambda), &d.dilate(lambda).unwrap(), &PointwiseConfig { h: cfg.h * lambda, ..cfg })
                .unwrap();
            assert_eq!(r.evaluated, base.evaluated, "{order} on {dom}");
            assert!((r.c_emp - base.c_emp).abs() <= 1e-6 * base.c_emp, "{order} on {dom}, λ = {lambda}: {} vs {}", r.c_emp, base.c_emp);
        }
    }
}

#[test]
fn policies_agree() {
    let d = lshape();
    let u = parse_trial("osc:2,1").unwrap();
    let cfg = PointwiseConfig::new(1.0 / 20.0, 32);
    let a = check_pointwise(PointwiseOrder::First, &u, &d, &PointwiseConfig { exec: Execution::Sequential, ..cfg }).unwrap();
    let b = check_pointwise(PointwiseOrder::First, &u, &d, &PointwiseConfig { exec: Execution::Parallel, ..cfg }).unwrap();
    assert_eq!(a.c_emp, b.c_emp);
}

#[test]
fn riesz_potential_of_constant_density_on_the_disk() {
    let d = builtin("disk:64").unwrap();
    let s = d.sample_interior(0.05).unwrap();
    let ones = vec![1.0; s.len()];
    let x = [[0.0; 3]];
    let vals: Vec<f64> =
        [0.0, 0.5, 1.0, 1.5].iter().map(|&b| riesz_potential(&s, &ones, b, &x, Execution::Sequential).unwrap()[0]).collect();
    for b in [0.0f64, 0.5, 1.0, 1.5] {
        let exact = 2.0 * std::f64::consts::PI / (2.0 - b);
        let got = riesz_potential(&s, &ones, b, &x, Execution::Sequential).unwrap()[0];
        assert!((got - exact).abs() / exact < 0.02, "β = {b}: {got} vs {exact}");
    }
    assert!(vals.windows(2).all(|w| w[0] < w[1]));
}
