use friedrichs_lab::measure::{distribution, rearrange, RearrangementProfile, SampledFunction, SampledMeasureSpace};
use friedrichs_lab::ri_norms::{norm_eval, NormSpec, YoungFunction};
use proptest::prelude::*;

fn atoms() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..24).prop_flat_map(|k| (prop::collection::vec(0.05f64..3.0, k), prop::collection::vec(-4.0f64..4.0, k)))
}

fn profile(w: &[f64], v: &[f64]) -> RearrangementProfile {
    let space = SampledMeasureSpace::from_weights(w).unwrap();
    rearrange(&SampledFunction::new(&space, v.to_vec()).unwrap()).unwrap()
}

fn specs() -> Vec<NormSpec> {
    vec![
        NormSpec::lebesgue(1.0),
        NormSpec::lebesgue(2.5),
        NormSpec::LInf,
        NormSpec::lorentz(2.0, 1.0),
        NormSpec::lorentz(1.5, 3.0),
        NormSpec::lorentz(3.0, f64::INFINITY),
        NormSpec::lz(2.0, 2.0, 1.0),
        NormSpec::lz(3.0, 1.5, -0.5),
        NormSpec::OrliczYoung(YoungFunction::Power { p: 1.7 }),
        NormSpec::exp(2.0),
    ]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rearrangement_is_equimeasurable((w, v) in atoms(), tau in 0.0f64..4.0) {
        let space = SampledMeasureSpace::from_weights(&w).unwrap();
        let f = SampledFunction::new(&space, v.clone()).unwrap();
        let p = rearrange(&f).unwrap();
        prop_assert!(close(distribution(&f, tau).unwrap(), p.distribution(tau), 1e-12));
        prop_assert!(close(p.domain_length(), w.iter().sum(), 1e-12));
    }

    #[test]
    fn norms_ignore_atom_order((w, v) in atoms(), shift in 0usize..24) {
        let k = shift % w.len();
        let (mut w2, mut v2) = (w.clone(), v.clone());
        w2.rotate_left(k);
        v2.rotate_left(k);
        w2.reverse();
        v2.reverse();
        let (a, b) = (profile(&w, &v), profile(&w2, &v2));
        for s in specs() {
            prop_assert!(close(norm_eval(&s, &a).unwrap(), norm_eval(&s, &b).unwrap(), 1e-12), "{s}");
        }
    }

    #[test]
    fn norms_are_positively_homogeneous((w, v) in atoms(), c in -5.0f64..5.0) {
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        let (a, b) = (profile(&w, &v), profile(&w, &scaled));
        for s in specs() {
            let (na, nb) = (norm_eval(&s, &a).unwrap(), norm_eval(&s, &b).unwrap());
            prop_assert!(close(nb, c.abs() * na, 1e-9), "{s}: {nb} vs {}", c.abs() * na);
        }
    }

    #[test]
    fn norms_are_lattice_monotone((w, v) in atoms(), bump in prop::collection::vec(0.0f64..2.0, 24)) {
        let bigger: Vec<f64> = v.iter().zip(&bump).map(|(x, b)| x.signum() * (x.abs() + b)).collect();
        let (a, b) = (profile(&w, &v), profile(&w, &bigger));
        for s in specs() {
            prop_assert!(norm_eval(&s, &a).unwrap() <= norm_eval(&s, &b).unwrap() * (1.0 + 1e-12), "{s}");
        }
    }

    #[test]
    fn lebesgue_norms_grow_with_p_on_probability_spaces((w, v) in atoms()) {
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let p = profile(&w, &v);
        let mut prev = 0.0;
        for s in [NormSpec::lebesgue(1.0), NormSpec::lebesgue(1.5), NormSpec::lebesgue(2.0), NormSpec::lebesgue(4.0), NormSpec::LInf] {
            let n = norm_eval(&s, &p).unwrap();
            prop_assert!(n >= prev * (1.0 - 1e-12), "{s}: {n} < {prev}");
            prev = n;
        }
    }

    #[test]
    fn profile_csv_roundtrip((w, v) in atoms()) {
        let p = profile(&w, &v);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let back = RearrangementProfile::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.breakpoints(), p.breakpoints());
        prop_assert_eq!(back.values(), p.values());
    }
}

#[test]
fn indicator_norms() {
    let chi = RearrangementProfile::constant(1.0, 1.0).unwrap();
    assert!((norm_eval(&NormSpec::lorentz(2.0, 1.0), &chi).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(norm_eval(&NormSpec::LInf, &chi).unwrap(), 1.0);
    let half = RearrangementProfile::constant(3.0, 0.25).unwrap();
    assert!((norm_eval(&NormSpec::lebesgue(2.0), &half).unwrap() - 1.5).abs() < 1e-12);
}
