use nlqm_core::hilbert::{random_hermitian, state_from_bloch, BlochPoint};
use nlqm_core::nosignal::{
    affine_extension_scan, affinity_scan, certify, extremal_decomposition, gleason_certify, subspace_measure,
    GleasonConfig,
};
use nlqm_core::observables::{constant, custom, linear_combination, power, quadratic};
use nlqm_core::signaling::{exact_gap, search_signaling_scenario, Scenario};
use nlqm_core::{ComplexVector, CountingObservable, FunctionalObservable, PureState, Subspace, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Observables valued in `[0, 1]` with their known kind.
fn zoo(d: usize, r: &mut ChaCha8Rng) -> Vec<(&'static str, FunctionalObservable, bool)> {
    let p0 = PureState::basis(d, 0).unwrap().projector();
    let q = quadratic(random_hermitian(d, 0.0, 1.0, r).unwrap()).unwrap();
    let p = PureState::random(d, r).unwrap().projector();
    let e0 = PureState::basis(d, 0).unwrap();
    vec![
        ("quadratic", q.clone(), true),
        ("constant", constant(d, 0.5).unwrap(), true),
        ("projector", quadratic(p.clone()).unwrap(), true),
        (
            "mixture of quadratics",
            linear_combination(vec![(0.3, q.clone()), (0.7, quadratic(p.clone()).unwrap())]).unwrap(),
            true,
        ),
        ("square", power(p0.clone(), 2).unwrap(), false),
        ("cube", power(p.clone(), 3).unwrap(), false),
        (
            "quadratic plus square",
            linear_combination(vec![(0.5, q), (0.5, power(p0, 2).unwrap())]).unwrap(),
            false,
        ),
        (
            "sqrt overlap",
            custom(d, "sqrt overlap", move |psi: &PureState| psi.overlap(&e0).unwrap().sqrt(), r).unwrap(),
            false,
        ),
    ]
}

#[test]
fn affinity_scan_matches_ground_truth() {
    let mut r = rng(1);
    for (name, f, quad) in zoo(2, &mut r) {
        let cert = affinity_scan(&f, 300, 1e-9, 11, 2).unwrap();
        assert_eq!(cert.is_quadratic(), quad, "{name}: worst {}", cert.worst_violation);
    }
}

#[test]
fn gleason_matches_ground_truth() {
    let mut r = rng(2);
    for d in 3..=4 {
        for (name, f, quad) in zoo(d, &mut r) {
            let counting = CountingObservable::new(f, &mut r).unwrap();
            let cert = gleason_certify(&counting, &GleasonConfig::default(), 5, 2).unwrap();
            assert_eq!(cert.is_quadratic(), quad, "{name} d={d}: worst {}", cert.worst_violation);
        }
    }
}

#[test]
fn certify_dispatches_on_dimension() {
    let f = power(PureState::basis(2, 0).unwrap().projector(), 2).unwrap();
    let cert = certify(&f, 50, &GleasonConfig::default(), 0, 1).unwrap();
    assert_eq!(cert.verdict, Verdict::NonQuadratic);
    let g = quadratic(random_hermitian(3, 0.0, 1.0, &mut rng(3)).unwrap()).unwrap();
    let cert = certify(&g, 50, &GleasonConfig::default(), 0, 1).unwrap();
    assert!(cert.is_quadratic());
    assert!(cert.reconstructed.is_some());
    // Values outside [0, 1] are not a counting observable.
    let neg = constant(3, -1.0).unwrap();
    assert!(certify(&neg, 50, &GleasonConfig::default(), 0, 1).is_err());
}

#[test]
fn certifier_verdicts_match_signaling() {
    let mut r = rng(4);
    for d in [2, 3] {
        for (name, f, _) in zoo(d, &mut r) {
            let cert = certify(&f, 300, &GleasonConfig::default(), 7, 2).unwrap();
            if cert.is_quadratic() {
                for _ in 0..20 {
                    let da = r.random_range(2..=4);
                    let n = r.random_range(1..=da);
                    let sc = Scenario::random(da, n, f.clone(), &mut r).unwrap();
                    let gap = exact_gap(&sc).unwrap().gap;
                    assert!(gap.abs() < 1e-10, "{name} d={d}: gap {gap}");
                }
            } else {
                let (_, gap) = search_signaling_scenario(&f, 1000, 9).unwrap().unwrap();
                assert!(gap > cert.tolerance, "{name} d={d}: best gap {gap}");
            }
        }
    }
}

#[test]
fn affine_extension_agrees_with_affinity() {
    let mut r = rng(5);
    for (name, f, quad) in zoo(2, &mut r) {
        let cert = affine_extension_scan(&f, 300, 1e-9, 3, 2).unwrap();
        assert_eq!(cert.is_quadratic(), quad, "{name}: worst {}", cert.worst_violation);
    }
}

#[test]
fn extremal_decomposition_reproduces_mixture_values() {
    let mut r = rng(6);
    for _ in 0..10 {
        let f = quadratic(random_hermitian(2, -1.0, 1.0, &mut r).unwrap()).unwrap();
        let dec = extremal_decomposition(&f).unwrap();
        for _ in 0..100 {
            // Random interior point as a mixture of two pure points on a chord.
            let u = random_direction(&mut r);
            let v = random_direction(&mut r);
            let p: f64 = r.random();
            let x = u.scale(p) + v.scale(1.0 - p);
            let eval = |b: BlochPoint| -> f64 {
                let psi = PureState::new(state_from_bloch(b).unwrap()).unwrap();
                f.evaluate(&psi).unwrap()
            };
            let mixture = p * eval(u) + (1.0 - p) * eval(v);
            assert!((dec.phi(x).unwrap() - mixture).abs() < 1e-10);
        }
    }
}

fn random_direction(r: &mut ChaCha8Rng) -> BlochPoint {
    let v = nlqm_core::hilbert::random_unit_vector(2, r).unwrap();
    nlqm_core::hilbert::bloch_map(&v).unwrap()
}

#[test]
fn subspace_measure_is_trace_for_quadratic() {
    let mut r = rng(7);
    for d in 3..=6 {
        let g = random_hermitian(d, 0.0, 1.0, &mut r).unwrap();
        let f = CountingObservable::new(quadratic(g.clone()).unwrap(), &mut r).unwrap();
        for _ in 0..20 {
            let n = r.random_range(1..=d);
            let x = Subspace::random(d, n, &mut r).unwrap();
            let tr = g.try_mul(&x.projector()).unwrap().trace().re;
            assert!((subspace_measure(&f, &x).unwrap() - tr).abs() < 1e-10);
        }
    }
}

#[test]
fn certificates_round_trip_through_json() {
    let f = power(PureState::basis(3, 0).unwrap().projector(), 2).unwrap();
    let cert = certify(&f, 0, &GleasonConfig::default(), 4, 1).unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    let back: nlqm_core::Certificate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cert);

    let g = ComplexVector::from_real(&[1.0, 0.0]).unwrap();
    let h = quadratic(g.projector()).unwrap();
    let cert = affinity_scan(&h, 20, 1e-9, 4, 1).unwrap();
    let back: nlqm_core::Certificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert_eq!(back, cert);
}
