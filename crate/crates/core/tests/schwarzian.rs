mod common;

use common::parse;
use cr_mobius::expr::FieldExpr;
use cr_mobius::geometry::*;
use cr_mobius::schwarzian::*;
use cr_mobius::solutions::{jl_field, JLParams};
use cr_mobius::verify::random::{jl_point, random_conformal, random_field, random_jl_params, random_point};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quartic(n: usize) -> Model {
    make_rigid(n, parse("abs2(z1) + abs2(z1)^2/4")).unwrap()
}

#[test]
fn linear_exponent_everywhere() {
    let m = make_heisenberg(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let samples: Vec<Vec<f64>> = (0..10).map(|_| random_point(&mut rng, 2)).collect();
    for p in &samples {
        let s = schwarzian_at(&m, &parse("re(z1)"), p).unwrap();
        assert!((s.b_holo[0][0] + 1.0).norm() < 1e-14);
        assert!(s.b_holo[0][1].norm() < 1e-14);
        assert!(s.max_mixed() < 1e-14);
        assert_eq!(s.frame, "heisenberg(n=2)");
    }
    let r = mobius_residual(&m, &parse("re(z1)"), &samples).unwrap();
    assert!((r.max_b - 1.0).abs() < 1e-14);
    assert!(!r.is_mobius(1e-9));
}

#[test]
fn constants_have_zero_schwarzian() {
    for n in 1..=3 {
        let s = schwarzian_at(&make_heisenberg(n).unwrap(), &FieldExpr::real(-1.25), &vec![0.2; 2 * n + 1]).unwrap();
        assert_eq!(s.max_abs(), 0.0);
    }
}

#[test]
fn sphere_exponent_is_mobius() {
    let params = JLParams::new(c(1.0, 0.0), vec![c(0.0, 0.0); 2], c(0.0, 1.0), 0.0);
    let phi = jl_field(&params, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let samples: Vec<Vec<f64>> = (0..50).map(|_| jl_point(&mut rng, &params, 0.1).unwrap()).collect();
    let r = mobius_residual(&make_heisenberg(2).unwrap(), &phi, &samples).unwrap();
    assert!(r.max_b < 1e-9 && r.max_p < 1e-9, "{r:?}");
    assert!(r.is_mobius(1e-9));
}

#[test]
fn three_dimensional_mobius_needs_pluriharmonicity() {
    let r = MobiusReport {
        max_b: 0.0,
        max_p: 1.0,
        worst_point: vec![0.0; 3],
        n: 1,
    };
    assert!(!r.is_mobius(1e-9));
    assert!(MobiusReport { n: 2, ..r }.is_mobius(1e-9));
}

#[test]
fn empty_sample_list_is_an_error() {
    assert!(mobius_residual(&make_heisenberg(1).unwrap(), &parse("re(z1)"), &[]).is_err());
}

#[test]
fn planar_mobius_datum_on_normalized_rigid_model() {
    let m = levi_normalized(&quartic(2)).unwrap();
    let phi = parse("-log(abs2(z1*(0.6-0.2i) + (1.1+0.4i)))/2");
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let samples: Vec<Vec<f64>> = (0..20).map(|_| random_point(&mut rng, 2)).collect();
    assert!(mobius_residual(&m, &phi, &samples).unwrap().max_b < 1e-8);
    // the same datum on the unnormalized model is not a solution
    assert!(mobius_residual(&quartic(2), &phi, &samples).unwrap().max_b > 1e-3);
}

#[test]
fn trivial_additivity_cases() {
    let m = make_heisenberg(2).unwrap();
    let p = [0.3, -0.2, 0.1, 0.4, 0.6];
    let phi = parse("0.3*re(z1)^2*t - 0.2*im(z2)");
    let zero = FieldExpr::real(0.0);
    assert!(additivity_residual(&m, &phi, &zero, &p).unwrap() < 1e-12);
    assert!(additivity_residual(&m, &zero, &phi, &p).unwrap() < 1e-12);
}

#[test]
fn composition_of_mobius_exponents() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for n in 1..=2 {
        let h = make_heisenberg(n).unwrap();
        for _ in 0..5 {
            let (a, b) = (random_jl_params(&mut rng, n), random_jl_params(&mut rng, n));
            let p = random_point(&mut rng, n);
            if a.g_at(&p).norm() < 0.1 || b.g_at(&p).norm() < 0.1 {
                continue;
            }
            let (fa, fb) = (jl_field(&a, n).unwrap(), jl_field(&b, n).unwrap());
            assert!(additivity_residual(&h, &fa, &fb, &p).unwrap() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn schwarzian_invariants(seed in any::<u64>(), n in 1usize..=3, kind in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = match kind {
            0 => make_heisenberg(n).unwrap(),
            1 => quartic(n),
            _ => apply_conformal(&make_heisenberg(n).unwrap(), random_conformal(&mut rng, n)).unwrap(),
        };
        let s = schwarzian_at(&m, &random_field(&mut rng, n), &random_point(&mut rng, n)).unwrap();
        prop_assert!(s.trace.norm() < 1e-10);
        prop_assert!(s.symmetry_residual() < 1e-10);
    }

    #[test]
    fn additivity(seed in any::<u64>(), n in 1usize..=2, rigid in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = if rigid { quartic(n) } else { make_heisenberg(n).unwrap() };
        let phi = random_conformal(&mut rng, n);
        let sigma = random_field(&mut rng, n);
        prop_assert!(additivity_residual(&m, &phi, &sigma, &random_point(&mut rng, n)).unwrap() < 1e-8);
    }

    #[test]
    fn torsion_link(seed in any::<u64>(), n in 1usize..=3, rigid in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = if rigid { quartic(n) } else { make_heisenberg(n).unwrap() };
        let phi = random_conformal(&mut rng, n);
        prop_assert!(torsion_link_residual(&m, &phi, &random_point(&mut rng, n)).unwrap() < 1e-9);
    }
}
