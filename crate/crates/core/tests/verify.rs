mod common;

use common::parse;
use cr_mobius::expr::FieldExpr;
use cr_mobius::geometry::*;
use cr_mobius::solutions::{jl_field, JLParams};
use cr_mobius::verify::random::{jl_point, random_conformal, random_field, random_jl_params, random_point};
use cr_mobius::verify::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sphere_field(n: usize) -> (JLParams, FieldExpr) {
    let params = JLParams::new(c(1.0, 0.0), vec![c(0.0, 0.0); n], c(0.0, 1.0), 0.0);
    let f = jl_field(&params, n).unwrap();
    (params, f)
}

#[test]
fn bochner_examples_on_flat_model() {
    let h = make_heisenberg(2).unwrap();
    let p = [0.3, -0.2, 0.1, 0.4, 0.6];
    let s = bochner_sides(&h, &parse("re(z1)"), &p).unwrap();
    assert!(s.lhs.norm() < 1e-14 && s.rhs.norm() < 1e-14);
    assert!(bochner_residual(&h, &parse("abs2(z1)"), &p).unwrap() < 1e-7);
}

#[test]
fn bochner_on_polynomial_basket() {
    let basket = [
        "re(z1)", "abs2(z1)", "t", "re(z1)*t", "im(z2)^2*re(z1)", "t^2 + abs2(z2)", "re(z1)^3",
        "im(z1)*t*re(z2)", "abs2(z1)*abs2(z2)", "t*im(z1)^2 - re(z2)",
    ];
    let h = make_heisenberg(2).unwrap();
    let p = [0.1, -0.2, 0.3, 0.15, -0.05];
    for f in basket {
        assert!(bochner_residual(&h, &parse(f), &p).unwrap() < 1e-9, "{f}");
    }
}

#[test]
fn hamiltonian_lemma_for_sphere_exponent() {
    let (params, phi) = sphere_field(2);
    let h = make_heisenberg(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..10 {
        let set = hamiltonian_check(&h, &phi, &jl_point(&mut rng, &params, 0.1).unwrap()).unwrap();
        assert_eq!(set.checks.len(), 3);
        assert!(set.passed(), "{set:?}");
        assert!(set.checks.iter().all(|c| c.asserted));
    }
}

#[test]
fn hamiltonian_lemma_in_dimension_three() {
    let (params, phi) = sphere_field(1);
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let set = hamiltonian_check(&make_heisenberg(1).unwrap(), &phi, &jl_point(&mut rng, &params, 0.1).unwrap()).unwrap();
    let a = set.get("hamiltonian-infinitesimal-cr").unwrap();
    assert!(a.asserted && a.max_residual < 1e-8);
    assert!(!set.get("hamiltonian-reeb").unwrap().asserted);
    assert!(!set.get("hamiltonian-vector-field").unwrap().asserted);
}

#[test]
fn hamiltonian_of_constant_is_zero() {
    let set = hamiltonian_check(&make_heisenberg(2).unwrap(), &FieldExpr::real(1.0), &[0.1; 5]).unwrap();
    assert!(set.checks.iter().all(|c| c.max_residual == 0.0));
}

#[test]
fn torsion_rank_cases() {
    let (params, phi) = sphere_field(2);
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let samples: Vec<Vec<f64>> = (0..5).map(|_| jl_point(&mut rng, &params, 0.1).unwrap()).collect();
    let set = torsion_rank_check(&make_heisenberg(2).unwrap(), &phi, &samples).unwrap();
    assert_eq!(set.get("torsion-rank").unwrap().max_residual, 0.0);

    let rigid = levi_normalized(&make_rigid(2, parse("abs2(z1) + abs2(z1)^2/4")).unwrap()).unwrap();
    let datum = parse("-log(abs2(z1*(0.6-0.2i) + (1.1+0.4i)))/2");
    let samples: Vec<Vec<f64>> = (0..5).map(|_| random_point(&mut rng, 2)).collect();
    assert!(torsion_rank_check(&rigid, &datum, &samples).unwrap().passed());

    assert!(torsion_rank_check(&make_heisenberg(1).unwrap(), &phi, &samples).is_err());
    assert!(torsion_rank_check(&make_heisenberg(2).unwrap(), &phi, &[]).is_err());
}

#[test]
fn residual_sets_keep_the_worst_point() {
    let mut set = ResidualSet::default();
    set.record("x", 1e-12, &[0.0], 1e-9, true);
    set.record("x", 1e-10, &[1.0], 1e-9, true);
    set.record("x", 1e-11, &[2.0], 1e-9, true);
    let x = set.get("x").unwrap();
    assert_eq!(x.max_residual, 1e-10);
    assert_eq!(x.worst_point, vec![1.0]);
    assert!(set.passed());
    set.record("y", f64::NAN, &[0.0], 1.0, true);
    assert!(!set.passed());
}

#[test]
fn jerison_lee_suite_passes() {
    let r = run_suite(&SuiteConfig::new(ModelSpec::heisenberg(2), "jerison-lee", 20, 42)).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.suite, "jerison-lee");
    assert!(r.checks.iter().any(|c| c.name == "hamiltonian-vector-field"));
}

#[test]
fn commutation_suite_on_rigid_model() {
    let spec: ModelSpec = serde_json::from_str(r#"{"kind": "rigid", "n": 2, "Phi": "abs2(z1) + abs2(z1)^2/4"}"#).unwrap();
    let r = run_suite(&SuiteConfig::new(spec, "commutation", 10, 1)).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn whole_suite_on_conformal_model() {
    let spec: ModelSpec = serde_json::from_str(
        r#"{"kind": "conformal", "phi": "0.1*re(z1)*t - 0.2*abs2(z2)", "base": {"kind": "heisenberg", "n": 2}}"#,
    )
    .unwrap();
    let r = run_suite(&SuiteConfig::new(spec, "all", 5, 3)).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn suite_errors() {
    let bad = SuiteConfig::new(ModelSpec::heisenberg(2), "nosuch", 5, 0);
    assert!(matches!(run_suite(&bad), Err(SuiteError::UnknownCheck(_))));
    let none = SuiteConfig::new(ModelSpec::heisenberg(2), "structure", 0, 0);
    assert!(matches!(run_suite(&none), Err(SuiteError::NoSamples)));
    let mut tol = SuiteConfig::new(ModelSpec::heisenberg(2), "structure", 2, 0);
    tol.tolerances.insert("nosuch".into(), 1.0);
    assert!(run_suite(&tol).is_err());
    assert!(serde_json::from_str::<ModelSpec>(r#"{"kind": "heisenberg", "n": 2, "extra": 1}"#).is_err());
    let conformal: ModelSpec = serde_json::from_str(r#"{"kind": "conformal", "base": {"kind": "heisenberg", "n": 1}}"#).unwrap();
    assert!(conformal.build().is_err());
}

#[test]
fn tolerance_override_forces_failure() {
    let mut cfg = SuiteConfig::new(ModelSpec::heisenberg(1), "jets", 3, 0);
    cfg.tolerances.insert("jets-fd".into(), 1e-30);
    let r = run_suite(&cfg).unwrap();
    assert!(!r.passed());
}

#[test]
fn report_json_shape() {
    let r = run_suite(&SuiteConfig::new(ModelSpec::heisenberg(1), "structure", 2, 9)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["version", "model", "suite", "seed", "samples", "checks", "wall_ms"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let check = &v["checks"][0];
    for key in ["name", "max_residual", "tolerance", "pass", "worst_point"] {
        assert!(check.get(key).is_some(), "{key}");
    }
    let back: Report = serde_json::from_value(v).unwrap();
    assert_eq!(back, r);
}

#[test]
fn every_check_name_resolves() {
    for name in CHECKS {
        let r = run_suite(&SuiteConfig::new(ModelSpec::heisenberg(2), name, 1, 5)).unwrap();
        assert!(!r.checks.is_empty(), "{name}");
    }
    for (name, _) in SUITES {
        let cfg = SuiteConfig::new(ModelSpec::heisenberg(1), name, 1, 5);
        assert!(run_suite(&cfg).is_ok(), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn bochner_identity(seed in any::<u64>(), n in 1usize..=3, kind in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = make_heisenberg(n).unwrap();
        let m = match kind {
            0 => h,
            1 => make_rigid(n, parse("abs2(z1) + abs2(z1)^2/4")).unwrap(),
            _ => apply_conformal(&h, random_conformal(&mut rng, n)).unwrap(),
        };
        let f = random_field(&mut rng, n);
        prop_assert!(bochner_residual(&m, &f, &random_point(&mut rng, n)).unwrap() < 1e-6);
    }

    #[test]
    fn graham_lee_trace_identity(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_field(&mut rng, n);
        prop_assert!(graham_lee_residual(&make_heisenberg(n).unwrap(), &f, &random_point(&mut rng, n)).unwrap() < 1e-6);
    }

    #[test]
    fn hamiltonian_lemma_for_family(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_jl_params(&mut rng, n);
        let phi = jl_field(&params, n).unwrap();
        let p = jl_point(&mut rng, &params, 0.1).unwrap();
        let set = hamiltonian_check(&make_heisenberg(n).unwrap(), &phi, &p).unwrap();
        prop_assert!(set.passed(), "{:?}", set);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_deterministic_per_seed(seed in any::<u64>()) {
        let cfg = SuiteConfig::new(ModelSpec::heisenberg(2), "all", 2, seed);
        let a = run_suite(&cfg).unwrap().without_timing();
        let b = run_suite(&cfg).unwrap().without_timing();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
