mod common;

use common::parse;
use cr_mobius::expr::FieldExpr;
use cr_mobius::geometry::*;
use cr_mobius::schwarzian::schwarzian_at;
use cr_mobius::solutions::{jl_field, JLParams};
use cr_mobius::verify::random::{random_conformal, random_point};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quartic(n: usize) -> Model {
    make_rigid(n, parse("abs2(z1) + abs2(z1)^2/4")).unwrap()
}

fn jl_model(params: &JLParams, n: usize) -> Model {
    apply_conformal(&make_heisenberg(n).unwrap(), jl_field(params, n).unwrap()).unwrap()
}

fn sphere_params() -> JLParams {
    JLParams::new(c(1.0, 0.0), vec![c(0.0, 0.0); 2], I, 0.0)
}

fn max_abs4(t: &[Vec<Vec<Vec<Complex64>>>]) -> f64 {
    t.iter().flatten().flatten().flatten().fold(0.0, |m, v| m.max(v.norm()))
}

#[test]
fn flat_model_has_no_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=3 {
        let k = curvature_at(&make_heisenberg(n).unwrap(), &random_point(&mut rng, n)).unwrap();
        assert!(max_abs4(&k.riem) < 1e-14);
        assert!(k.ricci.iter().flatten().all(|v| v.norm() < 1e-14));
        assert!(k.scalar.abs() < 1e-14);
    }
}

#[test]
fn sphere_has_scalar_curvature_24() {
    let m = jl_model(&sphere_params(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let p = random_point(&mut rng, 2);
        let k = curvature_at(&m, &p).unwrap();
        assert!((k.scalar - 24.0).abs() < 1e-7, "{}", k.scalar);
        let f = scalar_curvature_formula(&m, &p).unwrap();
        assert!((f.via_formula - 24.0).abs() < 1e-7 && (f.direct - 24.0).abs() < 1e-7);
    }
}

#[test]
fn sphere_curvature_has_constant_curvature_shape() {
    let m = jl_model(&sphere_params(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let k = curvature_at(&m, &random_point(&mut rng, 2)).unwrap();
        assert!(k.fit.residual < 1e-7);
        // contracting eta (h h + h h) gives Ricci = (n+1) eta h and R = n(n+1) eta
        let eta = k.scalar / 6.0;
        for b in 0..2 {
            for a in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
                        let want = eta * (d(r, a) * d(b, s) + d(r, s) * d(b, a));
                        assert!((k.riem_lowered[b][a][r][s] - want).norm() < 1e-7);
                    }
                }
            }
        }
        assert!((k.fit.coefficient - eta).abs() < 1e-7);
    }
}

#[test]
fn negative_scalar_curvature_member() {
    let params = JLParams::new(c(0.0, 0.0), vec![c(2.0, 0.0), c(0.0, 0.0)], c(1.0, 0.0), 0.0);
    let m = jl_model(&params, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..10 {
        let p = random_point(&mut rng, 2);
        let f = scalar_curvature_formula(&m, &p).unwrap();
        assert!((f.direct + 24.0).abs() < 1e-7, "{}", f.direct);
        assert!((f.via_formula + 24.0).abs() < 1e-7);
    }
}

#[test]
fn scalar_formula_requires_flat_base() {
    let zero = apply_conformal(&make_heisenberg(2).unwrap(), FieldExpr::real(0.0)).unwrap();
    let f = scalar_curvature_formula(&zero, &[0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
    assert!(f.direct.abs() < 1e-14 && f.via_formula.abs() < 1e-14);
    let bad = apply_conformal(&quartic(2), FieldExpr::real(0.0)).unwrap();
    assert!(scalar_curvature_formula(&bad, &[0.1; 5]).is_err());
    assert!(scalar_curvature_formula(&make_heisenberg(2).unwrap(), &[0.1; 5]).is_err());
}

#[test]
fn curvature_identities_on_many_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for n in 1..=3 {
        let h = make_heisenberg(n).unwrap();
        let models = [
            apply_conformal(&h, random_conformal(&mut rng, n)).unwrap(),
            quartic(n),
            apply_conformal(&quartic(n), random_conformal(&mut rng, n)).unwrap(),
            make_rigid(n, parse("exp(re(z1))*abs2(z1) + abs2(z1)")).unwrap(),
        ];
        for m in &models {
            let k = curvature_at(m, &random_point(&mut rng, n)).unwrap();
            assert!(k.closure < 1e-7, "{} closure {:e}", m.describe(), k.closure);
            assert!(k.symmetry_residual() < 1e-8, "{}", m.describe());
            assert!(k.trace_chain_residual() < 1e-10, "{}", m.describe());
            assert!(k.chern_moser_trace() < 1e-8, "{}", m.describe());
            for a in 0..n {
                for b in 0..n {
                    assert!((k.ricci[a][b] - k.ricci[b][a].conj()).norm() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn zero_exponent_gives_zero_transform_residuals() {
    for m in [make_heisenberg(2).unwrap(), quartic(2)] {
        let r = conformal_transform_residuals(&m, &FieldExpr::real(0.0), &[0.3, -0.1, 0.2, 0.4, -0.5]).unwrap();
        assert!(r.max() < 1e-12, "{r:?}");
    }
}

#[test]
fn transform_laws_on_random_exponents() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for m in [make_heisenberg(2).unwrap(), quartic(2), make_heisenberg(1).unwrap(), quartic(3)] {
        for _ in 0..10 {
            let phi = random_conformal(&mut rng, m.n());
            let r = conformal_transform_residuals(&m, &phi, &random_point(&mut rng, m.n())).unwrap();
            assert_eq!(r.entries.len(), 3);
            assert!(r.max() < 1e-7, "{} {r:?}", m.describe());
        }
    }
}

#[test]
fn mobius_exponent_gives_pseudo_einstein_image() {
    let h = make_heisenberg(2).unwrap();
    let phi = jl_field(&sphere_params(), 2).unwrap();
    let m = apply_conformal(&h, phi.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for _ in 0..10 {
        let p = random_point(&mut rng, 2);
        let r = conformal_transform_residuals(&h, &phi, &p).unwrap();
        assert!(r.get("schouten").unwrap() < 1e-8);
        let k = curvature_at(&m, &p).unwrap();
        let tr = (k.schouten[0][0] + k.schouten[1][1]) / 2.0;
        let trace_free = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| (k.schouten[a][b] - if a == b { tr } else { c(0.0, 0.0) }).norm())
            .fold(0.0, f64::max);
        assert!(trace_free < 1e-8);
        assert!(schwarzian_at(&h, &phi, &p).unwrap().max_mixed() < 1e-8);
    }
}

#[test]
fn sphericity_is_conformally_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    for n in 2..=3 {
        let h = make_heisenberg(n).unwrap();
        for _ in 0..5 {
            let m = apply_conformal(&h, random_conformal(&mut rng, n)).unwrap();
            let k = curvature_at(&m, &random_point(&mut rng, n)).unwrap();
            assert!(k.chern_moser_norm() < 1e-7, "{:e}", k.chern_moser_norm());
        }
    }
}

#[test]
fn quartic_rigid_model_is_not_spherical() {
    let k = curvature_at(&quartic(2), &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(k.chern_moser_norm() > 1e-3, "{:e}", k.chern_moser_norm());
    assert!(k.eta.is_none());
}
