mod common;

use common::{parse, point, smooth_expr};
use cr_mobius::expr::{eval_field, EvalError, FieldExpr};
use cr_mobius::jet::{fd_crosscheck, seed_jet, wirtinger_coeff, Jet, JetError, JetPoint, JetSpace};
use num_complex::Complex64;
use proptest::prelude::*;

fn jet_of(s: &str, p: &[f64], order: usize) -> Jet<f64> {
    eval_field(&parse(s), &JetPoint::seeded(p, order).unwrap()).unwrap()
}

#[test]
fn seeding_places_unit_coefficients() {
    let jp = seed_jet(&[0.0, 0.0, 0.0], 2).unwrap();
    let t = jp.t();
    assert_eq!(t.value(), Complex64::new(0.0, 0.0));
    assert_eq!(t.coeff(&[0, 0, 1]).unwrap(), Complex64::new(1.0, 0.0));
    assert_eq!(t.coeff(&[1, 0, 0]).unwrap(), Complex64::new(0.0, 0.0));
    assert_eq!(t.coeff(&[0, 0, 2]).unwrap(), Complex64::new(0.0, 0.0));

    let jp = seed_jet(&[1.0, 2.0, 3.0], 1).unwrap();
    assert_eq!(jp.var(0).value(), Complex64::new(1.0, 0.0));
    assert_eq!(jp.var(2).value(), Complex64::new(3.0, 0.0));
}

#[test]
fn seeding_rejects_bad_input() {
    assert_eq!(seed_jet(&[0.0; 4], 2).unwrap_err(), JetError::BadPointArity(4));
    assert_eq!(seed_jet(&[0.0; 3], 0).unwrap_err(), JetError::OrderOutOfRange(0));
    assert_eq!(seed_jet(&[0.0; 3], 5).unwrap_err(), JetError::OrderOutOfRange(5));
}

#[test]
fn coordinate_jets() {
    let j = jet_of("t", &[0.0, 0.0, 0.0], 2);
    assert_eq!(j.partial(&[0, 0, 1]).unwrap(), Complex64::new(1.0, 0.0));
    assert!(j.coeffs().iter().filter(|c| c.norm() > 0.0).count() == 1);

    let j = jet_of("abs2(z1)", &[1.0, 0.0, 0.0], 2);
    assert_eq!(j.value(), Complex64::new(1.0, 0.0));
    assert_eq!(j.partial(&[1, 0, 0]).unwrap(), Complex64::new(2.0, 0.0));
    assert_eq!(j.coeff(&[2, 0, 0]).unwrap(), Complex64::new(1.0, 0.0));
    assert_eq!(j.coeff(&[0, 2, 0]).unwrap(), Complex64::new(1.0, 0.0));
}

#[test]
fn singular_log_is_a_domain_error() {
    let err = eval_field(&parse("log(re(z1))"), &JetPoint::seeded(&[0.0, 0.3, 0.1], 2).unwrap()).unwrap_err();
    match err {
        EvalError::Domain { subexpr, .. } => assert!(subexpr.contains("re(z1)")),
        other => panic!("unexpected {other:?}"),
    }
    assert!(eval_field(&parse("1/(z1-1)"), &JetPoint::seeded(&[1.0, 0.0, 0.0], 1).unwrap()).is_err());
}

#[test]
fn coordinate_out_of_range_is_reported() {
    let err = eval_field(&parse("z2"), &JetPoint::seeded(&[0.0; 3], 1).unwrap()).unwrap_err();
    assert!(matches!(err, EvalError::CoordinateOutOfRange { index: 2, n: 1 }));
}

#[test]
fn wirtinger_derivatives_of_basic_functions() {
    let p = [0.4, -0.7, 0.2];
    let one = Complex64::new(1.0, 0.0);
    let z = jet_of("z1", &p, 2);
    assert!((wirtinger_coeff(&z, &[1], &[0], 0).unwrap() - one).norm() < 1e-15);
    let zb = jet_of("zbar1", &p, 2);
    assert!(wirtinger_coeff(&zb, &[1], &[0], 0).unwrap().norm() < 1e-15);
    let r = jet_of("abs2(z1)", &p, 2);
    assert!((wirtinger_coeff(&r, &[1], &[1], 0).unwrap() - one).norm() < 1e-15);
    assert!(matches!(
        wirtinger_coeff(&r, &[2], &[1], 0),
        Err(JetError::OrderExceeded { requested: 3, order: 2 })
    ));
}

#[test]
fn single_precision_agrees_with_double() {
    let e = parse("exp(re(z1))*abs2(z2) - log(1 + t^2)/(2+1i)");
    let p = [0.3, -0.2, 0.5, 0.1, 0.7];
    let j64 = eval_field(&e, &JetPoint::<f64>::seeded(&p, 3).unwrap()).unwrap();
    let p32: Vec<f32> = p.iter().map(|&x| x as f32).collect();
    let j32 = eval_field(&e, &JetPoint::<f32>::seeded(&p32, 3).unwrap()).unwrap();
    for (a, b) in j64.coeffs().iter().zip(j32.coeffs()) {
        assert!((a.re - b.re as f64).abs() < 1e-5 && (a.im - b.im as f64).abs() < 1e-5);
    }
}

fn falling(a: u32, k: u32) -> f64 {
    (0..k).map(|i| (a - i) as f64).product()
}

fn random_jet(coeffs: &[(f64, f64)]) -> Jet<f64> {
    let c = coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    Jet::from_coeffs(5, 3, c)
}

fn jet_coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    let len = JetSpace::get(5, 3).len();
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), len)
}

fn max_rel_diff(a: &Jet<f64>, b: &Jet<f64>) -> f64 {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
        / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(a in jet_coeffs(), b in jet_coeffs(), c in jet_coeffs()) {
        let (a, b, c) = (random_jet(&a), random_jet(&b), random_jet(&c));
        prop_assert!(max_rel_diff(&(&(&a * &b) * &c), &(&a * &(&b * &c))) < 1e-12);
        prop_assert!(max_rel_diff(&(&a * &b), &(&b * &a)) < 1e-12);
        prop_assert!(max_rel_diff(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))) < 1e-12);
        prop_assert!(max_rel_diff(&(&(&a + &b) + &c), &(&a + &(&b + &c))) < 1e-12);
        let one = a.constant_like(Complex64::new(1.0, 0.0));
        prop_assert!(max_rel_diff(&(&a * &one), &a) < 1e-15);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn polynomials_give_exact_taylor_coefficients(
        terms in prop::collection::vec(((0u32..3, 0u32..3, 0u32..3), -2.0..2.0f64), 1..6),
        p in prop::collection::vec(-1.5..1.5f64, 3),
    ) {
        let x = FieldExpr::z(1).re();
        let y = FieldExpr::z(1).im();
        let mut e = FieldExpr::real(0.0);
        for &((a, b, c), k) in &terms {
            e = e + FieldExpr::real(k) * x.clone().powi(a as i32) * y.clone().powi(b as i32) * FieldExpr::t().powi(c as i32);
        }
        let j = eval_field(&e, &JetPoint::seeded(&p, 4).unwrap()).unwrap();
        for m in JetSpace::get(3, 4).monomials() {
            let expected: f64 = terms.iter().map(|&((a, b, c), k)| {
                let (mx, my, mt) = (m[0] as u32, m[1] as u32, m[2] as u32);
                if mx > a || my > b || mt > c {
                    return 0.0;
                }
                k * falling(a, mx) * p[0].powi((a - mx) as i32)
                    * falling(b, my) * p[1].powi((b - my) as i32)
                    * falling(c, mt) * p[2].powi((c - mt) as i32)
            }).sum();
            let got = j.partial(m).unwrap();
            prop_assert!((got.re - expected).abs() <= 1e-12 * expected.abs().max(1.0), "{m:?}: {got} vs {expected}");
            prop_assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn holomorphic_monomials_have_no_zbar_derivatives(
        a in 0u8..4, b in 0u8..4,
        c in (-2.0..2.0f64, -2.0..2.0f64),
        p in point(2),
    ) {
        let e = FieldExpr::constant(Complex64::new(c.0, c.1)) * FieldExpr::z(1).powi(a as i32) * FieldExpr::z(2).powi(b as i32);
        let j = eval_field(&e, &JetPoint::seeded(&p, 4).unwrap()).unwrap();
        for dzbar in [[1u8, 0], [0, 1], [1, 1], [2, 0]] {
            for dz in [[0u8, 0], [1, 0], [0, 2]] {
                prop_assert!(wirtinger_coeff(&j, &dz, &dzbar, 0).unwrap().norm() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn finite_differences_agree_with_jets(e in smooth_expr(2), p in point(2), coord in 0usize..5) {
        let j = eval_field(&e, &JetPoint::seeded(&p, 2).unwrap()).unwrap();
        // keeps roundoff in the second difference below the tolerance
        prop_assume!(j.max_abs() < 50.0);
        prop_assert!(fd_crosscheck(&e, &p, coord, 1).unwrap() < 1e-5);
        prop_assert!(fd_crosscheck(&e, &p, coord, 2).unwrap() < 1e-3);
    }
}
