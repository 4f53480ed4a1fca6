#![allow(dead_code)]

use cr_mobius::expr::{Coord, FieldExpr, Func};
use num_complex::Complex64;
use proptest::prelude::*;

pub fn parse(s: &str) -> FieldExpr {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn coord(n: usize) -> impl Strategy<Value = Coord> {
    prop_oneof![
        (1..=n).prop_map(Coord::Z),
        (1..=n).prop_map(Coord::Zbar),
        Just(Coord::T),
    ]
}

fn func() -> impl Strategy<Value = Func> {
    prop::sample::select(Func::ALL.to_vec())
}

/// Arbitrary ASTs of depth at most 6, including shapes the printer must parenthesize.
pub fn any_expr(n: usize) -> impl Strategy<Value = FieldExpr> {
    let number = prop_oneof![-1e3..1e3f64, Just(0.0), Just(1.5), Just(-2.0)];
    let leaf = prop_oneof![
        (number.clone(), number).prop_map(|(re, im)| FieldExpr::Const(Complex64::new(re, im))),
        (0.0..10.0f64).prop_map(|im| FieldExpr::Const(Complex64::new(0.0, im))),
        coord(n).prop_map(FieldExpr::Var),
    ];
    leaf.prop_recursive(5, 64, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| FieldExpr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FieldExpr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FieldExpr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FieldExpr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FieldExpr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), -4..=4i32).prop_map(|(a, k)| FieldExpr::Pow(Box::new(a), k)),
            (func(), inner).prop_map(|(f, a)| FieldExpr::Call(f, Box::new(a))),
        ]
    })
}

pub fn depth(e: &FieldExpr) -> usize {
    match e {
        FieldExpr::Const(_) | FieldExpr::Var(_) => 1,
        FieldExpr::Neg(a) | FieldExpr::Pow(a, _) | FieldExpr::Call(_, a) => 1 + depth(a),
        FieldExpr::Add(a, b) | FieldExpr::Sub(a, b) | FieldExpr::Mul(a, b) | FieldExpr::Div(a, b) => {
            1 + depth(a).max(depth(b))
        }
    }
}

/// Expressions that are smooth everywhere: logs and quotients only see `1 + abs2(.)`.
pub fn smooth_expr(n: usize) -> impl Strategy<Value = FieldExpr> {
    let leaf = prop_oneof![
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| FieldExpr::Const(Complex64::new(re, im))),
        coord(n).prop_map(FieldExpr::Var),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        let one = || FieldExpr::real(1.0);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| a / (one() + b.abs2())),
            (inner.clone(), 2..=3i32).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(move |a| (one() + a.abs2()).ln()),
            inner.clone().prop_map(|a| (a * FieldExpr::real(0.5)).exp()),
            inner.clone().prop_map(FieldExpr::re),
            inner.clone().prop_map(FieldExpr::im),
            inner.prop_map(FieldExpr::conj),
        ]
    })
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * n + 1)
}
