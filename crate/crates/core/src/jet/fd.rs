use crate::expr::{eval_field, EvalError, FieldExpr};

use super::JetPoint;

fn value_at(expr: &FieldExpr, p: &[f64]) -> Result<num_complex::Complex64, EvalError> {
    let jp = JetPoint::seeded(p, 0).expect("point arity validated by caller");
    Ok(eval_field(expr, &jp)?.value())
}

/// `|central difference - jet derivative|` of order 1 or 2 along one real
/// coordinate, with steps 1e-5 and 1e-4 respectively.
pub fn fd_crosscheck(expr: &FieldExpr, p: &[f64], coordinate: usize, order: usize) -> Result<f64, EvalError> {
    assert!(order == 1 || order == 2, "finite-difference order must be 1 or 2");
    assert!(coordinate < p.len(), "coordinate index out of range");
    let jp = JetPoint::seeded(p, order).expect("point must have odd length >= 3");
    let jet = eval_field(expr, &jp)?;
    let mut m = vec![0u8; p.len()];
    m[coordinate] = order as u8;
    let exact = jet.partial(&m).expect("order within jet");
    let h = if order == 1 { 1e-5 } else { 1e-4 };
    let shifted = |s: f64| {
        let mut q = p.to_vec();
        q[coordinate] += s;
        value_at(expr, &q)
    };
    let approx = if order == 1 {
        (shifted(h)? - shifted(-h)?) / (2.0 * h)
    } else {
        (shifted(h)? - jet.value() * 2.0 + shifted(-h)?) / (h * h)
    };
    Ok((approx - exact).norm())
}
