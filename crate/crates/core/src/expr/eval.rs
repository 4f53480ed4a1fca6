use num_complex::Complex;
use thiserror::Error;

use super::ast::{Coord, FieldExpr, Func};
use crate::jet::{Jet, JetError, JetPoint};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{op} is singular at the base point in `{subexpr}`")]
    Domain { op: &'static str, subexpr: String },
    #[error("coordinate index {index} out of range for complex dimension {n}")]
    CoordinateOutOfRange { index: usize, n: usize },
    #[error("non-finite value in `{subexpr}`")]
    NonFinite { subexpr: String },
}

/// Jet of `expr` at the jet point's base, exact to truncation order.
pub fn eval_field<T: Scalar>(expr: &FieldExpr, jp: &JetPoint<T>) -> Result<Jet<T>, EvalError> {
    let j = eval_rec(expr, jp)?;
    let v = j.value();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(EvalError::NonFinite {
            subexpr: expr.to_string(),
        });
    }
    Ok(j)
}

fn domain<'a>(op: &'static str, e: &'a FieldExpr) -> impl FnOnce(JetError) -> EvalError + 'a {
    move |_| EvalError::Domain {
        op,
        subexpr: e.to_string(),
    }
}

fn eval_rec<T: Scalar>(expr: &FieldExpr, jp: &JetPoint<T>) -> Result<Jet<T>, EvalError> {
    let n = jp.n();
    let check = |k: usize| {
        if k == 0 || k > n {
            Err(EvalError::CoordinateOutOfRange { index: k, n })
        } else {
            Ok(())
        }
    };
    Ok(match expr {
        FieldExpr::Const(c) => jp.constant(Complex::new(T::lit(c.re), T::lit(c.im))),
        FieldExpr::Var(Coord::Z(k)) => {
            check(*k)?;
            jp.z(k - 1)
        }
        FieldExpr::Var(Coord::Zbar(k)) => {
            check(*k)?;
            jp.zbar(k - 1)
        }
        FieldExpr::Var(Coord::T) => jp.t().clone(),
        FieldExpr::Neg(a) => -eval_rec(a, jp)?,
        FieldExpr::Add(a, b) => eval_rec(a, jp)? + eval_rec(b, jp)?,
        FieldExpr::Sub(a, b) => eval_rec(a, jp)? - eval_rec(b, jp)?,
        FieldExpr::Mul(a, b) => eval_rec(a, jp)? * eval_rec(b, jp)?,
        FieldExpr::Div(a, b) => {
            let num = eval_rec(a, jp)?;
            let den = eval_rec(b, jp)?;
            num.div(&den).map_err(domain("division", b))?
        }
        FieldExpr::Pow(a, k) => eval_rec(a, jp)?.powi(*k).map_err(domain("negative power", a))?,
        FieldExpr::Call(func, a) => {
            let x = eval_rec(a, jp)?;
            match func {
                Func::Log => x.ln().map_err(domain("log", a))?,
                Func::Exp => x.exp(),
                Func::Re => x.re(),
                Func::Im => x.im(),
                Func::Abs2 => x.abs2(),
                Func::Conj => x.conj(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::seed_jet;

    #[test]
    fn t_is_coordinate_jet() {
        let jp = seed_jet(&[0.0, 0.0, 0.0], 2).unwrap();
        let j = eval_field(&FieldExpr::t(), &jp).unwrap();
        assert_eq!(j.coeff(&[0, 0, 1]).unwrap().re, 1.0);
    }

    #[test]
    fn abs2_polynomial_taylor() {
        let jp = seed_jet(&[1.0f64, 0.0, 0.0], 2).unwrap();
        let e = FieldExpr::z(1).abs2();
        let j = eval_field(&e, &jp).unwrap();
        assert!((j.value().re - 1.0).abs() < 1e-15);
        assert!((j.partial(&[1, 0, 0]).unwrap().re - 2.0).abs() < 1e-15);
        assert!((j.coeff(&[2, 0, 0]).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_at_zero_is_domain_error() {
        let jp = seed_jet(&[0.0, 0.0, 0.0], 2).unwrap();
        let e: FieldExpr = "log(re(z1))".parse().unwrap();
        match eval_field(&e, &jp) {
            Err(EvalError::Domain { op: "log", subexpr }) => assert_eq!(subexpr, "re(z1)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coordinate_out_of_range() {
        let jp = seed_jet(&[0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(
            eval_field(&FieldExpr::z(2), &jp).unwrap_err(),
            EvalError::CoordinateOutOfRange { index: 2, n: 1 }
        );
    }

    #[test]
    fn works_in_single_precision() {
        let jp = seed_jet(&[0.5f32, 0.25, 0.0], 2).unwrap();
        let e: FieldExpr = "exp(z1)*zbar1".parse().unwrap();
        let j = eval_field(&e, &jp).unwrap();
        let z = num_complex::Complex32::new(0.5, 0.25);
        assert!((j.value() - z.exp() * z.conj()).norm() < 1e-6);
    }
}
