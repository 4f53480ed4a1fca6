use std::fmt;

use num_complex::Complex64;

use super::ast::{Coord, FieldExpr};

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const ATOM: u8 = 5;

fn prec(e: &FieldExpr) -> u8 {
    match e {
        FieldExpr::Add(..) | FieldExpr::Sub(..) => ADD,
        FieldExpr::Mul(..) | FieldExpr::Div(..) => MUL,
        FieldExpr::Neg(_) => NEG,
        FieldExpr::Pow(..) => 4,
        FieldExpr::Const(_) | FieldExpr::Var(_) | FieldExpr::Call(..) => ATOM,
    }
}

fn is_imaginary_literal(e: &FieldExpr) -> bool {
    matches!(e, FieldExpr::Const(c) if c.re == 0.0 && c.im > 0.0)
}

fn write_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    // adding 0.0 folds -0.0 into 0.0
    let (re, im) = (c.re + 0.0, c.im + 0.0);
    if im == 0.0 && re >= 0.0 {
        write!(f, "{re}")
    } else if re == 0.0 && im > 0.0 {
        write!(f, "{im}i")
    } else if im < 0.0 {
        write!(f, "({re}-{}i)", -im)
    } else {
        write!(f, "({re}+{im}i)")
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &FieldExpr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldExpr::Const(c) => write_const(f, *c),
            FieldExpr::Var(Coord::Z(k)) => write!(f, "z{k}"),
            FieldExpr::Var(Coord::Zbar(k)) => write!(f, "zbar{k}"),
            FieldExpr::Var(Coord::T) => write!(f, "t"),
            FieldExpr::Add(a, b) | FieldExpr::Sub(a, b) => {
                let op = if matches!(self, FieldExpr::Add(..)) { '+' } else { '-' };
                write_operand(f, a, prec(a) < ADD)?;
                write!(f, "{op}")?;
                // keeps "(2+3i)"-shaped sums from reading back as a literal
                write_operand(f, b, prec(b) <= ADD || is_imaginary_literal(b))
            }
            FieldExpr::Mul(a, b) | FieldExpr::Div(a, b) => {
                let op = if matches!(self, FieldExpr::Mul(..)) { '*' } else { '/' };
                write_operand(f, a, prec(a) < MUL)?;
                write!(f, "{op}")?;
                write_operand(f, b, prec(b) <= MUL)
            }
            FieldExpr::Neg(a) => {
                write!(f, "-")?;
                write_operand(f, a, prec(a) < NEG)
            }
            FieldExpr::Pow(a, k) => {
                write_operand(f, a, prec(a) < ATOM)?;
                write!(f, "^{k}")
            }
            FieldExpr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
