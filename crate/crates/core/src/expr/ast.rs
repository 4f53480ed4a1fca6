use std::collections::BTreeSet;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Coordinate atom. Indices are one-based, as written in source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Z(usize),
    Zbar(usize),
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Log,
    Exp,
    Re,
    Im,
    Abs2,
    Conj,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Log, Func::Exp, Func::Re, Func::Im, Func::Abs2, Func::Conj];

    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Re => "re",
            Func::Im => "im",
            Func::Abs2 => "abs2",
            Func::Conj => "conj",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldExpr {
    Const(Complex64),
    Var(Coord),
    Neg(Box<FieldExpr>),
    Add(Box<FieldExpr>, Box<FieldExpr>),
    Sub(Box<FieldExpr>, Box<FieldExpr>),
    Mul(Box<FieldExpr>, Box<FieldExpr>),
    Div(Box<FieldExpr>, Box<FieldExpr>),
    Pow(Box<FieldExpr>, i32),
    Call(Func, Box<FieldExpr>),
}

impl FieldExpr {
    pub fn constant(c: Complex64) -> Self {
        FieldExpr::Const(c)
    }

    pub fn real(x: f64) -> Self {
        FieldExpr::Const(Complex64::new(x, 0.0))
    }

    /// `z_k`, one-based.
    pub fn z(k: usize) -> Self {
        FieldExpr::Var(Coord::Z(k))
    }

    pub fn zbar(k: usize) -> Self {
        FieldExpr::Var(Coord::Zbar(k))
    }

    pub fn t() -> Self {
        FieldExpr::Var(Coord::T)
    }

    pub fn powi(self, k: i32) -> Self {
        FieldExpr::Pow(Box::new(self), k)
    }

    fn call(self, f: Func) -> Self {
        FieldExpr::Call(f, Box::new(self))
    }

    pub fn ln(self) -> Self {
        self.call(Func::Log)
    }

    pub fn exp(self) -> Self {
        self.call(Func::Exp)
    }

    pub fn re(self) -> Self {
        self.call(Func::Re)
    }

    pub fn im(self) -> Self {
        self.call(Func::Im)
    }

    pub fn abs2(self) -> Self {
        self.call(Func::Abs2)
    }

    pub fn conj(self) -> Self {
        self.call(Func::Conj)
    }

    /// All coordinate atoms referenced.
    pub fn coords(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        self.collect_coords(&mut out);
        out
    }

    fn collect_coords(&self, out: &mut BTreeSet<Coord>) {
        match self {
            FieldExpr::Const(_) => {}
            FieldExpr::Var(c) => {
                out.insert(*c);
            }
            FieldExpr::Neg(a) | FieldExpr::Pow(a, _) | FieldExpr::Call(_, a) => a.collect_coords(out),
            FieldExpr::Add(a, b) | FieldExpr::Sub(a, b) | FieldExpr::Mul(a, b) | FieldExpr::Div(a, b) => {
                a.collect_coords(out);
                b.collect_coords(out);
            }
        }
    }

    /// Largest complex coordinate index referenced (0 if none).
    pub fn max_index(&self) -> usize {
        self.coords()
            .into_iter()
            .map(|c| match c {
                Coord::Z(k) | Coord::Zbar(k) => k,
                Coord::T => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Whether the expression lies in the holomorphic subgrammar.
    pub fn is_holomorphic(&self) -> bool {
        match self {
            FieldExpr::Const(_) | FieldExpr::Var(Coord::Z(_)) => true,
            FieldExpr::Var(_) => false,
            FieldExpr::Neg(a) | FieldExpr::Pow(a, _) => a.is_holomorphic(),
            FieldExpr::Call(Func::Log | Func::Exp, a) => a.is_holomorphic(),
            FieldExpr::Call(..) => false,
            FieldExpr::Add(a, b) | FieldExpr::Sub(a, b) | FieldExpr::Mul(a, b) | FieldExpr::Div(a, b) => {
                a.is_holomorphic() && b.is_holomorphic()
            }
        }
    }
}

impl From<f64> for FieldExpr {
    fn from(x: f64) -> Self {
        FieldExpr::real(x)
    }
}

impl From<Complex64> for FieldExpr {
    fn from(c: Complex64) -> Self {
        FieldExpr::Const(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $variant:ident) => {
        impl<R: Into<FieldExpr>> $tr<R> for FieldExpr {
            type Output = FieldExpr;
            fn $m(self, rhs: R) -> FieldExpr {
                FieldExpr::$variant(Box::new(self), Box::new(rhs.into()))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        FieldExpr::Neg(Box::new(self))
    }
}

/// A [`FieldExpr`] restricted to constants, `z_k`, arithmetic, `exp` and `log`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicExpr(FieldExpr);

impl HolomorphicExpr {
    pub fn new(e: FieldExpr) -> Option<Self> {
        e.is_holomorphic().then_some(HolomorphicExpr(e))
    }

    pub fn expr(&self) -> &FieldExpr {
        &self.0
    }

    pub fn into_inner(self) -> FieldExpr {
        self.0
    }
}

impl TryFrom<FieldExpr> for HolomorphicExpr {
    type Error = FieldExpr;
    fn try_from(e: FieldExpr) -> Result<Self, FieldExpr> {
        if e.is_holomorphic() {
            Ok(HolomorphicExpr(e))
        } else {
            Err(e)
        }
    }
}
