//! Truncated multivariate Taylor expansions ("jets") in the real coordinates
//! `(x1, y1, ..., xn, yn, t)` of a model.
//!
//! Coefficients are stored as Taylor coefficients (partial derivative divided
//! by the multi-index factorial), so products are truncated convolutions.
//! Derivative normalization is applied only when values are extracted.

mod fd;
mod point;
mod space;
mod wirtinger;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;

pub use fd::fd_crosscheck;
pub use point::{seed_jet, JetPoint, MAX_SEED_ORDER};
pub use space::{JetSpace, MultiIndex, MAX_INTERNAL_ORDER};
pub use wirtinger::wirtinger_coeff;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet order {0} outside the supported range 1..=4")]
    OrderOutOfRange(usize),
    #[error("base point has length {0}; expected odd length 2n+1 with n >= 1")]
    BadPointArity(usize),
    #[error("requested derivative of total order {requested} exceeds jet order {order}")]
    OrderExceeded { requested: usize, order: usize },
    #[error("{op} is singular at the base point (value {value})")]
    Singular { op: &'static str, value: String },
    #[error("multi-index arity {got} does not match {expected}")]
    IndexArity { got: usize, expected: usize },
}

/// Truncated Taylor expansion of a complex-valued function of the real
/// coordinates about a fixed base point.
#[derive(Clone)]
pub struct Jet<T> {
    space: Arc<JetSpace>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order())
            .field("num_vars", &self.num_vars())
            .field("value", &self.value())
            .finish()
    }
}

fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Scalar> Jet<T> {
    pub fn zero(num_vars: usize, order: usize) -> Self {
        let space = JetSpace::get(num_vars, order);
        let coeffs = vec![czero(); space.len()];
        Jet { space, coeffs }
    }

    pub fn constant(num_vars: usize, order: usize, value: Complex<T>) -> Self {
        let mut j = Self::zero(num_vars, order);
        j.coeffs[0] = value;
        j
    }

    /// Constant with the same shape as `self`.
    pub fn constant_like(&self, value: Complex<T>) -> Self {
        let mut coeffs = vec![czero(); self.coeffs.len()];
        coeffs[0] = value;
        Jet {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn zero_like(&self) -> Self {
        self.constant_like(czero())
    }

    /// Builds a jet from explicit Taylor coefficients in the space's layout.
    pub fn from_coeffs(num_vars: usize, order: usize, coeffs: Vec<Complex<T>>) -> Self {
        let space = JetSpace::get(num_vars, order);
        assert_eq!(coeffs.len(), space.len(), "coefficient vector length");
        Jet { space, coeffs }
    }

    pub fn order(&self) -> usize {
        self.space.order()
    }

    pub fn num_vars(&self) -> usize {
        self.space.num_vars()
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Degree-0 coefficient: the value at the base point.
    pub fn value(&self) -> Complex<T> {
        self.coeffs[0]
    }

    /// Taylor coefficient of a monomial.
    pub fn coeff(&self, m: &[u8]) -> Result<Complex<T>, JetError> {
        self.check_index(m)?;
        Ok(self
            .space
            .index_of(m)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(czero))
    }

    /// Partial derivative `d^m f` at the base point (factorial restored).
    pub fn partial(&self, m: &[u8]) -> Result<Complex<T>, JetError> {
        self.check_index(m)?;
        let i = self.space.index_of(m).expect("index within order");
        Ok(self.coeffs[i] * T::lit(self.space.factorial(i)))
    }

    fn check_index(&self, m: &[u8]) -> Result<(), JetError> {
        if m.len() != self.num_vars() {
            return Err(JetError::IndexArity {
                got: m.len(),
                expected: self.num_vars(),
            });
        }
        let degree: usize = m.iter().map(|&e| e as usize).sum();
        if degree > self.order() {
            return Err(JetError::OrderExceeded {
                requested: degree,
                order: self.order(),
            });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    /// Drops all terms of degree above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let space = JetSpace::get(self.num_vars(), order);
        let coeffs = self.coeffs[..space.len()].to_vec();
        Jet { space, coeffs }
    }

    fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Complex conjugate. Exact coefficientwise since expansion variables are real.
    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn re(&self) -> Self {
        self.map(|c| Complex::new(c.re, T::zero()))
    }

    pub fn im(&self) -> Self {
        self.map(|c| Complex::new(c.im, T::zero()))
    }

    /// `|f|^2 = f * conj(f)`.
    pub fn abs2(&self) -> Self {
        self * &self.conj()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|c| c * s)
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.map(|c| c * s)
    }

    pub fn add_const(&self, s: Complex<T>) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] + s;
        out
    }

    /// `d/d(var)`; the result has order one less.
    pub fn derivative(&self, var: usize) -> Self {
        let order = self.order();
        assert!(order >= 1, "cannot differentiate an order-0 jet");
        let lower = JetSpace::get(self.num_vars(), order - 1);
        let mut shifted = vec![0u8; self.num_vars()];
        let coeffs = lower
            .monomials()
            .iter()
            .map(|m| {
                shifted.copy_from_slice(m);
                shifted[var] += 1;
                let src = self.space.index_of(&shifted).expect("shifted monomial within order");
                self.coeffs[src] * T::lit(shifted[var] as f64)
            })
            .collect();
        Jet {
            space: lower,
            coeffs,
        }
    }

    /// Evaluates `sum_k d_k h^k` with `h = self - value`, i.e. composes a
    /// univariate function with Taylor coefficients `d` about the base value.
    fn compose(&self, d: &[Complex<T>]) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = czero();
        let mut acc = self.constant_like(d[d.len() - 1]);
        for &dk in d[..d.len() - 1].iter().rev() {
            acc = &acc * &h;
            acc.coeffs[0] = acc.coeffs[0] + dk;
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let a = self.value().exp();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut fact = T::one();
        for k in 0..=self.order() {
            if k > 0 {
                fact = fact * T::lit(k as f64);
            }
            d.push(a / fact);
        }
        self.compose(&d)
    }

    /// Principal-branch logarithm.
    pub fn ln(&self) -> Result<Self, JetError> {
        let a = self.value();
        if a.norm() == T::zero() {
            return Err(JetError::Singular {
                op: "log",
                value: format!("{a}"),
            });
        }
        let mut d = vec![a.ln()];
        let inv = a.inv();
        let mut pow = Complex::new(T::one(), T::zero());
        for k in 1..=self.order() {
            pow = pow * inv;
            let sign = if k % 2 == 1 { T::one() } else { -T::one() };
            d.push(pow * (sign / T::lit(k as f64)));
        }
        Ok(self.compose(&d))
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let a = self.value();
        if a.norm() == T::zero() {
            return Err(JetError::Singular {
                op: "division",
                value: format!("{a}"),
            });
        }
        let inv = a.inv();
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut pow = inv;
        for k in 0..=self.order() {
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            d.push(pow * sign);
            pow = pow * inv;
        }
        Ok(self.compose(&d))
    }

    pub fn div(&self, other: &Self) -> Result<Self, JetError> {
        Ok(self * &other.recip()?)
    }

    pub fn powi(&self, k: i32) -> Result<Self, JetError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut out = self.constant_like(Complex::new(T::one(), T::zero()));
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(out)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }
}

fn lower_space(a: &Arc<JetSpace>, b: &Arc<JetSpace>) -> Arc<JetSpace> {
    assert_eq!(
        a.num_vars(),
        b.num_vars(),
        "jet arithmetic across different coordinate arities"
    );
    if a.order() <= b.order() {
        a.clone()
    } else {
        b.clone()
    }
}

impl<T: Scalar> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: Self) -> Jet<T> {
        let space = lower_space(&self.space, &rhs.space);
        let coeffs = self.coeffs[..space.len()]
            .iter()
            .zip(&rhs.coeffs[..space.len()])
            .map(|(a, b)| a + b)
            .collect();
        Jet { space, coeffs }
    }
}

impl<T: Scalar> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: Self) -> Jet<T> {
        let space = lower_space(&self.space, &rhs.space);
        let coeffs = self.coeffs[..space.len()]
            .iter()
            .zip(&rhs.coeffs[..space.len()])
            .map(|(a, b)| a - b)
            .collect();
        Jet { space, coeffs }
    }
}

impl<T: Scalar> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Self) -> Jet<T> {
        let space = lower_space(&self.space, &rhs.space);
        let mut coeffs = vec![czero(); space.len()];
        let (a, b) = (&self.coeffs, &rhs.coeffs);
        for &(i, j, k) in space.mul_table() {
            coeffs[k as usize] = coeffs[k as usize] + a[i as usize] * b[j as usize];
        }
        Jet { space, coeffs }
    }
}

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.map(|c| -c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Scalar> $tr<&Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: &Jet<T>) -> Jet<T> {
                (&self).$m(rhs)
            }
        }
        impl<T: Scalar> $tr<Jet<T>> for &Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

impl<T: Scalar> Mul<Complex<T>> for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Complex<T>) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> Mul<Complex<T>> for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Complex<T>) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Scalar> AddAssign<&Jet<T>> for Jet<T> {
    fn add_assign(&mut self, rhs: &Jet<T>) {
        if rhs.order() < self.order() {
            *self = self.truncate(rhs.order());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = *a + b;
        }
    }
}

impl<T: Scalar> SubAssign<&Jet<T>> for Jet<T> {
    fn sub_assign(&mut self, rhs: &Jet<T>) {
        if rhs.order() < self.order() {
            *self = self.truncate(rhs.order());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a = *a - b;
        }
    }
}
