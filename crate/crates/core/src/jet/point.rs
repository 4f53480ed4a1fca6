use num_complex::Complex;

use super::{Jet, JetError, MAX_INTERNAL_ORDER};
use crate::scalar::Scalar;

/// Highest order accepted by [`seed_jet`].
pub const MAX_SEED_ORDER: usize = 4;

/// Coordinate functions `(x1, y1, ..., xn, yn, t)` lifted to jets about a base point.
#[derive(Clone)]
pub struct JetPoint<T> {
    base: Vec<T>,
    order: usize,
    vars: Vec<Jet<T>>,
}

impl<T: Scalar> std::fmt::Debug for JetPoint<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JetPoint")
            .field("base", &self.base)
            .field("order", &self.order)
            .finish()
    }
}

/// Seeds coordinate jets at `p`, which must have length `2n + 1` with `n >= 1`.
pub fn seed_jet<T: Scalar>(p: &[T], order: usize) -> Result<JetPoint<T>, JetError> {
    if !(1..=MAX_SEED_ORDER).contains(&order) {
        return Err(JetError::OrderOutOfRange(order));
    }
    JetPoint::seeded(p, order)
}

impl<T: Scalar> JetPoint<T> {
    /// Like [`seed_jet`] but accepts orders up to [`MAX_INTERNAL_ORDER`].
    pub fn seeded(p: &[T], order: usize) -> Result<Self, JetError> {
        if order > MAX_INTERNAL_ORDER {
            return Err(JetError::OrderOutOfRange(order));
        }
        if p.len() < 3 || p.len() % 2 == 0 {
            return Err(JetError::BadPointArity(p.len()));
        }
        let nv = p.len();
        let vars = p
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let mut coeffs = vec![Complex::new(T::zero(), T::zero()); super::JetSpace::get(nv, order).len()];
                coeffs[0] = Complex::new(v, T::zero());
                if order >= 1 {
                    let idx = super::JetSpace::get(nv, order).unit_index(k);
                    coeffs[idx] = Complex::new(T::one(), T::zero());
                }
                Jet::from_coeffs(nv, order, coeffs)
            })
            .collect();
        Ok(JetPoint {
            base: p.to_vec(),
            order,
            vars,
        })
    }

    pub fn base(&self) -> &[T] {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Complex dimension `n`.
    pub fn n(&self) -> usize {
        (self.base.len() - 1) / 2
    }

    pub fn num_vars(&self) -> usize {
        self.base.len()
    }

    /// Real coordinate jet by raw index.
    pub fn var(&self, k: usize) -> &Jet<T> {
        &self.vars[k]
    }

    pub fn vars(&self) -> &[Jet<T>] {
        &self.vars
    }

    /// `x_k + i y_k`, with `k` zero-based.
    pub fn z(&self, k: usize) -> Jet<T> {
        let i = Complex::new(T::zero(), T::one());
        &self.vars[2 * k] + &self.vars[2 * k + 1].scale(i)
    }

    pub fn zbar(&self, k: usize) -> Jet<T> {
        let i = Complex::new(T::zero(), T::one());
        &self.vars[2 * k] - &self.vars[2 * k + 1].scale(i)
    }

    pub fn t(&self) -> &Jet<T> {
        &self.vars[self.base.len() - 1]
    }

    pub fn constant(&self, c: Complex<T>) -> Jet<T> {
        Jet::constant(self.num_vars(), self.order, c)
    }
}
