use num_complex::Complex;

use super::{Jet, JetError};
use crate::scalar::Scalar;

/// Coefficients `c[p]` of `dx^p dy^(a+b-p)` in `(½(dx - i dy))^a (½(dx + i dy))^b`.
fn operator_poly<T: Scalar>(a: usize, b: usize) -> Vec<Complex<T>> {
    let half = T::lit(0.5);
    let i = Complex::new(T::zero(), T::one());
    let d_z = [-i * half, Complex::new(half, T::zero())];
    let d_zbar = [i * half, Complex::new(half, T::zero())];
    // index p = power of dx
    let mut poly = vec![Complex::new(T::one(), T::zero())];
    let factors = std::iter::repeat(d_z).take(a).chain(std::iter::repeat(d_zbar).take(b));
    for f in factors {
        let mut next = vec![Complex::new(T::zero(), T::zero()); poly.len() + 1];
        for (p, &c) in poly.iter().enumerate() {
            next[p] = next[p] + c * f[0];
            next[p + 1] = next[p + 1] + c * f[1];
        }
        poly = next;
    }
    poly
}

/// Mixed Wirtinger / `t` partial derivative at the base point:
/// `d_z^dz d_zbar^dzbar d_t^dt f`, with factorials restored.
pub fn wirtinger_coeff<T: Scalar>(
    j: &Jet<T>,
    dz: &[u8],
    dzbar: &[u8],
    dt: u8,
) -> Result<Complex<T>, JetError> {
    let n = (j.num_vars() - 1) / 2;
    if dz.len() != n || dzbar.len() != n {
        return Err(JetError::IndexArity {
            got: dz.len().max(dzbar.len()),
            expected: n,
        });
    }
    let degree = dz.iter().chain(dzbar).map(|&e| e as usize).sum::<usize>() + dt as usize;
    if degree > j.order() {
        return Err(JetError::OrderExceeded {
            requested: degree,
            order: j.order(),
        });
    }
    let mut terms: Vec<(Vec<u8>, Complex<T>)> = vec![(Vec::new(), Complex::new(T::one(), T::zero()))];
    for k in 0..n {
        let (a, b) = (dz[k] as usize, dzbar[k] as usize);
        let poly = operator_poly::<T>(a, b);
        let mut next = Vec::with_capacity(terms.len() * poly.len());
        for (m, c) in &terms {
            for (p, &pc) in poly.iter().enumerate() {
                if pc.re == T::zero() && pc.im == T::zero() {
                    continue;
                }
                let mut m2 = m.clone();
                m2.push(p as u8);
                m2.push((a + b - p) as u8);
                next.push((m2, *c * pc));
            }
        }
        terms = next;
    }
    let mut total = Complex::new(T::zero(), T::zero());
    for (mut m, c) in terms {
        m.push(dt);
        total = total + c * j.partial(&m)?;
    }
    Ok(total)
}
