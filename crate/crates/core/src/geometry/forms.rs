//! Jet-valued vector fields and differential forms in coordinate components.

use num_complex::Complex64;

use crate::jet::Jet;

type J = Jet<f64>;

fn sum_jets(mut terms: impl Iterator<Item = J>) -> J {
    let first = terms.next().expect("at least one term");
    terms.fold(first, |acc, t| acc + t)
}

/// `sum_i v^i d/dx^i`.
#[derive(Debug, Clone)]
pub struct VectorField(pub Vec<J>);

impl VectorField {
    pub fn zero(num_vars: usize, order: usize) -> Self {
        VectorField(vec![J::zero(num_vars, order); num_vars])
    }

    /// Constant coordinate field with the given components.
    pub fn constant(num_vars: usize, order: usize, comps: &[Complex64]) -> Self {
        VectorField(comps.iter().map(|&c| J::constant(num_vars, order, c)).collect())
    }

    /// Directional derivative `V f`; the result loses one order.
    pub fn apply(&self, f: &J) -> J {
        sum_jets(
            self.0
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| c * &f.derivative(i))
                .chain(std::iter::once(J::zero(f.num_vars(), f.order() - 1))),
        )
    }

    pub fn conj(&self) -> Self {
        VectorField(self.0.iter().map(J::conj).collect())
    }

    pub fn scale(&self, s: &J) -> Self {
        VectorField(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        VectorField(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.0.iter().map(J::value).collect()
    }
}

/// `sum_i a_i dx^i`.
#[derive(Debug, Clone)]
pub struct OneForm(pub Vec<J>);

impl OneForm {
    pub fn zero(num_vars: usize, order: usize) -> Self {
        OneForm(vec![J::zero(num_vars, order); num_vars])
    }

    pub fn constant(num_vars: usize, order: usize, comps: &[Complex64]) -> Self {
        OneForm(comps.iter().map(|&c| J::constant(num_vars, order, c)).collect())
    }

    pub fn eval(&self, v: &VectorField) -> J {
        sum_jets(self.0.iter().zip(&v.0).map(|(a, b)| a * b))
    }

    pub fn conj(&self) -> Self {
        OneForm(self.0.iter().map(J::conj).collect())
    }

    pub fn scale(&self, s: &J) -> Self {
        OneForm(self.0.iter().map(|c| c * s).collect())
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        OneForm(self.0.iter().map(|c| c.scale(s)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        OneForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        OneForm(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(J::is_zero)
    }

    /// Exterior derivative.
    pub fn d(&self) -> TwoForm {
        let nv = self.0.len();
        let mut out = TwoForm::zero(nv, self.0[0].order() - 1);
        for i in 0..nv {
            for j in i + 1..nv {
                out.set(i, j, self.0[j].derivative(i) - self.0[i].derivative(j));
            }
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> TwoForm {
        let nv = self.0.len();
        let order = self.0[0].order().min(other.0[0].order());
        let mut out = TwoForm::zero(nv, order);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for i in 0..nv {
            for j in i + 1..nv {
                out.set(i, j, &self.0[i] * &other.0[j] - &self.0[j] * &other.0[i]);
            }
        }
        out
    }
}

/// `sum_{i<j} a_ij dx^i ^ dx^j`.
#[derive(Debug, Clone)]
pub struct TwoForm {
    num_vars: usize,
    comps: Vec<J>,
}

impl TwoForm {
    pub fn zero(num_vars: usize, order: usize) -> Self {
        TwoForm {
            num_vars,
            comps: vec![J::zero(num_vars, order); num_vars * (num_vars - 1) / 2],
        }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * (2 * self.num_vars - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> J {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.comps[self.slot(i, j)].clone(),
            Greater => -&self.comps[self.slot(j, i)],
            Equal => self.comps[0].zero_like(),
        }
    }

    fn set(&mut self, i: usize, j: usize, v: J) {
        let s = self.slot(i, j);
        self.comps[s] = v;
    }

    pub fn eval(&self, u: &VectorField, v: &VectorField) -> J {
        let mut acc = self.comps[0].zero_like();
        for i in 0..self.num_vars {
            for j in i + 1..self.num_vars {
                let c = &self.comps[self.slot(i, j)];
                if c.is_zero() {
                    continue;
                }
                acc += &(c * &(&u.0[i] * &v.0[j] - &u.0[j] * &v.0[i]));
            }
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        TwoForm {
            num_vars: self.num_vars,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        TwoForm {
            num_vars: self.num_vars,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &J) -> Self {
        TwoForm {
            num_vars: self.num_vars,
            comps: self.comps.iter().map(|c| c * s).collect(),
        }
    }

    /// Largest component modulus at the base point.
    pub fn max_abs_value(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.value().norm()))
    }
}

/// Inverse of a square matrix of jets by Gauss–Jordan elimination, pivoting
/// on base-point magnitude. Returns `None` if singular at the base point.
pub fn invert(m: &[Vec<J>]) -> Option<Vec<Vec<J>>> {
    let n = m.len();
    let proto = &m[0][0];
    let one = proto.constant_like(Complex64::new(1.0, 0.0));
    let mut a: Vec<Vec<J>> = m.to_vec();
    let mut inv: Vec<Vec<J>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { one.clone() } else { proto.zero_like() }).collect())
        .collect();
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |s, x| s.max(x.value().norm()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col]
                .value()
                .norm()
                .total_cmp(&a[j][col].value().norm())
        })?;
        if a[piv][col].value().norm() <= 1e-14 * scale.max(1.0) {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let r = a[col][col].recip().ok()?;
        for k in 0..n {
            a[col][k] = &a[col][k] * &r;
            inv[col][k] = &inv[col][k] * &r;
        }
        for row in 0..n {
            if row == col || a[row][col].is_zero() {
                continue;
            }
            let f = a[row][col].clone();
            for k in 0..n {
                let da = &f * &a[col][k];
                a[row][k] -= &da;
                let di = &f * &inv[col][k];
                inv[row][k] -= &di;
            }
        }
    }
    Some(inv)
}
