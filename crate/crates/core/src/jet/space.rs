use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Exponent vector of a monomial in the real coordinates.
pub type MultiIndex = Vec<u8>;

/// Highest truncation order any jet may carry. Public seeding is limited to
/// [`crate::jet::MAX_SEED_ORDER`]; the extra headroom is used by models whose
/// connection data needs more derivatives of a potential than of the field.
pub const MAX_INTERNAL_ORDER: usize = 6;

/// Dense layout of all monomials of degree `<= order` in `num_vars` variables.
///
/// Monomials are stored graded by degree and, inside each degree, in an
/// order that does not depend on `order`. The layout of a lower order is
/// therefore a prefix of the layout of any higher order, so truncation is
/// slicing and mixed-order arithmetic works on prefixes.
#[derive(Debug)]
pub struct JetSpace {
    num_vars: usize,
    order: usize,
    monomials: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
    /// (i, j, k) with `monomials[i] + monomials[j] == monomials[k]`.
    mul_table: Vec<(u32, u32, u32)>,
    /// Product of factorials of the exponents, per monomial.
    factorials: Vec<f64>,
}

fn monomials_of_degree(num_vars: usize, degree: usize) -> Vec<MultiIndex> {
    if num_vars == 0 {
        return if degree == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in monomials_of_degree(num_vars - 1, degree - first) {
            rest.insert(0, first as u8);
            out.push(rest);
        }
    }
    out
}

fn factorial(k: u8) -> f64 {
    (1..=k as u64).product::<u64>() as f64
}

impl JetSpace {
    fn build(num_vars: usize, order: usize) -> Self {
        let mut monomials = Vec::new();
        for d in 0..=order {
            monomials.extend(monomials_of_degree(num_vars, d));
        }
        let index: HashMap<MultiIndex, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let degrees: Vec<usize> = monomials
            .iter()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .collect();
        let mut mul_table = Vec::new();
        let mut sum = vec![0u8; num_vars];
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                if degrees[i] + degrees[j] > order {
                    continue;
                }
                for v in 0..num_vars {
                    sum[v] = a[v] + b[v];
                }
                let k = index[&sum];
                mul_table.push((i as u32, j as u32, k as u32));
            }
        }
        // Sorting by target keeps the accumulation cache-friendly.
        mul_table.sort_unstable_by_key(|&(_, _, k)| k);
        let factorials = monomials
            .iter()
            .map(|m| m.iter().map(|&e| factorial(e)).product())
            .collect();
        JetSpace {
            num_vars,
            order,
            monomials,
            index,
            mul_table,
            factorials,
        }
    }

    /// Shared layout for `(num_vars, order)`.
    pub fn get(num_vars: usize, order: usize) -> Arc<JetSpace> {
        assert!(
            order <= MAX_INTERNAL_ORDER,
            "jet order {order} exceeds internal maximum {MAX_INTERNAL_ORDER}"
        );
        static SPACES: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let registry = SPACES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = registry.lock().expect("jet space registry poisoned");
        guard
            .entry((num_vars, order))
            .or_insert_with(|| Arc::new(JetSpace::build(num_vars, order)))
            .clone()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monomials[i]
    }

    pub fn index_of(&self, m: &[u8]) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn factorial(&self, i: usize) -> f64 {
        self.factorials[i]
    }

    pub(crate) fn mul_table(&self) -> &[(u32, u32, u32)] {
        &self.mul_table
    }

    /// Index of the degree-1 monomial of variable `var`.
    pub fn unit_index(&self, var: usize) -> usize {
        let mut m = vec![0u8; self.num_vars];
        m[var] = 1;
        self.index[&m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_size_matches_binomial() {
        // C(7 + 4, 4) = 330 monomials for three complex dims at order 4
        assert_eq!(JetSpace::get(7, 4).len(), 330);
        assert_eq!(JetSpace::get(3, 2).len(), 10);
    }

    #[test]
    fn lower_order_is_prefix() {
        let hi = JetSpace::get(5, 4);
        let lo = JetSpace::get(5, 2);
        assert_eq!(&hi.monomials()[..lo.len()], lo.monomials());
    }
}
