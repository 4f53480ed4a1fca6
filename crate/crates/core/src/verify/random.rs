//! Seeded generators for fields, points and parameters used by the suite.

use num_complex::Complex64;
use rand::Rng;

use crate::expr::FieldExpr;
use crate::solutions::JLParams;

/// Real coordinate function: `re(z_k)`, `im(z_k)` or `t` for index `2k`, `2k + 1`, `2n`.
fn coordinate(n: usize, i: usize) -> FieldExpr {
    if i == 2 * n {
        FieldExpr::t()
    } else if i % 2 == 0 {
        FieldExpr::z(i / 2 + 1).re()
    } else {
        FieldExpr::z(i / 2 + 1).im()
    }
}

/// Sum of `terms` random monomials of total degree at most `degree` in the
/// real coordinates, with coefficients uniform in `(-scale, scale)`.
pub fn random_polynomial<R: Rng>(rng: &mut R, n: usize, degree: usize, terms: usize, scale: f64) -> FieldExpr {
    let nv = 2 * n + 1;
    let mut out: Option<FieldExpr> = None;
    for _ in 0..terms {
        let d = rng.gen_range(1..=degree);
        let mut mono = FieldExpr::real(rng.gen_range(-scale..scale));
        for _ in 0..d {
            mono = mono * coordinate(n, rng.gen_range(0..nv));
        }
        out = Some(match out {
            Some(acc) => acc + mono,
            None => mono,
        });
    }
    out.unwrap_or_else(|| FieldExpr::real(0.0))
}

/// Test field: up to cubic, coefficients in `(-0.5, 0.5)`.
pub fn random_field<R: Rng>(rng: &mut R, n: usize) -> FieldExpr {
    random_polynomial(rng, n, 3, 6, 0.5)
}

/// Conformal exponent: up to quadratic, coefficients in `(-0.25, 0.25)`.
pub fn random_conformal<R: Rng>(rng: &mut R, n: usize) -> FieldExpr {
    random_polynomial(rng, n, 2, 4, 0.25)
}

/// Point with every coordinate in `(-0.5, 0.5)`.
pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..2 * n + 1).map(|_| rng.gen_range(-0.5..0.5)).collect()
}

pub fn random_complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_jl_params<R: Rng>(rng: &mut R, n: usize) -> JLParams {
    JLParams {
        kappa: random_complex(rng, 1.0),
        mu: (0..n).map(|_| random_complex(rng, 1.0)).collect(),
        lambda: random_complex(rng, 1.0),
        c: rng.gen_range(-0.5..0.5),
    }
}

/// Point with `|G| > min_g`, by rejection; `None` after 1000 attempts.
pub fn jl_point<R: Rng>(rng: &mut R, params: &JLParams, min_g: f64) -> Option<Vec<f64>> {
    let n = params.mu.len();
    (0..1000)
        .map(|_| random_point(rng, n))
        .find(|p| params.g_at(p).norm() > min_g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_deterministic() {
        let a = random_field(&mut ChaCha8Rng::seed_from_u64(3), 2);
        let b = random_field(&mut ChaCha8Rng::seed_from_u64(3), 2);
        assert_eq!(a, b);
        assert!(a.max_index() <= 2);
    }
}
