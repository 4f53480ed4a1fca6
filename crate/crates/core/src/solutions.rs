//! Explicit solutions of the Möbius equation on the Heisenberg group, the
//! integrability witness, the one-variable Schwarzian and its rigid-model lift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{FieldExpr, HolomorphicExpr};
use crate::geometry::calculus::covariant_jet;
use crate::geometry::frame::{complex_field_jet, d_z, d_zbar, field_jet};
use crate::geometry::model::{levi_normalized, make_heisenberg, make_rigid, GeometryError};
use crate::geometry::Ix;
use crate::schwarzian::schwarzian_at;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolutionError {
    #[error("kappa, mu and lambda are all zero")]
    AllZero,
    #[error("expected {expected} complex entries, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("critical point: derivative vanishes ({value:e})")]
    CriticalPoint { value: f64 },
    #[error("field is not harmonic at the point (|d^2/dz dzbar| = {value:e})")]
    NotHarmonic { value: f64 },
    #[error("requires n >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Parameters of `phi = -log |kappa (t + i|z|^2) + z.mu + lambda| + C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "JLParamsJson", into = "JLParamsJson")]
pub struct JLParams {
    pub kappa: Complex64,
    pub mu: Vec<Complex64>,
    pub lambda: Complex64,
    pub c: f64,
}

#[derive(Serialize, Deserialize)]
struct JLParamsJson {
    kappa: [f64; 2],
    mu: Vec<[f64; 2]>,
    lambda: [f64; 2],
    #[serde(rename = "C")]
    c: f64,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl From<JLParamsJson> for JLParams {
    fn from(j: JLParamsJson) -> Self {
        JLParams {
            kappa: unpair(j.kappa),
            mu: j.mu.into_iter().map(unpair).collect(),
            lambda: unpair(j.lambda),
            c: j.c,
        }
    }
}

impl From<JLParams> for JLParamsJson {
    fn from(p: JLParams) -> Self {
        JLParamsJson {
            kappa: pair(p.kappa),
            mu: p.mu.into_iter().map(pair).collect(),
            lambda: pair(p.lambda),
            c: p.c,
        }
    }
}

impl JLParams {
    pub fn new(kappa: Complex64, mu: Vec<Complex64>, lambda: Complex64, c: f64) -> Self {
        JLParams { kappa, mu, lambda, c }
    }

    fn validate(&self, n: usize) -> Result<(), SolutionError> {
        if self.mu.len() != n {
            return Err(SolutionError::Arity {
                expected: n,
                got: self.mu.len(),
            });
        }
        if self.kappa == Complex64::new(0.0, 0.0)
            && self.lambda == Complex64::new(0.0, 0.0)
            && self.mu.iter().all(|m| m.norm() == 0.0)
        {
            return Err(SolutionError::AllZero);
        }
        Ok(())
    }

    /// `G = kappa (t + i|z|^2) + z.mu + lambda` at a point `(x1, y1, ..., t)`.
    pub fn g_at(&self, p: &[f64]) -> Complex64 {
        let n = self.mu.len();
        let z = |a: usize| Complex64::new(p[2 * a], p[2 * a + 1]);
        let w = Complex64::new(p[2 * n], (0..n).map(|a| z(a).norm_sqr()).sum());
        self.kappa * w + (0..n).map(|a| z(a) * self.mu[a]).sum::<Complex64>() + self.lambda
    }
}

/// `-1/2 log |G|^2 + C` as a field over the `n`-dimensional Heisenberg coordinates.
pub fn jl_field(params: &JLParams, n: usize) -> Result<FieldExpr, SolutionError> {
    params.validate(n)?;
    let norm2 = (2..=n).fold((FieldExpr::z(1) * FieldExpr::zbar(1)).re(), |acc, k| {
        acc + (FieldExpr::z(k) * FieldExpr::zbar(k)).re()
    });
    let zero = Complex64::new(0.0, 0.0);
    let mut terms = Vec::new();
    if params.kappa != zero {
        terms.push(FieldExpr::constant(params.kappa) * (FieldExpr::t() + FieldExpr::constant(I) * norm2));
    }
    for (k, mu) in params.mu.iter().enumerate().filter(|(_, mu)| **mu != zero) {
        terms.push(FieldExpr::z(k + 1) * FieldExpr::constant(*mu));
    }
    if params.lambda != zero {
        terms.push(FieldExpr::constant(params.lambda));
    }
    let g = terms.into_iter().reduce(|a, b| a + b).ok_or(SolutionError::AllZero)?;
    let phi = -g.abs2().ln() / 2.0;
    Ok(if params.c == 0.0 { phi } else { phi + params.c })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JLInvariants {
    /// Webster scalar curvature of `e^{2 phi} Theta`.
    pub scalar: f64,
    /// `-scalar / (n (n+1))`.
    pub eta: f64,
}

pub fn jl_invariants(params: &JLParams, n: usize) -> JLInvariants {
    let nn = (n * (n + 1)) as f64;
    let mu2: f64 = params.mu.iter().map(|m| m.norm_sqr()).sum();
    let scalar = (-2.0 * params.c).exp() * nn * (4.0 * (params.kappa.conj() * params.lambda).im - mu2);
    JLInvariants {
        scalar,
        eta: -scalar / nn,
    }
}

/// A member of the explicit family whose `dbar_b`-conjugate gradient at `p`
/// is `omega`: `kappa = 0`, `mu = -2 omega`, `lambda = 1 - z(p).mu`, so `G(p) = 1`.
pub fn integrability_witness(n: usize, p: &[f64], omega: &[Complex64]) -> Result<JLParams, SolutionError> {
    if omega.len() != n {
        return Err(SolutionError::Arity {
            expected: n,
            got: omega.len(),
        });
    }
    if p.len() != 2 * n + 1 {
        return Err(GeometryError::Arity {
            expected: 2 * n + 1,
            got: p.len(),
        }
        .into());
    }
    let mu: Vec<Complex64> = omega.iter().map(|w| Complex64::new(-2.0 * w.re + 0.0, -2.0 * w.im + 0.0)).collect();
    let zmu: Complex64 = (0..n).map(|a| Complex64::new(p[2 * a], p[2 * a + 1]) * mu[a]).sum();
    Ok(JLParams {
        kappa: Complex64::new(0.0, 0.0),
        mu,
        lambda: Complex64::new(1.0, 0.0) - zmu,
        c: 0.0,
    })
}

/// `max_a |phi_a(p) - omega_a|` for the witness field, with `phi_a` from the
/// covariant derivatives on the Heisenberg model.
pub fn witness_residual(n: usize, p: &[f64], omega: &[Complex64]) -> Result<f64, SolutionError> {
    let params = integrability_witness(n, p, omega)?;
    let field = jl_field(&params, n)?;
    let cd = covariant_jet(&make_heisenberg(n)?, &field, p, 1)?;
    Ok((0..n).fold(0.0, |m, a| m.max((cd.get(&[Ix::H(a)]) - omega[a]).norm())))
}

/// `f'''/f' - 3/2 (f''/f')^2` at `z`, for `f` in the variable `z1`.
pub fn classical_schwarzian(f: &HolomorphicExpr, z: Complex64) -> Result<Complex64, SolutionError> {
    let n = f.expr().max_index().max(1);
    let mut p = vec![0.0; 2 * n + 1];
    p[0] = z.re;
    p[1] = z.im;
    let j = complex_field_jet(f.expr(), &p, 3)?;
    let d1 = d_z(&j, 0);
    let d2 = d_z(&d1, 0);
    let d3 = d_z(&d2, 0).value();
    let (d1, d2) = (d1.value(), d2.value());
    if d1.norm() < 1e-14 {
        return Err(SolutionError::CriticalPoint { value: d1.norm() });
    }
    Ok(d3 / d1 - (d2 / d1).powi(2) * 1.5)
}

/// Schwarzian of a planar conformal factor lifted to a rigid model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example2 {
    /// `B_{11}` of the lifted field on the Levi-normalized model, in the coframe `dz1`.
    pub b11: Complex64,
    /// `2 (phi_zz - 2 phi_z^2)`.
    pub s_classical: Complex64,
    /// `b11 / S(f)` with `S(f) = 4 (phi_zz - 2 phi_z^2)` for `e^{2 phi} = |f'|`;
    /// `None` when `S(f)` vanishes.
    pub ratio: Option<Complex64>,
    /// Largest mixed component of the lifted Schwarzian.
    pub max_mixed: f64,
}

/// Lift the harmonic function `phi2d(z1)` to the rigid model with potential
/// `Phi` rescaled to unit Levi form, and compare its Schwarzian with the
/// planar expression. `p` carries the model coordinates; its length fixes `n`.
pub fn example2_identity(potential: &FieldExpr, phi2d: &FieldExpr, p: &[f64]) -> Result<Example2, SolutionError> {
    if p.len() < 3 || p.len() % 2 == 0 {
        return Err(GeometryError::Arity {
            expected: 3,
            got: p.len(),
        }
        .into());
    }
    let n = (p.len() - 1) / 2;
    let j = field_jet(phi2d, p, 2, "planar field")?;
    let harmonic = d_zbar(&d_z(&j, 0), 0).value().norm();
    if harmonic >= 1e-10 {
        return Err(SolutionError::NotHarmonic { value: harmonic });
    }
    let dz = d_z(&j, 0);
    let (phi_z, phi_zz) = (dz.value(), d_z(&dz, 0).value());
    let planar = phi_zz - phi_z * phi_z * 2.0;

    let rigid = make_rigid(n, potential.clone())?;
    let pj = field_jet(potential, p, 2, "potential")?;
    let h11 = d_zbar(&d_z(&pj, 0), 0).value().re;
    if !(h11 > 0.0) {
        return Err(GeometryError::Degenerate {
            invariant: "Phi_{z zbar} > 0".into(),
            value: h11.to_string(),
        }
        .into());
    }
    // e^{2 sigma} with sigma = -1/4 log h11
    let e2s = h11.powf(-0.5);
    let b = schwarzian_at(&levi_normalized(&rigid)?, phi2d, p)?;
    let b11 = b.b_holo[0][0] * e2s;
    let s = planar * 4.0;
    Ok(Example2 {
        b11,
        s_classical: planar * 2.0,
        ratio: (s.norm() > 1e-12).then(|| b11 / s),
        max_mixed: b.max_mixed() * e2s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankLemma {
    pub is_scalar: bool,
    pub lambda: Complex64,
}

/// Whether `U (x) conj(V) - V (x) conj(U)` is a multiple of the identity, and the multiple.
pub fn rank_lemma_lambda(u: &[Complex64], v: &[Complex64]) -> Result<RankLemma, SolutionError> {
    let n = u.len();
    if v.len() != n {
        return Err(SolutionError::Arity { expected: n, got: v.len() });
    }
    if n < 2 {
        return Err(SolutionError::DimensionTooSmall(n));
    }
    let m = |a: usize, b: usize| u[a] * v[b].conj() - v[a] * u[b].conj();
    let tr: Complex64 = (0..n).map(|a| m(a, a)).sum::<Complex64>() / n as f64;
    let dev: f64 = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| (m(a, b) - if a == b { tr } else { Complex64::new(0.0, 0.0) }).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(RankLemma {
        is_scalar: dev < 1e-10,
        lambda: tr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_json_shape() {
        let p = JLParams::new(Complex64::new(1.0, 0.0), vec![Complex64::new(0.0, 2.0)], I, 0.5);
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["kappa"], serde_json::json!([1.0, 0.0]));
        assert_eq!(v["mu"], serde_json::json!([[0.0, 2.0]]));
        assert_eq!(v["C"], serde_json::json!(0.5));
        let back: JLParams = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn all_zero_rejected() {
        let p = JLParams::new(Complex64::new(0.0, 0.0), vec![Complex64::new(0.0, 0.0); 2], Complex64::new(0.0, 0.0), 0.0);
        assert_eq!(jl_field(&p, 2), Err(SolutionError::AllZero));
    }
}
