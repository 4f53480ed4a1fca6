//! Webster curvature from the connection forms by exterior differentiation.

use num_complex::Complex64;

use super::calculus::{dbar_norm2, sublaplacian, CovariantJets, Residuals};
use super::forms::TwoForm;
use super::frame::{field_jet, Frame, Ix, DEFAULT_FRAME_ORDER};
use super::model::{apply_conformal, ConformalFactor, GeometryError, Model, ModelKind};
use super::structure::extract_torsion;
use crate::expr::FieldExpr;

const I: Complex64 = Complex64::new(0.0, 1.0);

type Tensor4 = Vec<Vec<Vec<Vec<Complex64>>>>;
type Matrix = Vec<Vec<Complex64>>;

fn tensor4(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Tensor4 {
    (0..n)
        .map(|a| (0..n).map(|b| (0..n).map(|c| (0..n).map(|d| f(a, b, c, d)).collect()).collect()).collect())
        .collect()
}

fn matrix(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Matrix {
    (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect()
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Least-squares fit of the lowered curvature to `eta (h_{r abar} h_{b sbar} + h_{r sbar} h_{b abar})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCurvatureFit {
    pub coefficient: f64,
    pub residual: f64,
}

/// Webster curvature data at a point, in the model's moving frame.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub n: usize,
    /// `[b][a][r][s] = R_b^a_{r sbar}`.
    pub riem: Tensor4,
    /// `[b][a][r][s] = R_{b abar r sbar}`.
    pub riem_lowered: Tensor4,
    /// `R_{r sbar}`.
    pub ricci: Matrix,
    pub scalar: f64,
    /// `P_{a bbar}`.
    pub schouten: Matrix,
    /// `[b][a][g][s] = S_b^a_{g sbar}`.
    pub chern_moser: Tensor4,
    pub fit: ConstantCurvatureFit,
    /// The constant-curvature coefficient when the fit residual is below `1e-6`.
    pub eta: Option<f64>,
    /// Residual of the full curvature expansion on pure-type pairs and of
    /// the symmetry of the `W` coefficients.
    pub closure: f64,
    levi: Matrix,
    levi_inv: Matrix,
}

impl Curvature {
    pub fn of(frame: &Frame) -> Curvature {
        let n = frame.n();
        let order = frame.order().saturating_sub(2);
        let nv = frame.num_vars();
        let omega: Vec<Vec<TwoForm>> = (0..n)
            .map(|b| {
                (0..n)
                    .map(|a| {
                        let mut om = if frame.conn(b, a).is_zero() {
                            TwoForm::zero(nv, order)
                        } else {
                            frame.conn(b, a).d()
                        };
                        for g in 0..n {
                            if frame.conn(b, g).is_zero() || frame.conn(g, a).is_zero() {
                                continue;
                            }
                            om = om.sub(&frame.conn(b, g).wedge(frame.conn(g, a)));
                        }
                        om
                    })
                    .collect()
            })
            .collect();
        let v = |ix: Ix| frame.vector(ix);
        let levi = matrix(n, |a, b| frame.levi(a, b).value());
        let levi_inv = matrix(n, |a, b| frame.levi_inv(a, b).value());
        let tor = matrix(n, |a, b| frame.torsion(a, b).value());
        let tor_up = matrix(n, |a, b| frame.torsion_up(a, b).value());

        let riem = tensor4(n, |b, a, r, s| omega[b][a].eval(v(Ix::H(r)), v(Ix::A(s))).value());

        let mut closure = 0.0f64;
        let mut w = tensor4(n, |_, _, _, _| Complex64::new(0.0, 0.0));
        for b in 0..n {
            for a in 0..n {
                for r in 0..n {
                    w[b][a][r][0] = omega[b][a].eval(v(Ix::H(r)), v(Ix::T)).value();
                    for s in 0..n {
                        let hh = omega[b][a].eval(v(Ix::H(r)), v(Ix::H(s))).value();
                        let want = -I * (tor[b][r] * delta(a, s) - tor[b][s] * delta(a, r));
                        closure = closure.max((hh - want).norm());
                        let aa = omega[b][a].eval(v(Ix::A(r)), v(Ix::A(s))).value();
                        let want = I * (levi[b][r] * tor_up[a][s] - levi[b][s] * tor_up[a][r]);
                        closure = closure.max((aa - want).norm());
                    }
                }
            }
        }
        // W_{b abar r} symmetric in (b, r)
        for b in 0..n {
            for a in 0..n {
                for r in 0..n {
                    let lo = |b: usize, r: usize| (0..n).map(|g| w[b][g][r][0] * levi[g][a]).sum::<Complex64>();
                    closure = closure.max((lo(b, r) - lo(r, b)).norm());
                }
            }
        }

        let riem_lowered = tensor4(n, |b, a, r, s| (0..n).map(|g| riem[b][g][r][s] * levi[g][a]).sum());
        let ricci = matrix(n, |r, s| (0..n).map(|a| riem[a][a][r][s]).sum());
        let scalar_c: Complex64 = (0..n)
            .flat_map(|r| (0..n).map(move |s| (r, s)))
            .map(|(r, s)| levi_inv[r][s] * ricci[r][s])
            .sum();
        let scalar = scalar_c.re;
        let nf = n as f64;
        let schouten = matrix(n, |a, b| (ricci[a][b] - levi[a][b] * scalar / (2.0 * nf + 2.0)) / (nf + 2.0));
        // R_b^a = h^{a rbar} R_{b rbar}
        let ric_up = matrix(n, |b, a| (0..n).map(|r| levi_inv[a][r] * ricci[b][r]).sum());
        let chern_moser = tensor4(n, |b, a, g, s| {
            riem[b][a][g][s]
                - (ric_up[b][a] * levi[g][s]
                    + ric_up[g][a] * levi[b][s]
                    + ricci[g][s] * delta(a, b)
                    + ricci[b][s] * delta(a, g))
                    / (nf + 2.0)
                + (levi[g][s] * delta(a, b) + levi[b][s] * delta(a, g)) * scalar / ((nf + 1.0) * (nf + 2.0))
        });

        let basis = tensor4(n, |b, a, r, s| levi[r][a] * levi[b][s] + levi[r][s] * levi[b][a]);
        let (mut num, mut den) = (0.0, 0.0);
        for (rv, ev) in riem_lowered.iter().flatten().flatten().flatten().zip(basis.iter().flatten().flatten().flatten()) {
            num += (rv * ev.conj()).re;
            den += ev.norm_sqr();
        }
        let coefficient = num / den;
        let residual = riem_lowered
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .zip(basis.iter().flatten().flatten().flatten())
            .fold(0.0f64, |m, (rv, ev)| m.max((rv - ev * coefficient).norm()));
        let fit = ConstantCurvatureFit { coefficient, residual };

        Curvature {
            n,
            riem,
            riem_lowered,
            ricci,
            scalar,
            schouten,
            chern_moser,
            eta: (residual < 1e-6).then_some(coefficient),
            fit,
            closure,
            levi,
            levi_inv,
        }
    }

    /// Largest violation of `R_{b abar r sbar} = R_{r abar b sbar}` and of
    /// `R_{b abar r sbar} = conj(R_{a bbar s rbar})`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let l = &self.riem_lowered;
        let mut m = 0.0f64;
        for b in 0..n {
            for a in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        m = m.max((l[b][a][r][s] - l[r][a][b][s]).norm());
                        m = m.max((l[b][a][r][s] - l[a][b][s][r].conj()).norm());
                    }
                }
            }
        }
        m
    }

    /// Difference between the Ricci tensor and the contraction of the lowered
    /// curvature over its second and third slots.
    pub fn trace_chain_residual(&self) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        for b in 0..n {
            for s in 0..n {
                let alt: Complex64 = (0..n)
                    .flat_map(|r| (0..n).map(move |a| (r, a)))
                    .map(|(r, a)| self.levi_inv[r][a] * self.riem_lowered[b][a][r][s])
                    .sum();
                m = m.max((alt - self.ricci[b][s]).norm());
            }
        }
        let double: Complex64 = (0..n)
            .flat_map(|r| (0..n).map(move |s| (r, s)))
            .map(|(r, s)| self.levi_inv[r][s] * (0..n).map(|a| self.riem[a][a][r][s]).sum::<Complex64>())
            .sum();
        m.max((double.re - self.scalar).abs()).max(double.im.abs())
    }

    /// `max |sum_a S_a^a_{g sbar}|`.
    pub fn chern_moser_trace(&self) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        for g in 0..n {
            for s in 0..n {
                let t: Complex64 = (0..n).map(|a| self.chern_moser[a][a][g][s]).sum();
                m = m.max(t.norm());
            }
        }
        m
    }

    pub fn chern_moser_norm(&self) -> f64 {
        self.chern_moser.iter().flatten().flatten().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn levi(&self) -> &Matrix {
        &self.levi
    }
}

/// Curvature of `m` at `p`.
pub fn curvature_at(m: &Model, p: &[f64]) -> Result<Curvature, GeometryError> {
    Ok(Curvature::of(&Frame::at(m, p, DEFAULT_FRAME_ORDER)?))
}

/// Residuals of the transformation laws for Ricci, torsion and trace-free
/// Schouten under `theta -> e^{2 phi} theta`. The left sides come from the
/// rescaled model directly (torsion read off its structure equation); the
/// right sides from base-model quantities. Components are compared in the
/// coframe `theta^a + 2i phi^a theta`, which is `e^{-phi}` times the rescaled
/// model's own coframe.
pub fn conformal_transform_residuals(m: &Model, phi: &FieldExpr, p: &[f64]) -> Result<Residuals, GeometryError> {
    let k = DEFAULT_FRAME_ORDER;
    let n = m.n();
    let nf = n as f64;
    let base = Frame::at(m, p, k)?;
    let hat = Frame::at(&apply_conformal(m, phi.clone())?, p, k)?;
    let phi_j = field_jet(phi, p, k + 1, "conformal factor")?;
    let cj = CovariantJets::new(&base, &phi_j, 2);
    let e2 = (2.0 * phi_j.value().re).exp();
    let curv = Curvature::of(&base);
    let curv_hat = Curvature::of(&hat);
    let lap = sublaplacian(&base, &cj).value();
    let grad2 = dbar_norm2(&base, &cj).value();
    let h = |a: usize, b: usize| base.levi(a, b).value();
    let f1 = |a: Ix| cj.val(&[a]);
    let f2 = |a: Ix, b: Ix| cj.val(&[a, b]);

    let mut ricci = 0.0f64;
    let mut schouten = 0.0f64;
    let trace_free = |mtx: &Matrix, tr: Complex64, a: usize, b: usize| mtx[a][b] - h(a, b) * tr / nf;
    let tr_p = |c: &Curvature| -> Complex64 {
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| base.levi_inv(a, b).value() * c.schouten[a][b])
            .sum()
    };
    let (tp, tp_hat) = (tr_p(&curv), tr_p(&curv_hat));
    for a in 0..n {
        for b in 0..n {
            let hess = f2(Ix::H(a), Ix::A(b)) + f2(Ix::A(b), Ix::H(a));
            let predicted = curv.ricci[a][b] - hess * (nf + 2.0) - h(a, b) * (lap + grad2 * (4.0 * (nf + 1.0)));
            ricci = ricci.max((curv_hat.ricci[a][b] * e2 - predicted).norm());
            let b_mixed = hess - h(a, b) * lap / nf;
            let predicted = trace_free(&curv.schouten, tp, a, b) - b_mixed;
            let direct = trace_free(&curv_hat.schouten, tp_hat, a, b) * e2;
            schouten = schouten.max((direct - predicted).norm());
        }
    }
    let extracted = extract_torsion(&hat);
    let mut torsion = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let predicted = base.torsion(a, b).value() + I * 2.0 * f2(Ix::H(a), Ix::H(b))
                - I * 4.0 * f1(Ix::H(a)) * f1(Ix::H(b));
            torsion = torsion.max((extracted[a][b] * e2 - predicted).norm());
        }
    }
    let mut r = Residuals::default();
    r.push("ricci", ricci);
    r.push("torsion", torsion);
    r.push("schouten", schouten);
    Ok(r)
}

/// Scalar curvature of `Conformal(Heisenberg, phi)` computed directly and via
/// `-2 e^{-2 phi} (n+1) (Delta_b phi + 2n |dbar_b phi|^2)` on the flat base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarCurvatureComparison {
    pub direct: f64,
    pub via_formula: f64,
}

pub fn scalar_curvature_formula(m: &Model, p: &[f64]) -> Result<ScalarCurvatureComparison, GeometryError> {
    let (base, phi) = match m.kind() {
        ModelKind::Conformal {
            base,
            factor: ConformalFactor::Field(phi),
        } if base.is_heisenberg() => (base, phi),
        _ => {
            return Err(GeometryError::InvalidModel(
                "scalar curvature formula needs one conformal layer over a Heisenberg model".into(),
            ))
        }
    };
    let k = DEFAULT_FRAME_ORDER;
    let frame = Frame::at(base, p, k)?;
    let phi_j = field_jet(phi, p, k + 1, "conformal factor")?;
    let cj = CovariantJets::new(&frame, &phi_j, 2);
    let nf = m.n() as f64;
    let lap = sublaplacian(&frame, &cj).value().re;
    let grad2 = dbar_norm2(&frame, &cj).value().re;
    let via_formula = -2.0 * (-2.0 * phi_j.value().re).exp() * (nf + 1.0) * (lap + 2.0 * nf * grad2);
    Ok(ScalarCurvatureComparison {
        direct: curvature_at(m, p)?.scalar,
        via_formula,
    })
}
