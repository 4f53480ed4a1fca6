use num_complex::Complex64;

use crate::expr::FieldExpr;
use crate::geometry::calculus::{dbar_norm2, graham_lee, kohn, raised_gradient, CovariantJets};
use crate::geometry::curvature::Curvature;
use crate::geometry::frame::{field_jet, Frame, Ix, DEFAULT_FRAME_ORDER};
use crate::geometry::model::{GeometryError, Model};
use crate::jet::Jet;

use super::ResidualSet;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn setup(m: &Model, f: &FieldExpr, p: &[f64], order: usize) -> Result<(Frame, CovariantJets), GeometryError> {
    let frame = Frame::at(m, p, DEFAULT_FRAME_ORDER)?;
    let fj = field_jet(f, p, DEFAULT_FRAME_ORDER + 1, "field")?;
    let cj = CovariantJets::new(&frame, &fj, order);
    Ok((frame, cj))
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

/// Both sides of the Bochner-type formula for `-Box_b |dbar_b f|^2`, real `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BochnerSides {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

pub fn bochner_sides(m: &Model, f: &FieldExpr, p: &[f64]) -> Result<BochnerSides, GeometryError> {
    let (frame, cj) = setup(m, f, p, 3)?;
    let n = frame.n();
    let nf = n as f64;
    let hi = |a: usize, b: usize| frame.levi_inv(a, b).value();
    let d = |idx: &[Ix]| cj.val(idx);

    let norm2 = dbar_norm2(&frame, &cj);
    let lhs = -kohn(&frame, &CovariantJets::new(&frame, &norm2, 2)).value();

    let box_f = kohn(&frame, &cj);
    let box_d = CovariantJets::new(&frame, &box_f, 1);
    let box_bar_d = CovariantJets::new(&frame, &box_f.conj(), 1);
    let pf: Vec<Complex64> = graham_lee(&frame, &cj).iter().map(Jet::value).collect();
    let ricci = Curvature::of(&frame).ricci;
    let up: Vec<Complex64> = raised_gradient(&frame, &cj).iter().map(Jet::value).collect();
    // f^{bbar} = h^{d bbar} f_d
    let up_bar: Vec<Complex64> = (0..n).map(|b| (0..n).map(|g| hi(g, b) * d(&[Ix::H(g)])).sum()).collect();

    let mut rhs = Complex64::new(0.0, 0.0);
    for (a, c) in pairs(n) {
        for (b, e) in pairs(n) {
            rhs += hi(a, c) * hi(b, e) * d(&[Ix::H(a), Ix::H(b)]) * d(&[Ix::A(c), Ix::A(e)]);
            rhs += hi(c, a) * hi(b, e) * d(&[Ix::A(a), Ix::H(b)]) * d(&[Ix::H(c), Ix::A(e)]);
        }
    }
    for (a, b) in pairs(n) {
        let h = hi(a, b);
        rhs -= h * box_d.val(&[Ix::A(b)]) * d(&[Ix::H(a)]) * ((nf + 1.0) / nf);
        rhs -= h * d(&[Ix::A(b)]) * box_bar_d.val(&[Ix::H(a)]) / nf;
        rhs += ricci[a][b] * up[a] * up_bar[b];
        rhs -= h * d(&[Ix::H(a)]) * pf[b].conj() / nf;
        rhs += h * d(&[Ix::A(b)]) * pf[a] * ((nf - 1.0) / nf);
    }
    Ok(BochnerSides { lhs, rhs })
}

/// `|lhs - rhs|` of the Bochner-type formula.
pub fn bochner_residual(m: &Model, f: &FieldExpr, p: &[f64]) -> Result<f64, GeometryError> {
    let s = bochner_sides(m, f, p)?;
    Ok((s.lhs - s.rhs).norm())
}

/// `max_a |((n-1)/n) P_a f - h^{r bbar} (f_{;a bbar r} - (1/n) s_{;r} h_{a bbar})|`
/// with `s = h^{g dbar} f_{;g dbar}`.
pub fn graham_lee_residual(m: &Model, f: &FieldExpr, p: &[f64]) -> Result<f64, GeometryError> {
    let (frame, cj) = setup(m, f, p, 3)?;
    let n = frame.n();
    let nf = n as f64;
    let hi = |a: usize, b: usize| frame.levi_inv(a, b).value();
    let trace = pairs(n)
        .map(|(g, e)| frame.levi_inv(g, e) * &cj.get(&[Ix::H(g), Ix::A(e)]))
        .fold(Jet::zero(frame.num_vars(), frame.order()), |acc, j| acc + j);
    let ds = CovariantJets::new(&frame, &trace, 1);
    let pf = graham_lee(&frame, &cj);
    let mut worst = 0.0f64;
    for a in 0..n {
        let mut div = Complex64::new(0.0, 0.0);
        for (r, b) in pairs(n) {
            div += hi(r, b)
                * (cj.val(&[Ix::H(a), Ix::A(b), Ix::H(r)]) - ds.val(&[Ix::H(r)]) * frame.levi(a, b).value() / nf);
        }
        worst = worst.max((pf[a].value() * ((nf - 1.0) / nf) - div).norm());
    }
    Ok(worst)
}

/// Residuals (a) `|f_{;ab} + i f A_{ab}|`, (b) `|f_0|`, (c) `|X f|` for
/// `f = e^{-2 phi} |dbar_b phi|^2` and `X = i f^{abar} Z_abar - i f^a Z_a - f T`.
/// (b) and (c) are asserted only for `n >= 2`.
pub fn hamiltonian_check(m: &Model, phi: &FieldExpr, p: &[f64]) -> Result<ResidualSet, GeometryError> {
    let k = DEFAULT_FRAME_ORDER;
    let frame = Frame::at(m, p, k)?;
    let phi_j = field_jet(phi, p, k + 1, "field")?;
    let cphi = CovariantJets::new(&frame, &phi_j, 1);
    let f = dbar_norm2(&frame, &cphi) * (phi_j.scale_re(-2.0)).exp();
    let cf = CovariantJets::new(&frame, &f, 2);
    let n = frame.n();
    let fv = f.value();

    let mut a_res = 0.0f64;
    for (a, b) in pairs(n) {
        let r = cf.val(&[Ix::H(a), Ix::H(b)]) + I * fv * frame.torsion(a, b).value();
        a_res = a_res.max(r.norm());
    }
    let f0 = cf.val(&[Ix::T]);
    let up: Vec<Complex64> = raised_gradient(&frame, &cf).iter().map(Jet::value).collect();
    let xf: Complex64 = (0..n)
        .map(|a| I * up[a].conj() * cf.val(&[Ix::A(a)]) - I * up[a] * cf.val(&[Ix::H(a)]))
        .sum::<Complex64>()
        - fv * f0;

    let asserted = n >= 2;
    let mut set = ResidualSet::default();
    set.record("hamiltonian-infinitesimal-cr", a_res, p, 1e-8, true);
    set.record("hamiltonian-reeb", f0.norm(), p, 1e-8, asserted);
    set.record("hamiltonian-vector-field", xf.norm(), p, 1e-8, asserted);
    Ok(set)
}

/// `max |A_{ab} phi_g - A_{ag} phi_b|` over the samples.
pub fn torsion_rank_check(m: &Model, phi: &FieldExpr, samples: &[Vec<f64>]) -> Result<ResidualSet, GeometryError> {
    if m.n() < 2 {
        return Err(GeometryError::Unsupported(format!(
            "torsion rank check needs n >= 2, got {}",
            m.n()
        )));
    }
    if samples.is_empty() {
        return Err(GeometryError::InvalidModel("no sample points".into()));
    }
    let mut set = ResidualSet::default();
    for p in samples {
        let (frame, cj) = setup(m, phi, p, 1)?;
        let n = frame.n();
        let tor = |a: usize, b: usize| frame.torsion(a, b).value();
        let mut worst = 0.0f64;
        for a in 0..n {
            for (b, g) in pairs(n) {
                let r = tor(a, b) * cj.val(&[Ix::H(g)]) - tor(a, g) * cj.val(&[Ix::H(b)]);
                worst = worst.max(r.norm());
            }
        }
        set.record("torsion-rank", worst, p, 1e-9, true);
    }
    Ok(set)
}
