//! Tanaka–Webster covariant derivatives of scalars and the operators built from them.

use num_complex::Complex64;

use super::curvature::Curvature;
use super::frame::{complex_field_jet, field_jet, sum, Frame, Ix, DEFAULT_FRAME_ORDER};
use super::model::{apply_conformal, GeometryError, Model};
use crate::expr::FieldExpr;
use crate::jet::Jet;

type J = Jet<f64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Covariant tensor with all indices in frame slots, stored densely as jets.
#[derive(Debug, Clone)]
pub struct CovTensor {
    n: usize,
    rank: usize,
    comps: Vec<J>,
}

impl CovTensor {
    pub fn scalar(n: usize, f: J) -> Self {
        CovTensor {
            n,
            rank: 0,
            comps: vec![f],
        }
    }

    /// Builds a tensor from a component function over slot indices.
    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> J) -> Self {
        let dim = 2 * n + 1;
        let comps = (0..dim.pow(rank as u32))
            .map(|flat| f(&unflatten(flat, dim, rank)))
            .collect();
        CovTensor { n, rank, comps }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &s| acc * self.dim() + s)
    }

    pub fn get_slots(&self, idx: &[usize]) -> &J {
        &self.comps[self.flat(idx)]
    }

    pub fn get(&self, idx: &[Ix]) -> &J {
        let slots: Vec<usize> = idx.iter().map(|i| i.slot(self.n)).collect();
        self.get_slots(&slots)
    }

    /// `t_{A..;D} = W_D t_{A..} - sum_i Gamma^C_{D A_i} t_{..C..}`, direction last.
    pub fn covariant_derivative(&self, frame: &Frame) -> CovTensor {
        let dim = self.dim();
        let rank = self.rank;
        let mut idx = vec![0usize; rank];
        let comps = (0..dim.pow(rank as u32 + 1))
            .map(|flat| {
                let full = unflatten(flat, dim, rank + 1);
                let (a, d) = (&full[..rank], full[rank]);
                let t = self.get_slots(a);
                let mut acc = if t.is_zero() {
                    J::zero(t.num_vars(), t.order().saturating_sub(1).min(frame.order()))
                } else {
                    frame.vector(Ix::from_slot(d, self.n)).apply(t)
                };
                for i in 0..rank {
                    for (cslot, gamma) in frame.christoffels(d, a[i]) {
                        idx.copy_from_slice(a);
                        idx[i] = *cslot;
                        let ti = self.get_slots(&idx);
                        if !ti.is_zero() {
                            acc -= &(gamma * ti);
                        }
                    }
                }
                acc
            })
            .collect();
        CovTensor {
            n: self.n,
            rank: rank + 1,
            comps,
        }
    }
}

fn unflatten(mut flat: usize, dim: usize, rank: usize) -> Vec<usize> {
    let mut out = vec![0; rank];
    for k in (0..rank).rev() {
        out[k] = flat % dim;
        flat /= dim;
    }
    out
}

/// All covariant derivatives of a scalar up to a given order, as jets.
#[derive(Debug, Clone)]
pub struct CovariantJets {
    n: usize,
    levels: Vec<CovTensor>,
}

impl CovariantJets {
    pub fn new(frame: &Frame, f: &J, order: usize) -> Self {
        let mut levels = vec![CovTensor::scalar(frame.n(), f.clone())];
        for k in 0..order {
            let next = levels[k].covariant_derivative(frame);
            levels.push(next);
        }
        CovariantJets { n: frame.n(), levels }
    }

    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &CovTensor {
        &self.levels[k]
    }

    /// Component `f_{;idx}` as a jet.
    pub fn get(&self, idx: &[Ix]) -> J {
        self.levels[idx.len()].get(idx).clone()
    }

    pub fn val(&self, idx: &[Ix]) -> Complex64 {
        self.levels[idx.len()].get(idx).value()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Point values of covariant derivatives of a scalar.
#[derive(Debug, Clone)]
pub struct CovariantDerivatives {
    n: usize,
    /// `values[k]` holds the rank-`k` table, flattened by slot.
    values: Vec<Vec<Complex64>>,
}

impl CovariantDerivatives {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    /// `f_{;idx}`, e.g. `get(&[Ix::H(0), Ix::A(1)])` for `f_{;1 2bar}`.
    pub fn get(&self, idx: &[Ix]) -> Complex64 {
        let dim = 2 * self.n + 1;
        let flat = idx.iter().fold(0, |acc, i| acc * dim + i.slot(self.n));
        self.values[idx.len()][flat]
    }
}

fn check_order(order: usize) -> Result<(), GeometryError> {
    if !(1..=3).contains(&order) {
        return Err(GeometryError::Unsupported(format!(
            "covariant derivative order {order} outside 1..=3"
        )));
    }
    Ok(())
}

/// Covariant derivatives of `f` at `p` up to `order` (1..=3) in the model's moving frame.
pub fn covariant_jet(m: &Model, f: &FieldExpr, p: &[f64], order: usize) -> Result<CovariantDerivatives, GeometryError> {
    check_order(order)?;
    let frame = Frame::at(m, p, DEFAULT_FRAME_ORDER)?;
    let fj = complex_field_jet(f, p, DEFAULT_FRAME_ORDER + 1)?;
    let cj = CovariantJets::new(&frame, &fj, order);
    Ok(CovariantDerivatives {
        n: m.n(),
        values: cj
            .levels
            .iter()
            .map(|t| t.comps.iter().map(J::value).collect())
            .collect(),
    })
}

/// `Delta_b f = h^{a bbar} (f_{;a bbar} + f_{;bbar a})`.
pub fn sublaplacian(frame: &Frame, cj: &CovariantJets) -> J {
    let n = frame.n();
    sum((0..n).flat_map(|a| {
        (0..n).map(move |b| {
            frame.levi_inv(a, b) * &(cj.get(&[Ix::H(a), Ix::A(b)]) + cj.get(&[Ix::A(b), Ix::H(a)]))
        })
    }))
}

/// `Box_b f = -h^{a bbar} f_{;bbar a}`.
pub fn kohn(frame: &Frame, cj: &CovariantJets) -> J {
    let n = frame.n();
    -sum((0..n).flat_map(|a| (0..n).map(move |b| frame.levi_inv(a, b) * &cj.get(&[Ix::A(b), Ix::H(a)]))))
}

/// `h^{a bbar} f_a f_bbar`, the squared norm of the `dbar_b` gradient of a real field.
pub fn dbar_norm2(frame: &Frame, cj: &CovariantJets) -> J {
    let n = frame.n();
    sum((0..n).flat_map(|a| {
        (0..n).map(move |b| frame.levi_inv(a, b) * &(cj.get(&[Ix::H(a)]) * cj.get(&[Ix::A(b)])))
    }))
}

/// `f^a = h^{a bbar} f_bbar`.
pub fn raised_gradient(frame: &Frame, cj: &CovariantJets) -> Vec<J> {
    let n = frame.n();
    (0..n)
        .map(|a| sum((0..n).map(|b| frame.levi_inv(a, b) * &cj.get(&[Ix::A(b)]))))
        .collect()
}

/// `P_a f = h^{b cbar} f_{;cbar b a} + i n A_{a c} f^c`; needs third derivatives.
pub fn graham_lee(frame: &Frame, cj: &CovariantJets) -> Vec<J> {
    let n = frame.n();
    let up = raised_gradient(frame, cj);
    (0..n)
        .map(|a| {
            let lap = sum((0..n).flat_map(|b| {
                (0..n).map(move |g| frame.levi_inv(b, g) * &cj.get(&[Ix::A(g), Ix::H(b), Ix::H(a)]))
            }));
            let tor = sum((0..n).map(|g| frame.torsion(a, g) * &up[g]));
            lap + tor.scale(I * n as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorValues {
    pub sublaplacian: Complex64,
    pub kohn: Complex64,
    pub graham_lee: Vec<Complex64>,
    pub reeb: Complex64,
    pub dbar_norm2: Complex64,
}

pub fn operator_values(frame: &Frame, cj: &CovariantJets) -> OperatorValues {
    OperatorValues {
        sublaplacian: sublaplacian(frame, cj).value(),
        kohn: kohn(frame, cj).value(),
        graham_lee: graham_lee(frame, cj).iter().map(J::value).collect(),
        reeb: cj.val(&[Ix::T]),
        dbar_norm2: dbar_norm2(frame, cj).value(),
    }
}

/// Sub-Laplacian, Kohn Laplacian, Graham–Lee operator, `f_0` and `|dbar_b f|^2` at `p`.
pub fn operators_at(m: &Model, f: &FieldExpr, p: &[f64]) -> Result<OperatorValues, GeometryError> {
    let frame = Frame::at(m, p, DEFAULT_FRAME_ORDER)?;
    let fj = complex_field_jet(f, p, DEFAULT_FRAME_ORDER + 1)?;
    let cj = CovariantJets::new(&frame, &fj, 3);
    Ok(operator_values(&frame, &cj))
}

/// Named scalar residuals from a single evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Residuals {
    pub entries: Vec<(&'static str, f64)>,
}

impl Residuals {
    pub fn push(&mut self, name: &'static str, value: f64) {
        self.entries.push((name, value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, (_, v)| m.max(*v))
    }
}

pub const COMMUTATION_NAMES: [&str; 6] = [
    "hol-hol",
    "hol-antihol",
    "reeb-hol",
    "third-curvature",
    "third-torsion-derivative",
    "third-torsion",
];

/// The six commutation relations for covariant derivatives of a scalar,
/// each maximized over free indices.
pub fn commutation_from_jets(frame: &Frame, cj: &CovariantJets, curvature: &Curvature) -> Residuals {
    let n = frame.n();
    let f = |idx: &[Ix]| cj.val(idx);
    let h = |a: usize, b: usize| frame.levi(a, b).value();
    let tor = |a: usize, b: usize| frame.torsion(a, b).value();
    let up: Vec<Complex64> = raised_gradient(frame, cj).iter().map(J::value).collect();
    let tor_up: Vec<Vec<Complex64>> = (0..n)
        .map(|a| (0..n).map(|b| frame.torsion_up(a, b).value()).collect())
        .collect();
    // conj(A) as a tensor with two antiholomorphic slots, then its derivative
    let abar = CovTensor::from_fn(n, 2, |idx| {
        match (Ix::from_slot(idx[0], n), Ix::from_slot(idx[1], n)) {
            (Ix::A(d), Ix::A(b)) => frame.torsion(d, b).conj(),
            _ => J::zero(frame.num_vars(), frame.order() - 1),
        }
    })
    .covariant_derivative(frame);
    // A^g_{bbar;a} = h^{g dbar} conj(A)_{dbar bbar; a}
    let tor_up_deriv = |g: usize, b: usize, a: usize| -> Complex64 {
        (0..n)
            .map(|d| frame.levi_inv(g, d).value() * abar.get(&[Ix::A(d), Ix::A(b), Ix::H(a)]).value())
            .sum()
    };

    let mut r = [0.0f64; 6];
    let upd = |slot: &mut f64, v: Complex64| *slot = slot.max(v.norm());
    for a in 0..n {
        let ha = Ix::H(a);
        upd(
            &mut r[2],
            f(&[Ix::T, ha]) - f(&[ha, Ix::T]) - (0..n).map(|b| tor(a, b) * up[b]).sum::<Complex64>(),
        );
        for b in 0..n {
            let (hb, ab) = (Ix::H(b), Ix::A(b));
            upd(&mut r[0], f(&[ha, hb]) - f(&[hb, ha]));
            upd(&mut r[1], f(&[ha, ab]) - f(&[ab, ha]) - I * f(&[Ix::T]) * h(a, b));
            let rel5 = f(&[ha, Ix::T, ab])
                - f(&[ha, ab, Ix::T])
                - (0..n).map(|g| f(&[ha, Ix::H(g)]) * tor_up[g][b]).sum::<Complex64>()
                - (0..n).map(|g| f(&[Ix::H(g)]) * tor_up_deriv(g, b, a)).sum::<Complex64>();
            upd(&mut r[4], rel5);
            for g in 0..n {
                let (hg, ag) = (Ix::H(g), Ix::A(g));
                let rel4 = f(&[ha, hb, ag])
                    - f(&[ha, ag, hb])
                    - I * f(&[ha, Ix::T]) * h(b, g)
                    - (0..n)
                        .map(|d| curvature.riem[a][d][b][g] * f(&[Ix::H(d)]))
                        .sum::<Complex64>();
                upd(&mut r[3], rel4);
                let rel6 = f(&[ha, hb, hg]) - f(&[ha, hg, hb]) - I * tor(a, g) * f(&[hb])
                    + I * tor(a, b) * f(&[hg]);
                upd(&mut r[5], rel6);
            }
        }
    }
    Residuals {
        entries: COMMUTATION_NAMES.iter().copied().zip(r).collect(),
    }
}

/// Residuals of the six commutation relations for `f` at `p`.
pub fn commutation_residuals(m: &Model, f: &FieldExpr, p: &[f64]) -> Result<Residuals, GeometryError> {
    let frame = Frame::at(m, p, DEFAULT_FRAME_ORDER)?;
    let fj = complex_field_jet(f, p, DEFAULT_FRAME_ORDER + 1)?;
    let cj = CovariantJets::new(&frame, &fj, 3);
    let curvature = Curvature::of(&frame);
    Ok(commutation_from_jets(&frame, &cj, &curvature))
}

/// `|Delta_hat sigma - e^{-2 phi}(Delta sigma + 4n Re(phi^g sigma_g))|` where hats
/// refer to `e^{2 phi} theta`.
pub fn conformal_sublaplacian_residual(
    m: &Model,
    phi: &FieldExpr,
    sigma: &FieldExpr,
    p: &[f64],
) -> Result<f64, GeometryError> {
    let k = DEFAULT_FRAME_ORDER;
    let base = Frame::at(m, p, k)?;
    let hat = Frame::at(&apply_conformal(m, phi.clone())?, p, k)?;
    let phi_j = field_jet(phi, p, k + 1, "conformal factor")?;
    let sigma_j = field_jet(sigma, p, k + 1, "field")?;
    let cs = CovariantJets::new(&base, &sigma_j, 2);
    let cp = CovariantJets::new(&base, &phi_j, 1);
    let cs_hat = CovariantJets::new(&hat, &sigma_j, 2);
    let lhs = sublaplacian(&hat, &cs_hat).value();
    let n = m.n();
    let up = raised_gradient(&base, &cp);
    let cross: Complex64 = (0..n).map(|g| up[g].value() * cs.val(&[Ix::H(g)])).sum();
    let rhs = (-2.0 * phi_j.value().re).exp() * (sublaplacian(&base, &cs).value() + 4.0 * n as f64 * cross.re);
    Ok((lhs - rhs).norm())
}
