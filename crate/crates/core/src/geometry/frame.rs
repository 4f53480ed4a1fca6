//! Jet-valued moving frames: `{Z_a, Z_abar, T}`, the dual coframe, Levi
//! form, connection forms and torsion of a model about a point.

use num_complex::Complex64;

use super::calculus::CovariantJets;
use super::forms::{invert, OneForm, VectorField};
use super::model::{ConformalFactor, GeometryError, Model, ModelKind};
use crate::expr::{eval_field, FieldExpr};
use crate::jet::{Jet, JetPoint, MAX_INTERNAL_ORDER};

type J = Jet<f64>;

/// Jet order of frame coefficients used unless a caller asks otherwise.
/// Fields are evaluated one order higher; rigid potentials three higher.
pub const DEFAULT_FRAME_ORDER: usize = 3;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Index of a frame slot: holomorphic `Z_a`, antiholomorphic `Z_abar`, or `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ix {
    H(usize),
    A(usize),
    T,
}

impl Ix {
    pub fn slot(self, n: usize) -> usize {
        match self {
            Ix::H(a) => a,
            Ix::A(a) => n + a,
            Ix::T => 2 * n,
        }
    }

    pub fn from_slot(s: usize, n: usize) -> Ix {
        if s < n {
            Ix::H(s)
        } else if s < 2 * n {
            Ix::A(s - n)
        } else {
            Ix::T
        }
    }

    pub fn conj(self) -> Ix {
        match self {
            Ix::H(a) => Ix::A(a),
            Ix::A(a) => Ix::H(a),
            Ix::T => Ix::T,
        }
    }
}

/// Moving frame of a model, with all coefficients as jets about a point.
#[derive(Debug, Clone)]
pub struct Frame {
    n: usize,
    order: usize,
    point: Vec<f64>,
    /// Indexed by slot.
    vectors: Vec<VectorField>,
    /// Indexed by slot; `coframe[s]` is dual to `vectors[s]`.
    coframe: Vec<OneForm>,
    levi: Vec<Vec<J>>,
    /// `levi_inv[a][b] = h^{a bbar}`.
    levi_inv: Vec<Vec<J>>,
    /// `conn[b][a] = omega_b^a`.
    conn: Vec<Vec<OneForm>>,
    torsion: Vec<Vec<J>>,
    conformal_factor: Option<J>,
    /// `gamma[d][a]` lists `(c, Gamma^c_{d a})` for nonzero entries.
    gamma: Vec<Vec<Vec<(usize, J)>>>,
}

fn real_part_checked(j: &J, what: &str) -> Result<J, GeometryError> {
    let imag = j.coeffs().iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if imag > 1e-12 {
        return Err(GeometryError::NotReal {
            what: what.to_string(),
            imag,
        });
    }
    Ok(j.re())
}

/// `d/dz_a = (d/dx_a - i d/dy_a) / 2` on a jet.
pub fn d_z(j: &J, a: usize) -> J {
    (j.derivative(2 * a) - j.derivative(2 * a + 1).scale(I)).scale_re(0.5)
}

/// `d/dzbar_a = (d/dx_a + i d/dy_a) / 2` on a jet.
pub fn d_zbar(j: &J, a: usize) -> J {
    (j.derivative(2 * a) + j.derivative(2 * a + 1).scale(I)).scale_re(0.5)
}

fn check_point(model: &Model, p: &[f64]) -> Result<(), GeometryError> {
    if p.len() != model.num_vars() {
        return Err(GeometryError::Arity {
            expected: model.num_vars(),
            got: p.len(),
        });
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite()) {
        return Err(GeometryError::Degenerate {
            invariant: "finite coordinates".into(),
            value: x.to_string(),
        });
    }
    Ok(())
}

/// Jet of a real scalar field at `p`, truncated at `order`.
pub fn field_jet(field: &FieldExpr, p: &[f64], order: usize, what: &str) -> Result<J, GeometryError> {
    let jp = JetPoint::seeded(p, order)?;
    let j = eval_field(field, &jp)?;
    real_part_checked(&j, what)
}

/// Jet of a possibly complex scalar field at `p`.
pub fn complex_field_jet(field: &FieldExpr, p: &[f64], order: usize) -> Result<J, GeometryError> {
    let jp = JetPoint::seeded(p, order)?;
    Ok(eval_field(field, &jp)?)
}

fn identity(n: usize, nv: usize, order: usize) -> Vec<Vec<J>> {
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| J::constant(nv, order, c(if a == b { 1.0 } else { 0.0 }, 0.0)))
                .collect()
        })
        .collect()
}

fn zeros(n: usize, nv: usize, order: usize) -> Vec<Vec<J>> {
    vec![vec![J::zero(nv, order); n]; n]
}

fn zero_conn(n: usize, nv: usize, order: usize) -> Vec<Vec<OneForm>> {
    vec![vec![OneForm::zero(nv, order); n]; n]
}

fn holo_vector(nv: usize, order: usize, a: usize, t_coeff: J) -> VectorField {
    let mut comps = vec![Complex64::new(0.0, 0.0); nv];
    comps[2 * a] = c(0.5, 0.0);
    comps[2 * a + 1] = c(0.0, -0.5);
    let mut v = VectorField::constant(nv, order, &comps);
    v.0[nv - 1] = t_coeff;
    v
}

fn dz_form(nv: usize, order: usize, a: usize) -> OneForm {
    let mut comps = vec![Complex64::new(0.0, 0.0); nv];
    comps[2 * a] = c(1.0, 0.0);
    comps[2 * a + 1] = I;
    OneForm::constant(nv, order, &comps)
}

fn reeb_field(nv: usize, order: usize) -> VectorField {
    let mut comps = vec![Complex64::new(0.0, 0.0); nv];
    comps[nv - 1] = c(2.0, 0.0);
    VectorField::constant(nv, order, &comps)
}

fn assemble_slots<T: Clone>(hol: Vec<T>, anti: Vec<T>, reeb: T) -> Vec<T> {
    hol.into_iter().chain(anti).chain(std::iter::once(reeb)).collect()
}

fn check_levi_positive(levi: &[Vec<J>]) -> Result<(), GeometryError> {
    // Cholesky on base-point values
    let n = levi.len();
    let mut l = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = levi[i][j].value();
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            if i == j {
                if !(s.re > 0.0) || !s.re.is_finite() {
                    return Err(GeometryError::Degenerate {
                        invariant: "Levi form positive definite".into(),
                        value: format!("{}", levi[i][i].value()),
                    });
                }
                l[i][j] = Complex64::new(s.re.sqrt(), 0.0);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(())
}

impl Frame {
    /// Builds the frame of `model` about `p` with coefficient jets of order `order` (1..=3).
    pub fn at(model: &Model, p: &[f64], order: usize) -> Result<Frame, GeometryError> {
        check_point(model, p)?;
        if !(1..=MAX_INTERNAL_ORDER - 3).contains(&order) {
            return Err(GeometryError::InvalidModel(format!(
                "frame order {order} outside 1..={}",
                MAX_INTERNAL_ORDER - 3
            )));
        }
        match model.kind() {
            ModelKind::Heisenberg => Ok(Self::heisenberg(model.n(), p, order)),
            ModelKind::Rigid { potential } => Self::rigid(model.n(), potential, p, order),
            ModelKind::Conformal { base, factor } => {
                let base_frame = Frame::at(base, p, order)?;
                let phi = match factor {
                    ConformalFactor::Field(e) => field_jet(e, p, order + 1, "conformal factor")?,
                    ConformalFactor::LeviNormalization => {
                        let h11 = &base_frame.levi[0][0];
                        if h11.order() < order + 1 {
                            return Err(GeometryError::InvalidModel(
                                "Levi normalization needs a rigid base".into(),
                            ));
                        }
                        h11.ln()?.scale_re(-0.25)
                    }
                };
                base_frame.conformal(&phi)
            }
        }
    }

    fn heisenberg(n: usize, p: &[f64], order: usize) -> Frame {
        let nv = 2 * n + 1;
        let jp = JetPoint::seeded(p, order).expect("validated point");
        let hol: Vec<VectorField> = (0..n)
            .map(|a| holo_vector(nv, order, a, jp.zbar(a).scale(I)))
            .collect();
        let anti = hol.iter().map(VectorField::conj).collect();
        let vectors = assemble_slots(hol, anti, reeb_field(nv, order));

        let mut theta = OneForm::zero(nv, order);
        theta.0[nv - 1] = J::constant(nv, order, c(0.5, 0.0));
        for a in 0..n {
            theta.0[2 * a] = -jp.var(2 * a + 1);
            theta.0[2 * a + 1] = jp.var(2 * a).clone();
        }
        let hol_co: Vec<OneForm> = (0..n).map(|a| dz_form(nv, order, a)).collect();
        let anti_co = hol_co.iter().map(OneForm::conj).collect();
        let coframe = assemble_slots(hol_co, anti_co, theta);

        Frame::finish(
            n,
            order,
            p,
            vectors,
            coframe,
            identity(n, nv, order),
            zero_conn(n, nv, order),
            zeros(n, nv, order),
            None,
        )
        .expect("Heisenberg frame is nondegenerate")
    }

    fn rigid(n: usize, potential: &FieldExpr, p: &[f64], order: usize) -> Result<Frame, GeometryError> {
        let nv = 2 * n + 1;
        let jp = JetPoint::seeded(p, order + 3)?;
        let phi = real_part_checked(&eval_field(potential, &jp)?, "rigid potential")?;
        // F_a = dF/dz_a with F = Phi(z1) + |z2|^2 + ...
        let grad: Vec<J> = (0..n)
            .map(|a| if a == 0 { d_z(&phi, 0) } else { jp.zbar(a) })
            .collect();
        let h11 = d_zbar(&grad[0], 0);
        if !(h11.value().re > 0.0) {
            return Err(GeometryError::Degenerate {
                invariant: "strict pseudo-convexity Phi_{z zbar} > 0".into(),
                value: format!("{}", h11.value().re),
            });
        }
        let h11 = h11.re();

        let hol: Vec<VectorField> = (0..n)
            .map(|a| holo_vector(nv, order, a, grad[a].truncate(order).scale(I)))
            .collect();
        let anti = hol.iter().map(VectorField::conj).collect();
        let vectors = assemble_slots(hol, anti, reeb_field(nv, order));

        // eta = ds/2 + (i/2) sum (F_bbar dzbar_b - F_b dz_b)
        let mut theta = OneForm::zero(nv, order);
        theta.0[nv - 1] = J::constant(nv, order, c(0.5, 0.0));
        for (b, fb) in grad.iter().enumerate() {
            let fb = fb.truncate(order);
            let fbb = fb.conj();
            theta.0[2 * b] = (&fbb - &fb).scale(c(0.0, 0.5));
            theta.0[2 * b + 1] = (&fbb + &fb).scale_re(0.5);
        }
        let hol_co: Vec<OneForm> = (0..n).map(|a| dz_form(nv, order, a)).collect();
        let anti_co = hol_co.iter().map(OneForm::conj).collect();
        let coframe = assemble_slots(hol_co.clone(), anti_co, theta);

        let mut levi = identity(n, nv, order);
        levi[0][0] = h11.truncate(order + 1);
        let christoffel = d_z(&h11, 0).div(&h11)?;
        let mut conn = zero_conn(n, nv, order);
        conn[0][0] = hol_co[0].scale(&christoffel.truncate(order));

        Frame::finish(n, order, p, vectors, coframe, levi, conn, zeros(n, nv, order), None)
    }

    /// Frame of `e^{2 phi} theta`, built from this frame by the conformal
    /// transformation rules. The new holomorphic frame is `e^{-phi} Z_a`
    /// (same Levi matrix); the dual frame is recovered by inverting the coframe.
    pub fn conformal(&self, phi: &J) -> Result<Frame, GeometryError> {
        let (n, order) = (self.n, self.order);
        let nv = 2 * n + 1;
        let phi = real_part_checked(phi, "conformal factor")?;
        let e1 = phi.exp();
        let e2 = phi.scale_re(2.0).exp();
        let em2 = phi.scale_re(-2.0).exp();
        if !e2.value().re.is_finite() || !em2.value().re.is_finite() {
            return Err(GeometryError::Degenerate {
                invariant: "finite conformal factor".into(),
                value: format!("{}", phi.value().re),
            });
        }
        let cov = CovariantJets::new(self, &phi, 2);
        let d1 = |ix: Ix| cov.get(&[ix]);
        let d2 = |a: Ix, b: Ix| cov.get(&[a, b]);
        let phi_lo: Vec<J> = (0..n).map(|a| d1(Ix::H(a))).collect();
        let phi_up: Vec<J> = (0..n)
            .map(|a| sum((0..n).map(|b| &self.levi_inv[a][b] * &d1(Ix::A(b)))))
            .collect();

        let theta = &self.coframe[2 * n];
        let theta_hol: Vec<OneForm> = (0..n)
            .map(|a| self.coframe[a].add(&theta.scale(&phi_up[a].scale(I * 2.0))).scale(&e1))
            .collect();
        let theta_anti: Vec<OneForm> = theta_hol.iter().map(OneForm::conj).collect();
        let new_theta = theta.scale(&e2);
        let coframe = assemble_slots(theta_hol, theta_anti, new_theta);

        let matrix: Vec<Vec<J>> = coframe.iter().map(|f| f.0.clone()).collect();
        let inv = invert(&matrix).ok_or_else(|| GeometryError::Degenerate {
            invariant: "invertible coframe".into(),
            value: "singular".into(),
        })?;
        let vectors = (0..nv)
            .map(|s| VectorField((0..nv).map(|i| inv[i][s].clone()).collect()))
            .collect();

        // lowered base coframe theta_b = h_{b cbar} theta^cbar
        let theta_low: Vec<OneForm> = (0..n)
            .map(|b| sum_forms((0..n).map(|g| self.coframe[n + g].scale(&self.levi[b][g]))))
            .collect();
        let s1 = sum_forms((0..n).map(|g| self.coframe[g].scale(&phi_lo[g])));
        let s2 = sum_forms((0..n).map(|g| theta_low[g].scale(&phi_up[g])));
        let grad2 = sum((0..n).map(|g| &phi_lo[g] * &phi_up[g]));
        let mut conn = self.conn.clone();
        for b in 0..n {
            for a in 0..n {
                let mixed_up = sum((0..n).map(|g| &self.levi_inv[a][g] * &d2(Ix::A(g), Ix::H(b))));
                let mixed_dn = sum((0..n).map(|g| &self.levi_inv[a][g] * &d2(Ix::H(b), Ix::A(g))));
                let mut coeff = mixed_up + mixed_dn + (&phi_lo[b] * &phi_up[a]).scale_re(4.0);
                let mut form = self.coframe[a]
                    .scale(&phi_lo[b])
                    .sub(&theta_low[b].scale(&phi_up[a]))
                    .scale_c(c(2.0, 0.0));
                if a == b {
                    coeff = coeff + grad2.scale_re(4.0);
                    form = form.add(&s1.sub(&s2));
                }
                form = form.add(&theta.scale(&coeff.scale(I)));
                conn[b][a] = conn[b][a].add(&form);
            }
        }

        let torsion = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let t = &self.torsion[a][b] + &d2(Ix::H(a), Ix::H(b)).scale(I * 2.0)
                            - (&phi_lo[a] * &phi_lo[b]).scale(I * 4.0);
                        &em2 * &t
                    })
                    .collect()
            })
            .collect();

        let factor = match &self.conformal_factor {
            Some(f) => f + &phi,
            None => phi.clone(),
        };
        Frame::finish(
            n,
            order,
            &self.point,
            vectors,
            coframe,
            self.levi.clone(),
            conn,
            torsion,
            Some(factor),
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        n: usize,
        order: usize,
        p: &[f64],
        vectors: Vec<VectorField>,
        coframe: Vec<OneForm>,
        levi: Vec<Vec<J>>,
        conn: Vec<Vec<OneForm>>,
        torsion: Vec<Vec<J>>,
        conformal_factor: Option<J>,
    ) -> Result<Frame, GeometryError> {
        check_levi_positive(&levi)?;
        let inv = invert(&levi).ok_or_else(|| GeometryError::Degenerate {
            invariant: "invertible Levi form".into(),
            value: "singular".into(),
        })?;
        // h^{a bbar} is the transpose of the matrix inverse of h_{a bbar}
        let levi_inv = (0..n).map(|a| (0..n).map(|b| inv[b][a].clone()).collect()).collect();
        let mut frame = Frame {
            n,
            order,
            point: p.to_vec(),
            vectors,
            coframe,
            levi,
            levi_inv,
            conn,
            torsion,
            conformal_factor,
            gamma: Vec::new(),
        };
        frame.gamma = frame.christoffel_table();
        Ok(frame)
    }

    fn christoffel_table(&self) -> Vec<Vec<Vec<(usize, J)>>> {
        let n = self.n;
        let nv = 2 * n + 1;
        let hol: Vec<Vec<Vec<(usize, J)>>> = (0..nv)
            .map(|d| {
                (0..n)
                    .map(|a| {
                        (0..n)
                            .filter(|&g| !self.conn[a][g].is_zero())
                            .map(|g| (g, self.conn[a][g].eval(&self.vectors[d])))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        (0..nv)
            .map(|d| {
                let dbar = Ix::from_slot(d, n).conj().slot(n);
                let mut row = hol[d].clone();
                for a in 0..n {
                    row.push(hol[dbar][a].iter().map(|(g, v)| (n + g, v.conj())).collect());
                }
                row.push(Vec::new());
                row
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_vars(&self) -> usize {
        2 * self.n + 1
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn vector(&self, ix: Ix) -> &VectorField {
        &self.vectors[ix.slot(self.n)]
    }

    pub fn coframe(&self, ix: Ix) -> &OneForm {
        &self.coframe[ix.slot(self.n)]
    }

    /// `h_{a bbar}`.
    pub fn levi(&self, a: usize, b: usize) -> &J {
        &self.levi[a][b]
    }

    /// `h^{a bbar}`.
    pub fn levi_inv(&self, a: usize, b: usize) -> &J {
        &self.levi_inv[a][b]
    }

    /// `omega_b^a`.
    pub fn conn(&self, b: usize, a: usize) -> &OneForm {
        &self.conn[b][a]
    }

    /// `A_{ab}`.
    pub fn torsion(&self, a: usize, b: usize) -> &J {
        &self.torsion[a][b]
    }

    /// Total exponent of the conformal stack, if any.
    pub fn conformal_factor(&self) -> Option<&J> {
        self.conformal_factor.as_ref()
    }

    /// Nonzero `(c, Gamma^c_{d a})` by slot, with `d` the differentiating direction.
    pub fn christoffels(&self, d: usize, a: usize) -> &[(usize, J)] {
        &self.gamma[d][a]
    }

    /// `Gamma^c_{d a}` as a jet (zero if absent).
    pub fn christoffel(&self, d: Ix, a: Ix, cc: Ix) -> J {
        let s = cc.slot(self.n);
        self.gamma[d.slot(self.n)][a.slot(self.n)]
            .iter()
            .find(|(g, _)| *g == s)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| J::zero(self.num_vars(), self.order.saturating_sub(1)))
    }

    /// `A^a_{bbar} = h^{a cbar} conj(A_{c b})`.
    pub fn torsion_up(&self, a: usize, b: usize) -> J {
        sum((0..self.n).map(|g| &self.levi_inv[a][g] * &self.torsion[g][b].conj()))
    }

    /// Point values of everything.
    pub fn data(&self) -> FrameData {
        let n = self.n;
        let vals = |m: &Vec<Vec<J>>| -> Vec<Vec<Complex64>> {
            m.iter().map(|r| r.iter().map(J::value).collect()).collect()
        };
        let chris = |dir: &dyn Fn(usize) -> Ix| -> Vec<Vec<Vec<Complex64>>> {
            (0..n)
                .map(|g| {
                    (0..n)
                        .map(|b| {
                            (0..n)
                                .map(|a| self.christoffel(dir(b), Ix::H(a), Ix::H(g)).value())
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };
        FrameData {
            n,
            point: self.point.clone(),
            levi: vals(&self.levi),
            christoffel_holo: chris(&Ix::H),
            christoffel_mixed: chris(&Ix::A),
            christoffel_reeb: (0..n)
                .map(|g| {
                    (0..n)
                        .map(|a| self.christoffel(Ix::T, Ix::H(a), Ix::H(g)).value())
                        .collect()
                })
                .collect(),
            torsion: vals(&self.torsion),
            frame: (0..n).map(|a| self.vectors[a].values()).collect(),
            reeb: self.vectors[2 * n].values(),
            theta: self.coframe[2 * n].0.iter().map(J::value).collect(),
            theta_hol: (0..n).map(|a| self.coframe[a].0.iter().map(J::value).collect()).collect(),
            conformal_factor: self.conformal_factor.clone(),
        }
    }
}

pub(crate) fn sum(mut it: impl Iterator<Item = J>) -> J {
    let first = it.next().expect("nonempty sum");
    it.fold(first, |a, b| a + b)
}

pub(crate) fn sum_forms(mut it: impl Iterator<Item = OneForm>) -> OneForm {
    let first = it.next().expect("nonempty sum");
    it.fold(first, |a, b| a.add(&b))
}

/// Values of a frame at its base point.
#[derive(Debug, Clone)]
pub struct FrameData {
    pub n: usize,
    pub point: Vec<f64>,
    /// `h_{a bbar}`.
    pub levi: Vec<Vec<Complex64>>,
    /// `[g][b][a] = Gamma^g_{b a}`, direction `Z_b`.
    pub christoffel_holo: Vec<Vec<Vec<Complex64>>>,
    /// `[g][b][a] = Gamma^g_{bbar a}`, direction `Z_bbar`.
    pub christoffel_mixed: Vec<Vec<Vec<Complex64>>>,
    /// `[g][a] = Gamma^g_{0 a}`, direction `T`.
    pub christoffel_reeb: Vec<Vec<Complex64>>,
    /// `A_{ab}`.
    pub torsion: Vec<Vec<Complex64>>,
    /// Coordinate components of `Z_a`.
    pub frame: Vec<Vec<Complex64>>,
    /// Coordinate components of `T`.
    pub reeb: Vec<Complex64>,
    pub theta: Vec<Complex64>,
    pub theta_hol: Vec<Vec<Complex64>>,
    /// Jet of the total conformal exponent for conformal models.
    pub conformal_factor: Option<J>,
}

impl FrameData {
    /// Largest componentwise difference of the geometric data.
    pub fn max_difference(&self, other: &FrameData) -> f64 {
        fn flat<'a>(d: &'a FrameData) -> Vec<&'a Complex64> {
            d.levi
                .iter()
                .flatten()
                .chain(d.christoffel_holo.iter().flatten().flatten())
                .chain(d.christoffel_mixed.iter().flatten().flatten())
                .chain(d.christoffel_reeb.iter().flatten())
                .chain(d.torsion.iter().flatten())
                .chain(d.frame.iter().flatten())
                .chain(&d.reeb)
                .chain(&d.theta)
                .chain(d.theta_hol.iter().flatten())
                .collect()
        }
        flat(self)
            .into_iter()
            .zip(flat(other))
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

/// Point values of the frame data of `model` at `p`.
pub fn frame_data_at(model: &Model, p: &[f64]) -> Result<FrameData, GeometryError> {
    Ok(Frame::at(model, p, DEFAULT_FRAME_ORDER)?.data())
}
