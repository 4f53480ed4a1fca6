//! The CR Schwarzian tensor `B(phi)` and the Möbius equation `B(phi) = 0`.

use num_complex::Complex64;

use crate::expr::FieldExpr;
use crate::geometry::calculus::{graham_lee, sublaplacian, CovariantJets};
use crate::geometry::frame::{field_jet, Frame, Ix, DEFAULT_FRAME_ORDER};
use crate::geometry::model::{apply_conformal, GeometryError, Model};

const I: Complex64 = Complex64::new(0.0, 1.0);

type Matrix = Vec<Vec<Complex64>>;

/// Components of `B(phi)` modulo `theta`. The `(0,2)` part is the conjugate
/// of `b_holo` and is not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Schwarzian {
    pub n: usize,
    /// Description of the model whose coframe `theta^a` the components refer to.
    pub frame: String,
    /// `B_{ab} = 2 phi_{;ab} - 4 phi_a phi_b`.
    pub b_holo: Matrix,
    /// `B_{a bbar} = phi_{;a bbar} + phi_{;bbar a} - (1/n) Delta_b phi h_{a bbar}`.
    pub b_mixed: Matrix,
    /// `h^{a bbar} B_{a bbar}`.
    pub trace: Complex64,
}

impl Schwarzian {
    /// Largest component modulus.
    pub fn max_abs(&self) -> f64 {
        self.b_holo
            .iter()
            .chain(&self.b_mixed)
            .flatten()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_mixed(&self) -> f64 {
        self.b_mixed.iter().flatten().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max(|B_{ab} - B_{ba}|, |B_{a bbar} - conj B_{b abar}|)`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                m = m.max((self.b_holo[a][b] - self.b_holo[b][a]).norm());
                m = m.max((self.b_mixed[a][b] - self.b_mixed[b][a].conj()).norm());
            }
        }
        m
    }

    fn scaled(&self, s: f64) -> Schwarzian {
        let sc = |mtx: &Matrix| mtx.iter().map(|r| r.iter().map(|v| v * s).collect()).collect();
        Schwarzian {
            n: self.n,
            frame: self.frame.clone(),
            b_holo: sc(&self.b_holo),
            b_mixed: sc(&self.b_mixed),
            trace: self.trace * s,
        }
    }

    fn max_difference(&self, other: &Schwarzian) -> f64 {
        self.b_holo
            .iter()
            .chain(&self.b_mixed)
            .flatten()
            .zip(other.b_holo.iter().chain(&other.b_mixed).flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

/// `B(phi)` from covariant jets of `phi` (order at least 2) in `frame`.
pub fn schwarzian_from_jets(frame: &Frame, cj: &CovariantJets, tag: String) -> Schwarzian {
    let n = frame.n();
    let lap = sublaplacian(frame, cj).value();
    let d1 = |a: Ix| cj.val(&[a]);
    let b_holo = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| cj.val(&[Ix::H(a), Ix::H(b)]) * 2.0 - d1(Ix::H(a)) * d1(Ix::H(b)) * 4.0)
                .collect()
        })
        .collect();
    let b_mixed: Matrix = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    cj.val(&[Ix::H(a), Ix::A(b)]) + cj.val(&[Ix::A(b), Ix::H(a)])
                        - frame.levi(a, b).value() * lap / n as f64
                })
                .collect()
        })
        .collect();
    let trace = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| frame.levi_inv(a, b).value() * b_mixed[a][b])
        .sum();
    Schwarzian {
        n,
        frame: tag,
        b_holo,
        b_mixed,
        trace,
    }
}

/// `B(phi)` at `p` in the moving coframe of `m`.
pub fn schwarzian_at(m: &Model, phi: &FieldExpr, p: &[f64]) -> Result<Schwarzian, GeometryError> {
    let frame = Frame::at(m, p, DEFAULT_FRAME_ORDER)?;
    let phi_j = field_jet(phi, p, DEFAULT_FRAME_ORDER + 1, "field")?;
    let cj = CovariantJets::new(&frame, &phi_j, 2);
    Ok(schwarzian_from_jets(&frame, &cj, m.describe()))
}

/// `max |B(phi + sigma) - B(phi) - B_hat(sigma)|` where `B_hat` is taken on
/// `e^{2 phi} theta` and brought back to the coframe of `m`.
pub fn additivity_residual(m: &Model, phi: &FieldExpr, sigma: &FieldExpr, p: &[f64]) -> Result<f64, GeometryError> {
    let sum = schwarzian_at(m, &(phi.clone() + sigma.clone()), p)?;
    let first = schwarzian_at(m, phi, p)?;
    let phi_val = field_jet(phi, p, 0, "field")?.value().re;
    // theta_hat^a = e^{phi} theta^a mod theta
    let second = schwarzian_at(&apply_conformal(m, phi.clone())?, sigma, p)?.scaled((2.0 * phi_val).exp());
    let mut combined = first.clone();
    for a in 0..m.n() {
        for b in 0..m.n() {
            combined.b_holo[a][b] += second.b_holo[a][b];
            combined.b_mixed[a][b] += second.b_mixed[a][b];
        }
    }
    Ok(sum.max_difference(&combined))
}

/// `max |i A_hat_{ab} - i A_{ab} + B_{ab}(phi)|` with `A_hat` the torsion of
/// `e^{2 phi} theta` in the coframe of `m`.
pub fn torsion_link_residual(m: &Model, phi: &FieldExpr, p: &[f64]) -> Result<f64, GeometryError> {
    let k = DEFAULT_FRAME_ORDER;
    let base = Frame::at(m, p, k)?;
    let hat = Frame::at(&apply_conformal(m, phi.clone())?, p, k)?;
    let phi_j = field_jet(phi, p, k + 1, "field")?;
    let cj = CovariantJets::new(&base, &phi_j, 2);
    let b = schwarzian_from_jets(&base, &cj, m.describe());
    let e2 = (2.0 * phi_j.value().re).exp();
    let mut worst = 0.0f64;
    for a in 0..m.n() {
        for c in 0..m.n() {
            let r = I * hat.torsion(a, c).value() * e2 - I * base.torsion(a, c).value() + b.b_holo[a][c];
            worst = worst.max(r.norm());
        }
    }
    Ok(worst)
}

/// Worst-case Möbius-equation residuals over a sample of points.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusReport {
    pub max_b: f64,
    /// `max |P_a phi|`.
    pub max_p: f64,
    pub worst_point: Vec<f64>,
    pub n: usize,
}

impl MobiusReport {
    /// For `n = 1` both `B` and `P` must vanish.
    pub fn is_mobius(&self, tol: f64) -> bool {
        self.max_b < tol && (self.n >= 2 || self.max_p < tol)
    }
}

pub fn mobius_residual(m: &Model, phi: &FieldExpr, samples: &[Vec<f64>]) -> Result<MobiusReport, GeometryError> {
    if samples.is_empty() {
        return Err(GeometryError::InvalidModel("no sample points".into()));
    }
    let mut report = MobiusReport {
        max_b: 0.0,
        max_p: 0.0,
        worst_point: samples[0].clone(),
        n: m.n(),
    };
    for p in samples {
        let frame = Frame::at(m, p, DEFAULT_FRAME_ORDER)?;
        let phi_j = field_jet(phi, p, DEFAULT_FRAME_ORDER + 1, "field")?;
        let cj = CovariantJets::new(&frame, &phi_j, 3);
        let b = schwarzian_from_jets(&frame, &cj, String::new()).max_abs();
        let pa = graham_lee(&frame, &cj).iter().fold(0.0f64, |m, v| m.max(v.value().norm()));
        if !b.is_finite() || !pa.is_finite() {
            return Err(GeometryError::Degenerate {
                invariant: "Schwarzian".into(),
                value: "non-finite".into(),
            });
        }
        if b > report.max_b {
            report.worst_point = p.clone();
        }
        report.max_b = report.max_b.max(b);
        report.max_p = report.max_p.max(pa);
    }
    Ok(report)
}
