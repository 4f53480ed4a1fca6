//! Structure-equation checks on a frame: duality, Reeb normalization, Levi
//! form, connection and torsion, evaluated on all pairs of frame vectors.

use num_complex::Complex64;

use super::calculus::Residuals;
use super::forms::{OneForm, TwoForm};
use super::frame::{sum_forms, Frame, Ix};




const I: Complex64 = Complex64::new(0.0, 1.0);

fn max_on_frame(frame: &Frame, form: &TwoForm) -> f64 {
    let nv = frame.num_vars();
    let mut m = 0.0f64;
    for s in 0..nv {
        for t in s + 1..nv {
            let v = form
                .eval(frame.vector(Ix::from_slot(s, frame.n())), frame.vector(Ix::from_slot(t, frame.n())))
                .value();
            m = m.max(v.norm());
        }
    }
    m
}

fn max_one_form_on_frame(frame: &Frame, form: &OneForm) -> f64 {
    (0..frame.num_vars())
        .map(|s| form.eval(frame.vector(Ix::from_slot(s, frame.n()))).value().norm())
        .fold(0.0, f64::max)
}

/// `d theta^a - theta^b ^ omega_b^a`, whose only remaining part is the torsion term.
fn connection_defect(frame: &Frame, a: usize) -> TwoForm {
    let n = frame.n();
    let mut out = frame.coframe(Ix::H(a)).d();
    for b in 0..n {
        let c = frame.conn(b, a);
        if !c.is_zero() {
            out = out.sub(&frame.coframe(Ix::H(b)).wedge(c));
        }
    }
    out
}

/// Torsion `A_{ab}` read off from the structure equation
/// `d theta^a = theta^b ^ omega_b^a + A^a_{bbar} theta ^ theta^bbar`.
pub fn extract_torsion(frame: &Frame) -> Vec<Vec<Complex64>> {
    let n = frame.n();
    let t = frame.vector(Ix::T);
    // up[g][b] = A^g_{bbar}
    let up: Vec<Vec<Complex64>> = (0..n)
        .map(|g| {
            let defect = connection_defect(frame, g);
            (0..n).map(|b| defect.eval(t, frame.vector(Ix::A(b))).value()).collect()
        })
        .collect();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..n)
                        .map(|g| frame.levi(g, a).value() * up[g][b])
                        .sum::<Complex64>()
                        .conj()
                })
                .collect()
        })
        .collect()
}

/// All structure-equation residuals of a frame at its base point.
pub fn structure_residuals(frame: &Frame) -> Residuals {
    let n = frame.n();
    let nv = frame.num_vars();
    let mut r = Residuals::default();

    let mut duality = 0.0f64;
    for s in 0..nv {
        for t in 0..nv {
            let v = frame
                .coframe(Ix::from_slot(s, n))
                .eval(frame.vector(Ix::from_slot(t, n)))
                .value();
            let want = if s == t { 1.0 } else { 0.0 };
            duality = duality.max((v - want).norm());
        }
    }
    r.push("duality", duality);

    let theta = frame.coframe(Ix::T);
    let dtheta = theta.d();
    let reeb = frame.vector(Ix::T);
    r.push("reeb-normalization", (theta.eval(reeb).value() - 1.0).norm());
    r.push(
        "reeb-contraction",
        (0..nv)
            .map(|s| dtheta.eval(reeb, frame.vector(Ix::from_slot(s, n))).value().norm())
            .fold(0.0, f64::max),
    );

    let mut levi_form = dtheta.clone();
    for a in 0..n {
        for b in 0..n {
            let w = frame.coframe(Ix::H(a)).wedge(frame.coframe(Ix::A(b)));
            levi_form = levi_form.sub(&w.scale(&frame.levi(a, b).scale(I)));
        }
    }
    r.push("levi-form", max_on_frame(frame, &levi_form));

    let mut conn = 0.0f64;
    for a in 0..n {
        let mut defect = connection_defect(frame, a);
        for b in 0..n {
            let w = theta.wedge(frame.coframe(Ix::A(b)));
            defect = defect.sub(&w.scale(&frame.torsion_up(a, b)));
        }
        conn = conn.max(max_on_frame(frame, &defect));
    }
    r.push("connection", conn);

    let mut compat = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let h = frame.levi(a, b);
            let dh = OneForm((0..nv).map(|i| h.derivative(i)).collect());
            let lowered = sum_forms((0..n).map(|g| frame.conn(a, g).scale(frame.levi(g, b))));
            let lowered_bar = sum_forms((0..n).map(|g| frame.conn(b, g).conj().scale(frame.levi(a, g))));
            compat = compat.max(max_one_form_on_frame(frame, &dh.sub(&lowered).sub(&lowered_bar)));
        }
    }
    r.push("metric-compatibility", compat);

    let extracted = extract_torsion(frame);
    let mut diff = 0.0f64;
    let mut sym = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            diff = diff.max((extracted[a][b] - frame.torsion(a, b).value()).norm());
            sym = sym.max((extracted[a][b] - extracted[b][a]).norm());
            sym = sym.max((frame.torsion(a, b).value() - frame.torsion(b, a).value()).norm());
        }
    }
    r.push("torsion-extraction", diff);
    r.push("torsion-symmetry", sym);
    r
}

