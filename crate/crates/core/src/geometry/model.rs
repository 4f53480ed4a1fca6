use thiserror::Error;

use crate::expr::{Coord, EvalError, FieldExpr};
use crate::jet::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("degenerate point: {invariant} (value {value})")]
    Degenerate { invariant: String, value: String },
    #[error("{what} is not real-valued (imaginary part {imag:e})")]
    NotReal { what: String, imag: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point has {got} coordinates; model expects {expected}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// How the exponent of a conformal layer `theta -> e^{2 phi} theta` is given.
#[derive(Debug, Clone, PartialEq)]
pub enum ConformalFactor {
    Field(FieldExpr),
    /// `phi = -1/4 log h_{1 1bar}` of a rigid base, which makes the rescaled
    /// Levi form the identity in the first slot.
    LeviNormalization,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Heisenberg,
    /// Rigid hypersurface `Im w = Phi(z1) + |z2|^2 + ... + |zn|^2`.
    Rigid { potential: FieldExpr },
    Conformal { base: Box<Model>, factor: ConformalFactor },
}

/// A pseudo-hermitian manifold presented in real coordinates `(x1, y1, ..., xn, yn, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    n: usize,
    kind: ModelKind,
}

impl Model {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn num_vars(&self) -> usize {
        2 * self.n + 1
    }

    /// Number of stacked conformal layers.
    pub fn depth(&self) -> usize {
        match &self.kind {
            ModelKind::Conformal { base, .. } => 1 + base.depth(),
            _ => 0,
        }
    }

    /// The non-conformal model at the bottom of the stack.
    pub fn root(&self) -> &Model {
        match &self.kind {
            ModelKind::Conformal { base, .. } => base.root(),
            _ => self,
        }
    }

    pub fn is_heisenberg(&self) -> bool {
        matches!(self.kind, ModelKind::Heisenberg)
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match &self.kind {
            ModelKind::Heisenberg => format!("heisenberg(n={})", self.n),
            ModelKind::Rigid { potential } => format!("rigid(n={}, Phi={potential})", self.n),
            ModelKind::Conformal { base, factor } => match factor {
                ConformalFactor::Field(phi) => format!("conformal({}, phi={phi})", base.describe()),
                ConformalFactor::LeviNormalization => format!("levi-normalized({})", base.describe()),
            },
        }
    }
}

pub fn make_heisenberg(n: usize) -> Result<Model, GeometryError> {
    if n < 1 {
        return Err(GeometryError::InvalidModel("CR dimension must be at least 1".into()));
    }
    Ok(Model {
        n,
        kind: ModelKind::Heisenberg,
    })
}

/// Rigid model with potential `Phi`, which may only involve `z1` and `zbar1`.
pub fn make_rigid(n: usize, potential: FieldExpr) -> Result<Model, GeometryError> {
    if n < 1 {
        return Err(GeometryError::InvalidModel("CR dimension must be at least 1".into()));
    }
    if let Some(c) = potential
        .coords()
        .into_iter()
        .find(|c| !matches!(c, Coord::Z(1) | Coord::Zbar(1)))
    {
        return Err(GeometryError::InvalidModel(format!(
            "rigid potential may depend on z1, zbar1 only; found {c:?}"
        )));
    }
    Ok(Model {
        n,
        kind: ModelKind::Rigid { potential },
    })
}

/// The model for `e^{2 phi} theta`.
pub fn apply_conformal(m: &Model, phi: FieldExpr) -> Result<Model, GeometryError> {
    if phi.max_index() > m.n {
        return Err(GeometryError::InvalidModel(format!(
            "conformal factor references z{} on a model of dimension {}",
            phi.max_index(),
            m.n
        )));
    }
    Ok(Model {
        n: m.n,
        kind: ModelKind::Conformal {
            base: Box::new(m.clone()),
            factor: ConformalFactor::Field(phi),
        },
    })
}

/// The rigid model rescaled by `e^{2 sigma}` with `sigma = -1/4 log h_{1 1bar}`.
pub fn levi_normalized(rigid: &Model) -> Result<Model, GeometryError> {
    if !matches!(rigid.kind, ModelKind::Rigid { .. }) {
        return Err(GeometryError::InvalidModel(
            "Levi normalization applies to rigid models only".into(),
        ));
    }
    Ok(Model {
        n: rigid.n,
        kind: ModelKind::Conformal {
            base: Box::new(rigid.clone()),
            factor: ConformalFactor::LeviNormalization,
        },
    })
}
