//! Models, moving frames, Tanaka–Webster calculus and Webster curvature.

pub mod calculus;
pub mod curvature;
pub mod forms;
pub mod frame;
pub mod model;
pub mod structure;

pub use calculus::{
    commutation_residuals, conformal_sublaplacian_residual, covariant_jet, operators_at, CovariantDerivatives,
    CovariantJets, OperatorValues, Residuals,
};
pub use curvature::{conformal_transform_residuals, curvature_at, scalar_curvature_formula, Curvature};
pub use frame::{frame_data_at, Frame, FrameData, Ix, DEFAULT_FRAME_ORDER};
pub use model::{apply_conformal, levi_normalized, make_heisenberg, make_rigid, ConformalFactor, GeometryError, Model, ModelKind};
pub use structure::{extract_torsion, structure_residuals};
