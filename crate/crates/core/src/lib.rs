//! Numeric pseudo-hermitian geometry on Heisenberg, rigid and conformally
//! rescaled CR models: Tanaka–Webster calculus, Webster curvature, the CR
//! Schwarzian tensor and the Möbius equation, with residual checks for the
//! identities relating them.
//!
//! Jets and field expressions are generic over [`Scalar`] (`f32` or `f64`);
//! the geometry layers run in `f64`.

pub mod expr;
pub mod geometry;
pub mod jet;
pub mod scalar;
pub mod schwarzian;
pub mod solutions;
pub mod verify;

pub use scalar::Scalar;

/// Double-precision jet.
pub type Jet64 = jet::Jet<f64>;
/// Single-precision jet.
pub type Jet32 = jet::Jet<f32>;
pub type JetPoint64 = jet::JetPoint<f64>;
