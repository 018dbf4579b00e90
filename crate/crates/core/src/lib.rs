//! Numerical laboratory for slow transition-layer motion in 1-D isentropic
//! compressible flow with density-dependent viscosity.
//!
//! The crate builds the family of viscous-layer profiles on a bounded
//! interval, computes the leading eigenvalue of the linearized operator and
//! its adjoint, reduces the dynamics to scalar layer-motion laws, and checks
//! everything against a full finite-volume solver. A viscous Burgers twin
//! with closed-form layer profiles serves as the exactly solvable reference
//! for the whole pipeline.

pub mod burgers;
pub mod constitutive;
pub mod error;
pub mod manifold;
pub mod numerics;
pub mod pde;
pub mod reduced;
pub mod spectral;

pub use constitutive::{ConstitutiveLaw, FluidModel, ShockData};
pub use error::{Error, Result};
pub use numerics::SignedLog;
