//! Pointwise verification of eigenfamilies on charted Riemannian manifolds.
//!
//! The crate evaluates the Laplace-Beltrami operator `tau` and the
//! conformality operator `kappa` in local coordinates with exact
//! second-order forward-mode differentiation, constructs the classical
//! eigenfamilies (flat-torus characters, weighted Sasakian sphere
//! coordinate families, monomial compositions, polynomial quotients,
//! mapping tori) and checks every defining identity numerically, point by
//! point, reporting residual statistics against explicit tolerances.

pub mod chart;
pub mod error;
pub mod field;
pub mod jet;
pub mod jetmat;
pub mod linalg;
pub mod manifolds;
pub mod ops;
pub mod report;
pub mod submersions;
pub mod transforms;
pub mod verify;

pub use chart::{Chart, ChartedManifold, SamplingPlan};
pub use error::{GeometryError, Result};
pub use field::ComplexField;
pub use jet::{CJet2, FieldData, Jet2, MAX_DIM};
pub use report::{ArgmaxPoint, IdentityReport, ResidualNorm, VerificationReport};
pub use verify::EigenFamilySpec;
