//! Exact computation of local heat-trace coefficients for the
//! dilaton-twisted de Rham complex, and direct evaluation of the alternating
//! supertrace densities they must match.
//!
//! Everything is carried out in exact rational arithmetic on truncated
//! polynomial jets in a normal-gauge chart, so every verification below is
//! an equality of rationals, not a numerical comparison.

pub mod contraction;
pub mod derham;
pub mod error;
pub mod geometry;
pub mod heatcoeff;
pub mod invariants;
pub mod jet;
pub mod matjet;
pub mod rational;
pub mod tensor;

pub use contraction::{
    chain_factors, eps_contract, eps_contract_one_form, eps_sign, ContractionPattern, Factor,
    FreeIndex, Slot,
};
pub use error::{CoreError, Result};
pub use geometry::{CurvaturePackage, GeometryCtx, MetricDilatonJet, TensorField};
pub use jet::PolyJet;
pub use matjet::MatJet;
pub use rational::Rational;
pub use tensor::{MatQ, PointTensor};
