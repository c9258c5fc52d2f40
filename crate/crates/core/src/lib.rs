//! Exact and numerical solutions of two-phase Stefan problems with surface
//! evaporation, Lie-symmetry invariance checks for the underlying boundary
//! value problems, and an independent front-tracking finite-difference
//! oracle.
//!
//! Every kernel is generic over [`Real`] (`f32` or `f64`); the crate root
//! re-exports `f64` aliases for the common case.

pub mod error;
pub mod export;
pub mod fd_oracle;
pub mod material;
pub mod numerics;
pub mod scalar;
pub mod self_similar;
pub mod symmetry;
pub mod travelling_wave;

pub use error::{Error, Result};
pub use material::{
    build_transformed_bvp, kirchhoff_forward, kirchhoff_inverse, Phase, SpecificHeat, TimeLaw,
};
pub use scalar::Real;

pub type MaterialSpec = material::MaterialSpec<f64>;
pub type TransformedBvp = material::TransformedBvp<f64>;
pub type TravellingWaveSolution = travelling_wave::TravellingWaveSolution<f64>;
pub type SelfSimilarSolution = self_similar::SelfSimilarSolution<f64>;
pub type FrontTrackedState = fd_oracle::FrontTrackedState<f64>;
