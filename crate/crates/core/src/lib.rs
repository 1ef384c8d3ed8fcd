//! Lattice Gaussian free field with quenched random external fields.
//!
//! The field on `Λ_N = [-N, N]^d` with Dirichlet boundary conditions and
//! a linear coupling to an i.i.d. disorder field `η` is Gaussian with
//! covariance `(-Δ_N)^{-1}` and mean `m_N^η = (-Δ_N)^{-1} η`, so every
//! sample here is exact. The crate provides the box geometry, a sine
//! transform diagonalising `Δ_N`, finite- and infinite-volume Green
//! functions, disorder laws, samplers, the experiments on maxima, high
//! points, deviations and hard walls, and the closed-form constants
//! they are compared against.
//!
//! Numerical types are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the common `f64` choice.

pub mod constants;
pub mod disorder;
pub mod error;
pub mod estimate;
pub mod green;
pub mod lattice;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use error::{GlabError, Result};
pub use estimate::Estimate;
pub use lattice::{BoxGeometry, SubBox};
pub use scalar::Real;

pub type Field = lattice::ScalarField<f64>;
pub type Plan = spectral::SpectralPlan<f64>;
pub type Green = green::GreenAccessor<f64>;
pub type Disorder = disorder::DisorderRealization<f64>;
pub type Sample = sampler::QuenchedSample<f64>;

pub type Field32 = lattice::ScalarField<f32>;
pub type Plan32 = spectral::SpectralPlan<f32>;
pub type Green32 = green::GreenAccessor<f32>;
pub type Disorder32 = disorder::DisorderRealization<f32>;
pub type Sample32 = sampler::QuenchedSample<f32>;
