//! Numerical kernels for the large-time decay of magnetic heat semigroups.
//!
//! Everything is generic over [`real::Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field_forms;
pub mod hardy_verifier;
pub mod heat_evolution;
pub mod linalg;
pub mod oscillator_spectrum;
pub mod quadrature;
pub mod real;
pub mod special;
pub mod sphere_spectrum;

pub use error::{MagheatError, Result};

pub type MagneticField = field_forms::MagneticField<f64>;
pub type MagneticField32 = field_forms::MagneticField<f32>;
pub type FieldSpec = field_forms::FieldSpec<f64>;
pub type FieldSpec32 = field_forms::FieldSpec<f32>;
pub type FluxProfile = field_forms::FluxProfile<f64>;
pub type GaugePotential = field_forms::GaugePotential<f64>;
pub type RadialGrid = oscillator_spectrum::RadialGrid<f64>;
pub type RadialGrid32 = oscillator_spectrum::RadialGrid<f32>;
pub type EvolveSettings = heat_evolution::EvolveSettings<f64>;
pub type HardyEstimate = hardy_verifier::HardyEstimate<f64>;
