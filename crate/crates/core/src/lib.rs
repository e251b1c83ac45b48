//! Pseudo-spectral solver and diagnostics for the defocusing cubic NLS
//! `i u_t + Δu = |u|^2 u` on periodic boxes in one and two dimensions.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below are what the experiments use.

pub mod archive;
pub mod data;
mod error;
pub mod functionals;
pub mod propagator;
mod scalar;
pub mod spectral;
pub mod symbols;
mod trajectory;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use spectral::{AdmissiblePair, Exponent, Field, Grid, LpMode, MultiplierSpec, Spectrum};
pub use trajectory::{trapezoid, Trajectory};

pub use num_complex::Complex;

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type WeightSpec64 = weights::WeightSpec<f64>;
pub type SolverConfig64 = propagator::SolverConfig<f64>;
pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
pub type Spectrum32 = Spectrum<f32>;
pub type Trajectory32 = Trajectory<f32>;
