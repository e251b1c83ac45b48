//! Periodic grids, transforms, radial multipliers and norms.

mod field;
mod grid;
pub mod multiplier;
pub mod norms;

pub use field::{gradient, transform_forward, transform_inverse, Field, Spectrum};
pub(crate) use field::{
    check_finite, dealias_in_place, derivative_in_place, forward_in_place, inverse_in_place,
};
pub use grid::Grid;
pub use multiplier::{
    apply_multiplier, bump, i_operator, i_symbol, littlewood_paley, smooth_step, LpMode,
    MultiplierSpec,
};
pub use norms::{
    bracket_i, lebesgue_norm, sobolev_norm, strichartz_norm, time_norm, z_norm, AdmissiblePair,
    Exponent,
};
