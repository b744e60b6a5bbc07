//! Independent checks of the determinant formulas: importance-sampled
//! Gaussian integrals, dense quadrature of a reduced model with the true
//! sinc, and a direct comparison of the sinc and Gaussian profiles.

mod monte_carlo;
mod reduced;
mod sinc;

pub use monte_carlo::{mc_gaussian_purity, McEstimate, CHUNK, MIN_ESS_FRACTION, MIN_SAMPLES};
pub use reduced::{
    reduced_model_purity, ReducedModel, ReducedVariant, CLIPPING_THRESHOLD, MIN_GRID,
    MIN_LADDER_GRID, REDUCED_COORDS, WINDOW_SIGMAS,
};
pub use sinc::{sinc_and_gaussian, sinc_gaussian_discrepancy, SincDiscrepancy, MIN_SINC_GRID};

/// Agreement threshold, in standard errors, between the determinant path
/// and the Monte Carlo estimate.
pub const Z_THRESHOLD: f64 = 3.0;
