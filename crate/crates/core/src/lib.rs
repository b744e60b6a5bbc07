//! Space-frequency purity and entanglement of photon pairs generated by
//! spontaneous parametric down-conversion (SPDC).
//!
//! The two-photon mode function is modelled as a Gaussian
//! `Φ(x) ∝ exp(-½ xᵀ A x)` over the six coordinates
//! `x = (q_s^x, q_s^y, Ω_s, q_i^x, q_i^y, Ω_i)`. Purities of the reduced
//! states follow from determinant ratios of `A` and of the 12×12 forms
//! obtained by pairing copies of the mode function inside the trace.
//!
//! Units throughout: lengths in µm, times in fs, angular frequencies in
//! rad/fs, transverse momenta in rad/µm, filter widths in nm.
//!
//! Module map:
//! - [`dispersion`]: Sellmeier indices, group indices, walk-off.
//! - [`phasematch`]: exact phase-mismatch factors and their linearization.
//! - [`quadratic_state`]: assembly of `A`, traced forms, purities.
//! - [`oracle`]: Monte Carlo and quadrature cross-checks.
//! - [`scenarios`]: config files, presets, parameter sweeps.
//! - [`cli`]: command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod oracle;
pub mod phasematch;
pub mod quadratic_state;
pub mod scenarios;

pub use config::{Config, CutAngle, PumpSpectrum, Walkoff};
pub use error::{Error, Result};

/// Speed of light in vacuum, µm/fs.
pub const SPEED_OF_LIGHT: f64 = 0.299_792_458;

/// Central angular frequency (rad/fs) of a vacuum wavelength in µm.
pub fn angular_frequency(wavelength_um: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / wavelength_um
}

/// Vacuum wavelength (µm) of an angular frequency in rad/fs.
pub fn vacuum_wavelength(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega
}
