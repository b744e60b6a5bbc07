//! Assembly of the 6×6 matrix `A` of `Φ(x) ∝ exp(-½ xᵀ A x)`.
//!
//! Every Gaussian factor `exp(-γ (cᵀx)²)` of the mode function contributes
//! the rank-one term `2γ c cᵀ`:
//!
//! | factor            | γ            | c                         |
//! |-------------------|--------------|---------------------------|
//! | pump, x           | w_p²/4       | e(q_s^x) + e(q_i^x)       |
//! | pump, y           | w_p²/4       | ∇Δ₀                       |
//! | pump, time        | T₀²/4        | e(Ω_s) + e(Ω_i)           |
//! | collection        | w_n²/2       | e(q_n^x), e(q_n^y)        |
//! | frequency filter  | 1/(2B_n²)    | e(Ω_n)                    |
//! | phase matching    | β²L²/4       | ∇Δ_k                      |

use crate::config::{Config, PumpSpectrum};
use crate::error::{Error, Result};
use crate::phasematch::{coord, Linearization};
use crate::SPEED_OF_LIGHT;

use super::form::QuadraticForm;

/// Extreme precision used for `B_n = 0` and `w_n = ∞`, relative to the
/// largest finite diagonal entry of the same coordinate kind.
pub const DEFAULT_LIMIT_FACTOR: f64 = 1e6;

/// A CW pump is a pulse whose bandwidth is this many times narrower than
/// the narrowest frequency filter.
pub const CW_BANDWIDTH_RATIO: f64 = 1e3;

const MOMENTUM: [usize; 4] = [coord::QSX, coord::QSY, coord::QIX, coord::QIY];
const FREQUENCY: [usize; 2] = [coord::WS, coord::WI];

/// Angular-frequency bandwidth `B = π c Δλ / (λ² √ln 2)` in rad/fs from a
/// half width at 1/e in wavelength (nm) around `wavelength` (µm).
pub fn bandwidth_from_wavelength(width_nm: f64, wavelength: f64) -> Result<f64> {
    if width_nm.is_nan() || width_nm < 0.0 {
        return Err(Error::Validation(format!(
            "bandwidth must be >= 0 nm, got {width_nm}"
        )));
    }
    if !(wavelength > 0.0) {
        return Err(Error::Validation(format!(
            "wavelength must be > 0, got {wavelength}"
        )));
    }
    if width_nm.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(std::f64::consts::PI * SPEED_OF_LIGHT * width_nm * 1e-3
        / (wavelength * wavelength * std::f64::consts::LN_2.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitPolicy {
    /// Replace infinite precisions by `factor` × the largest finite
    /// diagonal entry of the same coordinate kind.
    Extreme(f64),
    /// Refuse `B_n = 0` and `w_n = ∞`.
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub limits: LimitPolicy,
    /// Multiplies the resolved pump duration T₀.
    pub pump_duration_scale: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            limits: LimitPolicy::Extreme(DEFAULT_LIMIT_FACTOR),
            pump_duration_scale: 1.0,
        }
    }
}

/// Pump duration T₀ (fs) for the config's pump description.
pub fn pump_duration(config: &Config, lin: &Linearization) -> Result<f64> {
    match config.pump_spectrum {
        PumpSpectrum::Duration(t) => Ok(t),
        PumpSpectrum::Bandwidth(width) => {
            let b = bandwidth_from_wavelength(width, config.pump_wavelength)?;
            Ok(std::f64::consts::SQRT_2 / b)
        }
        PumpSpectrum::ContinuousWave => {
            let filters = [
                bandwidth_from_wavelength(config.filter_width_signal, config.signal_wavelength)?,
                bandwidth_from_wavelength(config.filter_width_idler, config.idler_wavelength)?,
            ];
            let narrowest = filters
                .into_iter()
                .filter(|b| b.is_finite() && *b > 0.0)
                .fold(f64::INFINITY, f64::min);
            let reference = if narrowest.is_finite() {
                narrowest
            } else {
                let slope = lin.dk_grad[coord::WS]
                    .abs()
                    .max(lin.dk_grad[coord::WI].abs());
                if slope == 0.0 {
                    return Err(Error::Validation(
                        "CW pump needs a finite filter or a frequency-dependent phase mismatch"
                            .into(),
                    ));
                }
                2.0 / (config.beta * config.length * slope)
            };
            Ok(std::f64::consts::SQRT_2 * CW_BANDWIDTH_RATIO / reference)
        }
    }
}

pub fn has_limits(config: &Config) -> bool {
    config.collection_width_signal.is_infinite()
        || config.collection_width_idler.is_infinite()
        || config.filter_width_signal == 0.0
        || config.filter_width_idler == 0.0
}

/// `A` split by origin. The pump-y and phase-matching terms are kept
/// separate so that the reduced quadrature can swap them for exact factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFunctionTerms {
    /// Pump-x, pump-time, collection and filter terms.
    pub base: QuadraticForm,
    /// `2γ` of the pump-y term, along `d0_grad`.
    pub pump_y_weight: f64,
    /// `2γ` of the phase-matching term, along `dk_grad`.
    pub phase_matching_weight: f64,
    pub d0_grad: [f64; 6],
    pub dk_grad: [f64; 6],
    pub pump_duration: f64,
}

impl ModeFunctionTerms {
    pub fn matrix(&self) -> QuadraticForm {
        let mut a = self.base.clone();
        a.add_rank_one(self.pump_y_weight, &self.d0_grad);
        a.add_rank_one(self.phase_matching_weight, &self.dk_grad);
        a
    }
}

pub fn assemble_terms(
    config: &Config,
    lin: &Linearization,
    options: &AssemblyOptions,
) -> Result<ModeFunctionTerms> {
    let mut e = [[0.0; 6]; 6];
    for (i, row) in e.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let sum = |i: usize, j: usize| -> [f64; 6] {
        let mut c = [0.0; 6];
        c[i] = 1.0;
        c[j] = 1.0;
        c
    };

    let t0 = pump_duration(config, lin)? * options.pump_duration_scale;
    let wp2 = config.pump_waist * config.pump_waist;
    let mut base = QuadraticForm::zeros(6);
    base.add_rank_one(wp2 / 2.0, &sum(coord::QSX, coord::QIX));
    base.add_rank_one(t0 * t0 / 2.0, &sum(coord::WS, coord::WI));

    // coordinates whose precision goes to infinity
    let mut limits: Vec<usize> = Vec::new();
    for (width, coords) in [
        (config.collection_width_signal, [coord::QSX, coord::QSY]),
        (config.collection_width_idler, [coord::QIX, coord::QIY]),
    ] {
        if width.is_infinite() {
            limits.extend(coords);
        } else if width > 0.0 {
            for j in coords {
                base.add_rank_one(width * width, &e[j]);
            }
        }
    }
    for (width, center, j) in [
        (
            config.filter_width_signal,
            config.signal_wavelength,
            coord::WS,
        ),
        (
            config.filter_width_idler,
            config.idler_wavelength,
            coord::WI,
        ),
    ] {
        let b = bandwidth_from_wavelength(width, center)?;
        if b == 0.0 {
            limits.push(j);
        } else if b.is_finite() {
            base.add_rank_one(1.0 / (b * b), &e[j]);
        }
    }

    let mut terms = ModeFunctionTerms {
        base,
        pump_y_weight: wp2 / 2.0,
        phase_matching_weight: config.beta * config.beta * config.length * config.length / 2.0,
        d0_grad: lin.d0_grad,
        dk_grad: lin.dk_grad,
        pump_duration: t0,
    };

    if !limits.is_empty() {
        let factor = match options.limits {
            LimitPolicy::Extreme(f) => f,
            LimitPolicy::Reject => {
                return Err(Error::Limit(
                    "zero filter bandwidth or infinite collection width needs the extreme-value representation".into(),
                ))
            }
        };
        let finite = terms.matrix();
        let largest = |kind: &[usize]| kind.iter().map(|&j| finite[(j, j)]).fold(0.0, f64::max);
        let (scale_q, scale_w) = (largest(&MOMENTUM), largest(&FREQUENCY));
        for j in limits {
            let scale = if FREQUENCY.contains(&j) {
                scale_w
            } else {
                scale_q
            };
            terms.base[(j, j)] += factor * scale;
        }
    }

    if !terms.base.is_finite()
        || !terms.pump_y_weight.is_finite()
        || !terms.phase_matching_weight.is_finite()
        || !terms
            .d0_grad
            .iter()
            .chain(&terms.dk_grad)
            .all(|v| v.is_finite())
    {
        return Err(Error::Assembly(
            "mode-function matrix has non-finite entries".into(),
        ));
    }
    Ok(terms)
}

pub fn assemble_a(config: &Config, lin: &Linearization) -> Result<QuadraticForm> {
    assemble_a_with(config, lin, &AssemblyOptions::default())
}

pub fn assemble_a_with(
    config: &Config,
    lin: &Linearization,
    options: &AssemblyOptions,
) -> Result<QuadraticForm> {
    Ok(assemble_terms(config, lin, options)?.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_formula() {
        assert_eq!(bandwidth_from_wavelength(0.0, 0.81).unwrap(), 0.0);
        assert_eq!(
            bandwidth_from_wavelength(f64::INFINITY, 0.81).unwrap(),
            f64::INFINITY
        );
        let b = bandwidth_from_wavelength(1.0, 0.81).unwrap();
        let expect = std::f64::consts::PI * 0.299_792_458 * 1e-3 / (0.81 * 0.81 * 2f64.ln().sqrt());
        assert!((b - expect).abs() < 1e-18);
        let b2 = bandwidth_from_wavelength(2.0, 0.81).unwrap();
        assert!((b2 - 2.0 * b).abs() < 1e-17);
        assert!(bandwidth_from_wavelength(-1.0, 0.81).is_err());
    }
}
