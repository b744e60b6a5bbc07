//! Phase-mismatch factors Δ₀ and Δ_k of the two-photon mode function and
//! their first-order expansion around the central frequencies.
//!
//! Coordinates are always ordered `x = (q_s^x, q_s^y, Ω_s, q_i^x, q_i^y, Ω_i)`,
//! momenta in rad/µm and detunings in rad/fs.
//!
//! ```text
//! Δ₀  = q_s^y cos φ_s + q_i^y cos φ_i + k_s sin φ_s − k_i sin φ_i
//! Δ_k = k_p − k_s cos φ_s − k_i cos φ_i − q_s^y sin φ_s + q_i^y sin φ_i
//!       + (q_s^x + q_i^x) tan ρ₀ cos α + Δ₀ tan ρ₀ sin α
//! k_n = [(ω_n n_n(ω_n)/c)² − |q_n|²]^½,  ω_n = ω_n⁰ + Ω_n
//! ```
//!
//! The pump wave number carries no transverse correction and is evaluated
//! at `ω_p⁰ + Ω_s + Ω_i`. Signal and idler sit on opposite sides of the
//! pump in the y–z plane, which is what the minus sign on `k_i sin φ_i`
//! encodes.

use std::f64::consts::FRAC_PI_2;

use crate::config::{Config, CutAngle, Walkoff};
use crate::dispersion::{group_index, refractive_index, walkoff_angle, OpticalAxis};
use crate::error::{Error, Result};
use crate::{angular_frequency, vacuum_wavelength, SPEED_OF_LIGHT};

/// Index of each coordinate in `x`.
pub mod coord {
    pub const QSX: usize = 0;
    pub const QSY: usize = 1;
    pub const WS: usize = 2;
    pub const QIX: usize = 3;
    pub const QIY: usize = 4;
    pub const WI: usize = 5;
}

/// Target residual of the cut-angle solver, rad/µm.
pub const CUT_ANGLE_TOLERANCE: f64 = 1e-9;

/// First-order expansion of Δ₀ and Δ_k around x = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub d0_const: f64,
    pub d0_grad: [f64; 6],
    pub dk_const: f64,
    pub dk_grad: [f64; 6],
}

/// Exact Δ₀ / Δ_k evaluator with the cut angle and walk-off resolved once.
#[derive(Debug, Clone)]
pub struct DeltaEvaluator<'a> {
    config: &'a Config,
    cut_angle: f64,
    walkoff: f64,
}

impl<'a> DeltaEvaluator<'a> {
    pub fn new(config: &'a Config) -> Result<Self> {
        let cut_angle = match config.cut_angle {
            CutAngle::Manual(theta) => theta,
            CutAngle::Auto => solve_cut_angle(config)?,
        };
        let walkoff = resolve_walkoff(config, cut_angle)?;
        Ok(Self {
            config,
            cut_angle,
            walkoff,
        })
    }

    pub fn config(&self) -> &Config {
        self.config
    }

    pub fn cut_angle(&self) -> f64 {
        self.cut_angle
    }

    pub fn walkoff(&self) -> f64 {
        self.walkoff
    }

    pub fn pump_axis(&self) -> OpticalAxis {
        OpticalAxis::extraordinary(self.cut_angle)
    }

    fn longitudinal(&self, which: &str, center_wl: f64, detuning: f64, q2: f64) -> Result<f64> {
        let omega = angular_frequency(center_wl) + detuning;
        if omega <= 0.0 {
            return Err(Error::Domain(format!(
                "{which} frequency {omega} rad/fs is not positive"
            )));
        }
        let n = refractive_index(
            &self.config.crystal,
            OpticalAxis::ordinary(),
            vacuum_wavelength(omega),
        )?;
        let k0 = omega * n / SPEED_OF_LIGHT;
        let radicand = k0 * k0 - q2;
        if radicand <= 0.0 {
            return Err(Error::Domain(format!(
                "{which}: |q|^2 = {q2} exceeds (omega n / c)^2 = {}",
                k0 * k0
            )));
        }
        Ok(radicand.sqrt())
    }

    fn signal_k(&self, x: &[f64; 6]) -> Result<f64> {
        let q2 = x[coord::QSX].powi(2) + x[coord::QSY].powi(2);
        self.longitudinal("signal", self.config.signal_wavelength, x[coord::WS], q2)
    }

    fn idler_k(&self, x: &[f64; 6]) -> Result<f64> {
        let q2 = x[coord::QIX].powi(2) + x[coord::QIY].powi(2);
        self.longitudinal("idler", self.config.idler_wavelength, x[coord::WI], q2)
    }

    fn pump_k(&self, x: &[f64; 6]) -> Result<f64> {
        let omega = angular_frequency(self.config.pump_wavelength) + x[coord::WS] + x[coord::WI];
        if omega <= 0.0 {
            return Err(Error::Domain(format!(
                "pump frequency {omega} rad/fs is not positive"
            )));
        }
        let n = refractive_index(
            &self.config.crystal,
            self.pump_axis(),
            vacuum_wavelength(omega),
        )?;
        Ok(omega * n / SPEED_OF_LIGHT)
    }

    pub fn delta0(&self, x: &[f64; 6]) -> Result<f64> {
        let c = self.config;
        let (ss, cs) = c.emission_angle_signal.sin_cos();
        let (si, ci) = c.emission_angle_idler.sin_cos();
        let ks = self.signal_k(x)?;
        let ki = self.idler_k(x)?;
        Ok(x[coord::QSY] * cs + x[coord::QIY] * ci + ks * ss - ki * si)
    }

    pub fn deltak(&self, x: &[f64; 6]) -> Result<f64> {
        let c = self.config;
        let (ss, cs) = c.emission_angle_signal.sin_cos();
        let (si, ci) = c.emission_angle_idler.sin_cos();
        let ks = self.signal_k(x)?;
        let ki = self.idler_k(x)?;
        let kp = self.pump_k(x)?;
        let tr = self.walkoff.tan();
        let (sa, ca) = c.azimuth.sin_cos();
        let d0 = self.delta0(x)?;
        Ok(kp - ks * cs - ki * ci - x[coord::QSY] * ss
            + x[coord::QIY] * si
            + (x[coord::QSX] + x[coord::QIX]) * tr * ca
            + d0 * tr * sa)
    }

    pub fn linearize(&self) -> Result<Linearization> {
        let c = self.config;
        let crystal = &c.crystal;
        let ng_s = group_index(crystal, OpticalAxis::ordinary(), c.signal_wavelength)?;
        let ng_i = group_index(crystal, OpticalAxis::ordinary(), c.idler_wavelength)?;
        let ng_p = group_index(crystal, self.pump_axis(), c.pump_wavelength)?;
        let (ss, cs) = c.emission_angle_signal.sin_cos();
        let (si, ci) = c.emission_angle_idler.sin_cos();
        let inv_c = 1.0 / SPEED_OF_LIGHT;

        let d0_grad = [0.0, cs, ss * ng_s * inv_c, 0.0, ci, -si * ng_i * inv_c];

        let tr = self.walkoff.tan();
        let (sa, ca) = c.azimuth.sin_cos();
        let mut dk_grad = [
            tr * ca,
            -ss,
            (ng_p - cs * ng_s) * inv_c,
            tr * ca,
            si,
            (ng_p - ci * ng_i) * inv_c,
        ];
        for (g, d) in dk_grad.iter_mut().zip(d0_grad) {
            *g += tr * sa * d;
        }

        let origin = [0.0; 6];
        Ok(Linearization {
            d0_const: self.delta0(&origin)?,
            d0_grad,
            dk_const: self.deltak(&origin)?,
            dk_grad,
        })
    }
}

fn resolve_walkoff(config: &Config, cut_angle: f64) -> Result<f64> {
    match config.walkoff {
        Walkoff::Manual(rho) => Ok(rho),
        Walkoff::Computed => walkoff_angle(&config.crystal, cut_angle, config.pump_wavelength),
    }
}

pub fn delta0_exact(config: &Config, x: &[f64; 6]) -> Result<f64> {
    DeltaEvaluator::new(config)?.delta0(x)
}

pub fn deltak_exact(config: &Config, x: &[f64; 6]) -> Result<f64> {
    DeltaEvaluator::new(config)?.deltak(x)
}

pub fn linearize(config: &Config) -> Result<Linearization> {
    config.validate()?;
    DeltaEvaluator::new(config)?.linearize()
}

/// Cut angle θ ∈ [0, π/2] at which Δ_k vanishes for the central
/// frequencies, by bisection.
pub fn solve_cut_angle(config: &Config) -> Result<f64> {
    let mismatch = |theta: f64| -> Result<f64> {
        let eval = DeltaEvaluator {
            config,
            cut_angle: theta,
            walkoff: resolve_walkoff(config, theta)?,
        };
        eval.deltak(&[0.0; 6])
    };

    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    let mut f_lo = mismatch(lo)?;
    let f_hi = mismatch(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoPhaseMatching(format!(
            "{} crystal: Delta_k at theta = 0 is {f_lo:.6e} rad/um and at theta = pi/2 is {f_hi:.6e} rad/um; no sign change",
            config.crystal.kind
        )));
    }

    let mut best = (f64::INFINITY, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = mismatch(mid)?;
        if f_mid.abs() < best.0 {
            best = (f_mid.abs(), mid);
        }
        if f_mid == 0.0 || hi - lo <= f64::EPSILON * mid.max(1e-300) {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if best.0 >= CUT_ANGLE_TOLERANCE {
        return Err(Error::NoPhaseMatching(format!(
            "bisection stalled with residual {:.3e} rad/um at theta = {}",
            best.0, best.1
        )));
    }
    Ok(best.1)
}
