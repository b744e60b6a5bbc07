use crate::dispersion::{CrystalModel, OpticalAxis};
use crate::error::{Error, Result};

/// Default constant of the Gaussian fit to `sinc(Δ_k L/2)`.
pub const DEFAULT_BETA: f64 = 0.455;

/// Relative tolerance of the centre-frequency energy balance.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

/// Temporal description of the pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpSpectrum {
    /// Pulse duration T₀ in fs, envelope `exp(-T₀² Ω_p² / 4)`.
    Duration(f64),
    /// Half width at 1/e in wavelength, nm.
    Bandwidth(f64),
    /// Continuous wave, represented by a long finite pulse.
    ContinuousWave,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Walkoff {
    /// Fixed walk-off angle ρ₀, radians.
    Manual(f64),
    /// ρ₀ of the extraordinary pump at the cut angle.
    Computed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutAngle {
    /// Solve for the angle that phase-matches the central frequencies.
    Auto,
    Manual(f64),
}

/// Physical description of one down-conversion setup.
///
/// Type I interaction: the pump is extraordinary at the cut angle, signal
/// and idler are ordinary. Emission angles are internal to the crystal.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub crystal: CrystalModel,
    /// Crystal length L, µm.
    pub length: f64,
    /// Central vacuum wavelengths, µm.
    pub pump_wavelength: f64,
    pub signal_wavelength: f64,
    pub idler_wavelength: f64,
    /// Pump waist w_p, µm.
    pub pump_waist: f64,
    pub pump_spectrum: PumpSpectrum,
    /// Collection mode widths w_s, w_i in µm; `f64::INFINITY` collects a single q.
    pub collection_width_signal: f64,
    pub collection_width_idler: f64,
    /// Filter half widths at 1/e, nm; 0 is a single-frequency filter and
    /// `f64::INFINITY` means no filter.
    pub filter_width_signal: f64,
    pub filter_width_idler: f64,
    /// Internal emission angles φ_s, φ_i, radians.
    pub emission_angle_signal: f64,
    pub emission_angle_idler: f64,
    /// Azimuthal walk-off orientation α, radians.
    pub azimuth: f64,
    pub walkoff: Walkoff,
    pub cut_angle: CutAngle,
    pub beta: f64,
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        fn finite_positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "{name} must be finite and > 0, got {v}"
                )))
            }
        }
        fn non_negative(name: &str, v: f64) -> Result<()> {
            if !v.is_nan() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} must be >= 0, got {v}")))
            }
        }
        fn finite(name: &str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} must be finite, got {v}")))
            }
        }

        finite_positive("crystal length", self.length)?;
        finite_positive("pump wavelength", self.pump_wavelength)?;
        finite_positive("signal wavelength", self.signal_wavelength)?;
        finite_positive("idler wavelength", self.idler_wavelength)?;
        finite_positive("pump waist", self.pump_waist)?;
        finite_positive("beta", self.beta)?;
        match self.pump_spectrum {
            PumpSpectrum::Duration(t) => finite_positive("pump duration", t)?,
            PumpSpectrum::Bandwidth(b) => finite_positive("pump bandwidth", b)?,
            PumpSpectrum::ContinuousWave => {}
        }
        non_negative("signal collection width", self.collection_width_signal)?;
        non_negative("idler collection width", self.collection_width_idler)?;
        non_negative("signal filter width", self.filter_width_signal)?;
        non_negative("idler filter width", self.filter_width_idler)?;
        finite("signal emission angle", self.emission_angle_signal)?;
        finite("idler emission angle", self.emission_angle_idler)?;
        finite("azimuth", self.azimuth)?;
        if let Walkoff::Manual(rho) = self.walkoff {
            finite("walk-off angle", rho)?;
            if rho.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::Validation(format!(
                    "walk-off angle {rho} rad out of range"
                )));
            }
        }
        if let CutAngle::Manual(theta) = self.cut_angle {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
                return Err(Error::Validation(format!(
                    "cut angle {theta} rad outside [0, pi/2]"
                )));
            }
        }

        let lhs = 1.0 / self.pump_wavelength;
        let rhs = 1.0 / self.signal_wavelength + 1.0 / self.idler_wavelength;
        if ((lhs - rhs) / lhs).abs() > ENERGY_TOLERANCE {
            return Err(Error::Validation(format!(
                "energy conservation violated: 1/lambda_p = {lhs:.12} but 1/lambda_s + 1/lambda_i = {rhs:.12} (1/um)"
            )));
        }

        for (name, wl) in [
            ("pump", self.pump_wavelength),
            ("signal", self.signal_wavelength),
            ("idler", self.idler_wavelength),
        ] {
            crate::dispersion::refractive_index(&self.crystal, OpticalAxis::ordinary(), wl)
                .map_err(|e| Error::Validation(format!("{name} wavelength: {e}")))?;
        }
        Ok(())
    }

    /// Sets w_s = w_i.
    pub fn with_collection_width(mut self, width: f64) -> Self {
        self.collection_width_signal = width;
        self.collection_width_idler = width;
        self
    }

    /// Sets Δλ_s = Δλ_i.
    pub fn with_filter_width(mut self, width: f64) -> Self {
        self.filter_width_signal = width;
        self.filter_width_idler = width;
        self
    }

    pub fn with_pump_waist(mut self, waist: f64) -> Self {
        self.pump_waist = waist;
        self
    }

    /// Sets φ_s = φ_i (radians).
    pub fn with_emission_angle(mut self, angle: f64) -> Self {
        self.emission_angle_signal = angle;
        self.emission_angle_idler = angle;
        self
    }
}
