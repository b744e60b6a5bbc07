//! Refractive index, group index and walk-off for uniaxial crystals.
//!
//! Both built-in crystals use the four-coefficient Sellmeier form
//!
//! ```text
//! n²(λ) = a + b / (λ² − c) − d λ²        (λ in µm)
//! ```
//!
//! Coefficient sources (room temperature, no thermal terms):
//! - BBO: D. Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
//! - LiIO3: K. Kato, IEEE J. Quantum Electron. QE-21, 119 (1985).
//!
//! The extraordinary index at propagation angle θ to the optic axis is
//! `1/n(θ)² = cos²θ/n_o² + sin²θ/n_e²`.

use std::fmt;

use crate::error::{Error, Result};

/// Step used by the finite-difference group index, µm.
pub const GROUP_INDEX_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum CrystalKind {
    LiIO3,
    Bbo,
    /// Synthetic crystal, used for limiting cases.
    Custom(String),
}

impl fmt::Display for CrystalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrystalKind::LiIO3 => write!(f, "LiIO3"),
            CrystalKind::Bbo => write!(f, "BBO"),
            CrystalKind::Custom(name) => write!(f, "{name}"),
        }
    }
}

/// `n²(λ) = a + b/(λ² − c) − d λ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sellmeier {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sellmeier {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// A wavelength-independent index.
    pub fn constant(n: f64) -> Self {
        Self::new(n * n, 0.0, 0.0, 0.0)
    }

    pub fn index(&self, wavelength: f64) -> f64 {
        let l2 = wavelength * wavelength;
        (self.a + self.b / (l2 - self.c) - self.d * l2).sqrt()
    }

    /// dn/dλ from the closed form.
    pub fn derivative(&self, wavelength: f64) -> f64 {
        let l2 = wavelength * wavelength;
        let denom = l2 - self.c;
        let dn2 = -2.0 * self.b * wavelength / (denom * denom) - 2.0 * self.d * wavelength;
        dn2 / (2.0 * self.index(wavelength))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalModel {
    pub kind: CrystalKind,
    pub ordinary: Sellmeier,
    pub extraordinary: Sellmeier,
    /// Inclusive valid wavelength range, µm.
    pub valid_range: (f64, f64),
}

impl CrystalModel {
    pub fn bbo() -> Self {
        Self {
            kind: CrystalKind::Bbo,
            ordinary: Sellmeier::new(2.7405, 0.0184, 0.0179, 0.0155),
            extraordinary: Sellmeier::new(2.3730, 0.0128, 0.0156, 0.0044),
            valid_range: (0.22, 1.06),
        }
    }

    pub fn liio3() -> Self {
        Self {
            kind: CrystalKind::LiIO3,
            ordinary: Sellmeier::new(3.415716, 0.047031, 0.035306, 0.008801),
            extraordinary: Sellmeier::new(2.918692, 0.035145, 0.028224, 0.003641),
            valid_range: (0.35, 4.0),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        ordinary: Sellmeier,
        extraordinary: Sellmeier,
        valid_range: (f64, f64),
    ) -> Self {
        Self {
            kind: CrystalKind::Custom(name.into()),
            ordinary,
            extraordinary,
            valid_range,
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "liio3" => Ok(Self::liio3()),
            "bbo" => Ok(Self::bbo()),
            other => Err(Error::Validation(format!(
                "unknown crystal '{other}' (expected LiIO3 or BBO)"
            ))),
        }
    }

    fn check_range(&self, wavelength: f64) -> Result<()> {
        let (min, max) = self.valid_range;
        if wavelength.is_finite() && wavelength >= min && wavelength <= max {
            Ok(())
        } else {
            Err(self.range_error(wavelength))
        }
    }

    fn check_interior(&self, wavelength: f64) -> Result<()> {
        let (min, max) = self.valid_range;
        if wavelength.is_finite() && wavelength > min && wavelength < max {
            Ok(())
        } else {
            Err(self.range_error(wavelength))
        }
    }

    fn range_error(&self, wavelength: f64) -> Error {
        Error::WavelengthRange {
            crystal: self.kind.to_string(),
            wavelength,
            min: self.valid_range.0,
            max: self.valid_range.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Ordinary,
    Extraordinary,
}

/// Polarization plus propagation angle θ to the optic axis (radians,
/// only meaningful for extraordinary waves).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalAxis {
    pub polarization: Polarization,
    pub theta: f64,
}

impl OpticalAxis {
    pub fn ordinary() -> Self {
        Self {
            polarization: Polarization::Ordinary,
            theta: 0.0,
        }
    }

    pub fn extraordinary(theta: f64) -> Self {
        Self {
            polarization: Polarization::Extraordinary,
            theta,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.theta.is_finite() && (0.0..=std::f64::consts::FRAC_PI_2).contains(&self.theta) {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "propagation angle {} rad outside [0, pi/2]",
                self.theta
            )))
        }
    }
}

fn index_unchecked(crystal: &CrystalModel, axis: OpticalAxis, wavelength: f64) -> f64 {
    let no = crystal.ordinary.index(wavelength);
    match axis.polarization {
        Polarization::Ordinary => no,
        Polarization::Extraordinary => {
            let ne = crystal.extraordinary.index(wavelength);
            let (s, c) = axis.theta.sin_cos();
            1.0 / (c * c / (no * no) + s * s / (ne * ne)).sqrt()
        }
    }
}

pub fn refractive_index(crystal: &CrystalModel, axis: OpticalAxis, wavelength: f64) -> Result<f64> {
    axis.validate()?;
    crystal.check_range(wavelength)?;
    Ok(index_unchecked(crystal, axis, wavelength))
}

/// Group index `N_g = n − λ dn/dλ`, with dn/dλ taken analytically from the
/// Sellmeier form.
pub fn group_index(crystal: &CrystalModel, axis: OpticalAxis, wavelength: f64) -> Result<f64> {
    axis.validate()?;
    crystal.check_interior(wavelength)?;
    let no = crystal.ordinary.index(wavelength);
    let dno = crystal.ordinary.derivative(wavelength);
    let (n, dn) = match axis.polarization {
        Polarization::Ordinary => (no, dno),
        Polarization::Extraordinary => {
            let ne = crystal.extraordinary.index(wavelength);
            let dne = crystal.extraordinary.derivative(wavelength);
            let (s, c) = axis.theta.sin_cos();
            let n = index_unchecked(crystal, axis, wavelength);
            // d(1/n²) = -2 dn/n³ on both sides
            let dn = n.powi(3) * (c * c * dno / no.powi(3) + s * s * dne / ne.powi(3));
            (n, dn)
        }
    };
    Ok(n - wavelength * dn)
}

/// Same quantity as [`group_index`] by central difference with step
/// [`GROUP_INDEX_STEP`]; both stencil points must lie inside the valid range.
pub fn group_index_finite_difference(
    crystal: &CrystalModel,
    axis: OpticalAxis,
    wavelength: f64,
) -> Result<f64> {
    axis.validate()?;
    let h = GROUP_INDEX_STEP;
    crystal.check_range(wavelength - h)?;
    crystal.check_range(wavelength + h)?;
    let n = index_unchecked(crystal, axis, wavelength);
    let dn = (index_unchecked(crystal, axis, wavelength + h)
        - index_unchecked(crystal, axis, wavelength - h))
        / (2.0 * h);
    Ok(n - wavelength * dn)
}

/// `k = 2π n / λ`, rad/µm.
pub fn wave_number(index: f64, wavelength_vacuum: f64) -> f64 {
    2.0 * std::f64::consts::PI * index / wavelength_vacuum
}

/// Poynting-vector walk-off of an extraordinary wave at angle θ:
/// `tan ρ = (n(θ)²/2) |1/n_e² − 1/n_o²| sin 2θ`.
pub fn walkoff_angle(crystal: &CrystalModel, theta: f64, wavelength: f64) -> Result<f64> {
    let axis = OpticalAxis::extraordinary(theta);
    let n = refractive_index(crystal, axis, wavelength)?;
    let no = crystal.ordinary.index(wavelength);
    let ne = crystal.extraordinary.index(wavelength);
    let tan_rho = 0.5 * n * n * (1.0 / (ne * ne) - 1.0 / (no * no)).abs() * (2.0 * theta).sin();
    Ok(tan_rho.abs().atan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn bbo_ordinary_at_810() {
        let n = refractive_index(&CrystalModel::bbo(), OpticalAxis::ordinary(), 0.810).unwrap();
        assert!(n > 1.6 && n < 1.7);
        assert!(rel(n, 1.66107) < 5e-6);
    }

    #[test]
    fn liio3_ordinary_at_405() {
        let n = refractive_index(&CrystalModel::liio3(), OpticalAxis::ordinary(), 0.405).unwrap();
        assert!(n > 1.8 && n < 2.0);
        assert!(rel(n, 1.94413) < 5e-6);
    }

    #[test]
    fn extraordinary_at_zero_angle_is_ordinary() {
        let c = CrystalModel::bbo();
        for &l in &[0.3511, 0.405, 0.7022, 0.81] {
            let no = refractive_index(&c, OpticalAxis::ordinary(), l).unwrap();
            let ne0 = refractive_index(&c, OpticalAxis::extraordinary(0.0), l).unwrap();
            assert!((no - ne0).abs() < 1e-15);
        }
        let ne90 = refractive_index(&c, OpticalAxis::extraordinary(FRAC_PI_2), 0.405).unwrap();
        assert!((ne90 - c.extraordinary.index(0.405)).abs() < 1e-14);
    }

    #[test]
    fn out_of_range_names_crystal_and_bound() {
        let err = refractive_index(&CrystalModel::bbo(), OpticalAxis::ordinary(), 2.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("BBO") && msg.contains("1.06"), "{msg}");
        assert!(refractive_index(&CrystalModel::liio3(), OpticalAxis::ordinary(), 0.2).is_err());
    }

    #[test]
    fn group_index_rejects_range_boundary() {
        let c = CrystalModel::bbo();
        assert!(group_index(&c, OpticalAxis::ordinary(), 0.22).is_err());
        assert!(group_index(&c, OpticalAxis::ordinary(), 1.06).is_err());
        assert!(refractive_index(&c, OpticalAxis::ordinary(), 1.06).is_ok());
    }

    #[test]
    fn constant_index_has_group_index_equal_to_index() {
        let c = CrystalModel::custom(
            "flat",
            Sellmeier::constant(1.5),
            Sellmeier::constant(1.4),
            (0.2, 2.0),
        );
        for axis in [OpticalAxis::ordinary(), OpticalAxis::extraordinary(0.7)] {
            let n = refractive_index(&c, axis, 0.8).unwrap();
            let ng = group_index(&c, axis, 0.8).unwrap();
            assert!((ng - n).abs() < 1e-14);
        }
    }

    #[test]
    fn bbo_group_index_at_810() {
        let ng = group_index(&CrystalModel::bbo(), OpticalAxis::ordinary(), 0.810).unwrap();
        // independent high-precision numerical derivative of the same Sellmeier curve
        assert!(rel(ng, 1.685_038_417_842_836) < 1e-12);
        let n = CrystalModel::bbo().ordinary.index(0.81);
        assert!(ng > n);
    }

    #[test]
    fn analytic_and_finite_difference_group_index_agree() {
        for crystal in [CrystalModel::bbo(), CrystalModel::liio3()] {
            for axis in [OpticalAxis::ordinary(), OpticalAxis::extraordinary(0.5)] {
                for &l in &[0.405, 0.5, 0.702, 0.81] {
                    let a = group_index(&crystal, axis, l).unwrap();
                    let f = group_index_finite_difference(&crystal, axis, l).unwrap();
                    assert!(rel(a, f) < 1e-6, "{:?} {l}: {a} vs {f}", crystal.kind);
                }
            }
        }
        let a = group_index(&CrystalModel::bbo(), OpticalAxis::ordinary(), 0.702).unwrap();
        assert!(rel(a, 1.693_552_204_603_988) < 1e-12);
    }

    #[test]
    fn wave_number_formula() {
        assert!((wave_number(1.0, 1.0) - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!((wave_number(1.5, 0.81) - 2.0 * std::f64::consts::PI * 1.5 / 0.81).abs() < 1e-14);
        let n = refractive_index(&CrystalModel::liio3(), OpticalAxis::ordinary(), 0.405).unwrap();
        assert!(rel(wave_number(n, 0.405), 30.161_339_231_774_635) < 1e-13);
    }

    #[test]
    fn walkoff_limits_and_pinned_value() {
        let c = CrystalModel::bbo();
        assert!(walkoff_angle(&c, FRAC_PI_2, 0.405).unwrap() < 1e-15);
        assert_eq!(walkoff_angle(&c, 0.0, 0.405).unwrap(), 0.0);
        let rho = walkoff_angle(&c, 0.5, 0.405).unwrap();
        assert!(rel(rho, 0.066_738_581_472_730) < 1e-12);

        let iso = CrystalModel::custom(
            "isotropic",
            Sellmeier::constant(1.6),
            Sellmeier::constant(1.6),
            (0.2, 2.0),
        );
        assert_eq!(walkoff_angle(&iso, 0.7, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn walkoff_positive_strictly_inside() {
        let c = CrystalModel::liio3();
        for i in 1..50 {
            let theta = FRAC_PI_2 * i as f64 / 50.0;
            assert!(walkoff_angle(&c, theta, 0.405).unwrap() > 0.0);
        }
    }

    #[test]
    fn indices_above_one_birefringent_and_decreasing() {
        for crystal in [CrystalModel::bbo(), CrystalModel::liio3()] {
            let (lo, hi) = crystal.valid_range;
            let mut prev: Option<(f64, f64)> = None;
            for i in 0..100 {
                let l = lo + (hi - lo) * i as f64 / 99.0;
                let no = refractive_index(&crystal, OpticalAxis::ordinary(), l).unwrap();
                let ne =
                    refractive_index(&crystal, OpticalAxis::extraordinary(FRAC_PI_2), l).unwrap();
                assert!(no > 1.0 && ne > 1.0);
                assert!((no - ne).abs() > 1e-3);
                if let Some((po, pe)) = prev {
                    assert!(
                        no < po && ne < pe,
                        "{:?} not decreasing at {l}",
                        crystal.kind
                    );
                }
                prev = Some((no, ne));
            }
        }
    }
}
