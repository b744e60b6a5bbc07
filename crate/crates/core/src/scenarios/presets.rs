use crate::config::{Config, CutAngle, PumpSpectrum, Walkoff, DEFAULT_BETA};
use crate::dispersion::CrystalModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub config: Config,
    /// Where the parameters come from and which of them were assumed.
    pub note: &'static str,
}

/// All preset names, in listing order.
pub const PRESET_NAMES: [&str; 13] = [
    "fig2",
    "fig4",
    "fig5a",
    "fig5b",
    "fig5c",
    "valencia_w30",
    "valencia_w30_ws133",
    "valencia_w30_ws48",
    "valencia_w462",
    "valencia_w462_ws133",
    "valencia_w462_ws48",
    "teich",
    "altman",
];

/// Default collection width where a scenario sweeps it, µm.
pub const DEFAULT_COLLECTION_WIDTH: f64 = 100.0;

/// Pump waist standing in for "much larger than the crystal", µm.
pub const TEICH_PUMP_WAIST: f64 = 5000.0;

fn liio3_405(emission_deg: f64) -> Config {
    Config {
        crystal: CrystalModel::liio3(),
        length: 1000.0,
        pump_wavelength: 0.405,
        signal_wavelength: 0.81,
        idler_wavelength: 0.81,
        pump_waist: 400.0,
        pump_spectrum: PumpSpectrum::Bandwidth(0.4),
        collection_width_signal: DEFAULT_COLLECTION_WIDTH,
        collection_width_idler: DEFAULT_COLLECTION_WIDTH,
        filter_width_signal: 1.0,
        filter_width_idler: 1.0,
        emission_angle_signal: emission_deg.to_radians(),
        emission_angle_idler: emission_deg.to_radians(),
        azimuth: 0.0,
        walkoff: Walkoff::Manual(0.0),
        cut_angle: CutAngle::Auto,
        beta: DEFAULT_BETA,
    }
}

fn valencia(pump_waist: f64, collection: f64) -> Config {
    Config {
        pump_waist,
        ..liio3_405(17.0)
    }
    .with_filter_width(0.2)
    .with_collection_width(collection)
}

fn build(name: &str) -> Option<(Config, &'static str)> {
    const FIG2: &str =
        "spatial purity vs collection width: LiIO3 type I, L = 1 mm, 405 -> 810 + 810 nm, \
        phi = 10 deg, w_p = 400 um, rho0 = 0; defaults w = 100 um, filters 1 nm; \
        pump bandwidth 0.4 nm assumed (taken from the Valencia diode)";
    const FIG4: &str =
        "signal purity vs collection width, same setup as fig2 (crystal and pump assumed as fig2)";
    const FIG5A: &str = "signal purity vs pump waist: fig2 setup, filters 10 nm, w_s = w_i -> infinity, phi = 10 deg (sweep phi)";
    const FIG5B: &str = "signal purity vs pump waist: fig2 setup, filters -> 0 nm, w_s = w_i = 400 um, phi = 10 deg (sweep phi)";
    const FIG5C: &str = "signal purity vs pump waist: fig2 setup, filters 10 nm, w_s = w_i = 400 um, phi = 10 deg (sweep phi)";
    const VAL30: &str = "Valencia et al.: LiIO3 1 mm, diode pump 405 nm with 0.4 nm bandwidth, phi = 17 deg, \
        monochromators 0.2 nm, w_p = 30 um; printed collection width \"133,48 um\" is ambiguous, this uses 133 um";
    const VAL30_133: &str = "Valencia et al., w_p = 30 um, collection width 133 um";
    const VAL30_48: &str = "Valencia et al., w_p = 30 um, collection width 48 um";
    const VAL462: &str =
        "Valencia et al.: as valencia_w30 with w_p = 462 um, collection width 133 um";
    const VAL462_133: &str = "Valencia et al., w_p = 462 um, collection width 133 um";
    const VAL462_48: &str = "Valencia et al., w_p = 462 um, collection width 48 um";
    const TEICH: &str = "Teich et al.: BBO 1.5 mm, CW pump 405 nm, 810 nm pairs, filters 10 nm, collinear; \
        w_p >> L realized as w_p = 5 mm (doubling it changes the purity by < 1e-3); default w = 100 um";
    const ALTMAN: &str = "Altman et al.: BBO 2 mm, CW pump 351.1 nm, 702.2 nm pairs (quoted as 702 nm), w_p = 20 um, \
        phi = 4 deg, filters 10 nm; default w = 100 um";

    let fig5 = |filter: f64, collection: f64| {
        liio3_405(10.0)
            .with_filter_width(filter)
            .with_collection_width(collection)
    };
    let bbo = |length: f64, pump: f64, waist: f64, phi_deg: f64| Config {
        crystal: CrystalModel::bbo(),
        length,
        pump_wavelength: pump,
        signal_wavelength: 2.0 * pump,
        idler_wavelength: 2.0 * pump,
        pump_waist: waist,
        pump_spectrum: PumpSpectrum::ContinuousWave,
        filter_width_signal: 10.0,
        filter_width_idler: 10.0,
        ..liio3_405(phi_deg)
    };

    Some(match name {
        "fig2" => (liio3_405(10.0), FIG2),
        "fig4" => (liio3_405(10.0), FIG4),
        "fig5a" => (fig5(10.0, f64::INFINITY), FIG5A),
        "fig5b" => (fig5(0.0, 400.0), FIG5B),
        "fig5c" => (fig5(10.0, 400.0), FIG5C),
        "valencia_w30" => (valencia(30.0, 133.0), VAL30),
        "valencia_w30_ws133" => (valencia(30.0, 133.0), VAL30_133),
        "valencia_w30_ws48" => (valencia(30.0, 48.0), VAL30_48),
        "valencia_w462" => (valencia(462.0, 133.0), VAL462),
        "valencia_w462_ws133" => (valencia(462.0, 133.0), VAL462_133),
        "valencia_w462_ws48" => (valencia(462.0, 48.0), VAL462_48),
        "teich" => (bbo(1500.0, 0.405, TEICH_PUMP_WAIST, 0.0), TEICH),
        "altman" => (bbo(2000.0, 0.3511, 20.0, 4.0), ALTMAN),
        _ => return None,
    })
}

pub fn find_preset(name: &str) -> Result<Preset> {
    let key = name.trim().to_ascii_lowercase();
    let canonical = PRESET_NAMES.iter().find(|n| **n == key).ok_or_else(|| {
        Error::Validation(format!(
            "unknown preset '{name}'; valid presets: {}",
            PRESET_NAMES.join(", ")
        ))
    })?;
    let (config, note) = build(canonical).expect("every listed preset is defined");
    Ok(Preset {
        name: canonical,
        config,
        note,
    })
}

pub fn preset(name: &str) -> Result<Config> {
    Ok(find_preset(name)?.config)
}

pub fn presets() -> Vec<Preset> {
    PRESET_NAMES
        .iter()
        .map(|n| find_preset(n).expect("every listed preset is defined"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headline_parameters() {
        let fig2 = preset("fig2").unwrap();
        assert!((fig2.emission_angle_signal - 10f64.to_radians()).abs() < 1e-15);
        assert_eq!(fig2.pump_waist, 400.0);
        assert_eq!(preset("altman").unwrap().pump_wavelength, 0.3511);
        assert_eq!(preset("teich").unwrap().emission_angle_signal, 0.0);
        assert_eq!(preset("valencia_w462").unwrap().pump_waist, 462.0);
    }

    #[test]
    fn unknown_name_lists_valid_ones() {
        let err = preset("fig9").unwrap_err().to_string();
        assert!(err.contains("fig2") && err.contains("altman"), "{err}");
    }

    #[test]
    fn every_preset_validates() {
        for p in presets() {
            p.config
                .validate()
                .unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }
}
