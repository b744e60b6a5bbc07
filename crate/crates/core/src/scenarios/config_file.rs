//! Flat `key = value` configuration files.
//!
//! ```text
//! # LiIO3, noncollinear
//! crystal = LiIO3
//! length_mm = 1
//! pump_wavelength_nm = 405
//! signal_wavelength_nm = 810      # idler follows from energy conservation
//! pump_waist_um = 400
//! pump_bandwidth_nm = 0.4         # or pump_duration_fs / pump = cw
//! collection_width_um = 100       # or _signal_um / _idler_um, inf allowed
//! filter_width_nm = 1             # or _signal_nm / _idler_nm, 0 and inf allowed
//! emission_angle_deg = 10
//! ```
//!
//! Units are fixed by key suffixes. Unknown keys, duplicates (including
//! the same quantity under two units, or a joint key next to a per-photon
//! one) and malformed values are rejected with the offending line number.

use std::collections::HashMap;
use std::path::Path;

use crate::config::{Config, CutAngle, PumpSpectrum, Walkoff, DEFAULT_BETA};
use crate::dispersion::{CrystalKind, CrystalModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quantity {
    Crystal,
    Length,
    Wavelength,
    Waist,
    PumpDuration,
    PumpBandwidth,
    Pump,
    Width,
    Filter,
    Angle,
    Walkoff,
    CutAngle,
    Beta,
}

/// (key stem, quantity, canonical slot for duplicate detection)
const KEYS: &[(&str, Quantity, &str)] = &[
    ("crystal", Quantity::Crystal, "crystal"),
    ("length", Quantity::Length, "length"),
    ("pump_wavelength", Quantity::Wavelength, "pump_wavelength"),
    (
        "signal_wavelength",
        Quantity::Wavelength,
        "signal_wavelength",
    ),
    ("idler_wavelength", Quantity::Wavelength, "idler_wavelength"),
    ("pump_waist", Quantity::Waist, "pump_waist"),
    ("pump_duration", Quantity::PumpDuration, "pump"),
    ("pump_bandwidth", Quantity::PumpBandwidth, "pump"),
    ("pump", Quantity::Pump, "pump"),
    ("collection_width", Quantity::Width, "collection_width"),
    (
        "collection_width_signal",
        Quantity::Width,
        "collection_width_signal",
    ),
    (
        "collection_width_idler",
        Quantity::Width,
        "collection_width_idler",
    ),
    ("filter_width", Quantity::Filter, "filter_width"),
    (
        "filter_width_signal",
        Quantity::Filter,
        "filter_width_signal",
    ),
    ("filter_width_idler", Quantity::Filter, "filter_width_idler"),
    ("emission_angle", Quantity::Angle, "emission_angle"),
    (
        "emission_angle_signal",
        Quantity::Angle,
        "emission_angle_signal",
    ),
    (
        "emission_angle_idler",
        Quantity::Angle,
        "emission_angle_idler",
    ),
    ("azimuth", Quantity::Angle, "azimuth"),
    ("walkoff", Quantity::Walkoff, "walkoff"),
    ("cut_angle", Quantity::CutAngle, "cut_angle"),
    ("beta", Quantity::Beta, "beta"),
];

/// Accepted suffixes per quantity and their factor to the internal unit.
fn suffixes(q: Quantity) -> &'static [(&'static str, f64)] {
    const DEG: f64 = std::f64::consts::PI / 180.0;
    match q {
        Quantity::Length | Quantity::Waist | Quantity::Width => &[("um", 1.0), ("mm", 1000.0)],
        Quantity::Wavelength => &[("um", 1.0), ("nm", 1e-3)],
        Quantity::PumpBandwidth | Quantity::Filter => &[("nm", 1.0)],
        Quantity::PumpDuration => &[("fs", 1.0), ("ps", 1000.0)],
        Quantity::Angle | Quantity::Walkoff | Quantity::CutAngle => &[("deg", DEG), ("rad", 1.0)],
        Quantity::Crystal | Quantity::Pump | Quantity::Beta => &[],
    }
}

/// Keyword-only keys: `walkoff = computed`, `cut_angle = auto`.
fn keyword_allowed(q: Quantity) -> bool {
    matches!(
        q,
        Quantity::Crystal
            | Quantity::Pump
            | Quantity::Walkoff
            | Quantity::CutAngle
            | Quantity::Beta
    )
}

#[derive(Debug, Clone)]
enum Value {
    Number(f64),
    Word(String),
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    quantity: Quantity,
    value: Value,
}

/// Quantity, duplicate slot and unit factor (`None` for a bare key).
fn resolve_key(key: &str) -> Option<(Quantity, &'static str, Option<f64>)> {
    for &(stem, q, slot) in KEYS {
        if key == stem && keyword_allowed(q) {
            return Some((q, slot, None));
        }
        if let Some(suffix) = key.strip_prefix(stem).and_then(|r| r.strip_prefix('_')) {
            if let Some(&(_, f)) = suffixes(q).iter().find(|(s, _)| *s == suffix) {
                return Some((q, slot, Some(f)));
            }
        }
    }
    None
}

fn parse_number(raw: &str) -> Option<f64> {
    match raw.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Some(f64::INFINITY),
        s => s.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Parses config text into a [`Config`] without validating it.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut entries: HashMap<&'static str, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected 'key = value', got '{content}'"),
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("missing value for '{key}'"),
            });
        }
        let (quantity, slot, factor) = resolve_key(&key).ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown key '{key}'"),
        })?;
        let joint_clash = |other: &str| entries.get(other).map(|e| e.line);
        let clash = entries.get(slot).map(|e| e.line).or_else(|| match slot {
            "collection_width" => {
                joint_clash("collection_width_signal").or(joint_clash("collection_width_idler"))
            }
            "collection_width_signal" | "collection_width_idler" => joint_clash("collection_width"),
            "filter_width" => {
                joint_clash("filter_width_signal").or(joint_clash("filter_width_idler"))
            }
            "filter_width_signal" | "filter_width_idler" => joint_clash("filter_width"),
            "emission_angle" => {
                joint_clash("emission_angle_signal").or(joint_clash("emission_angle_idler"))
            }
            "emission_angle_signal" | "emission_angle_idler" => joint_clash("emission_angle"),
            _ => None,
        });
        if let Some(first) = clash {
            return Err(Error::Parse {
                line,
                message: format!("duplicate setting for '{slot}' (first set on line {first})"),
            });
        }

        let parsed = match (factor, parse_number(value)) {
            (Some(f), Some(v)) => Value::Number(v * f),
            (None, Some(v)) if quantity == Quantity::Beta => Value::Number(v),
            (None, Some(v)) => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "'{key}' takes a keyword; numeric values need a unit suffix (got {v})"
                    ),
                })
            }
            (None, None) if quantity != Quantity::Beta => Value::Word(value.to_string()),
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("'{value}' is not a number for '{key}'"),
                })
            }
        };
        entries.insert(
            slot,
            Entry {
                line,
                quantity,
                value: parsed,
            },
        );
    }
    build_config(&entries)
}

fn build_config(entries: &HashMap<&'static str, Entry>) -> Result<Config> {
    let parse_err = |e: &Entry, message: String| Error::Parse {
        line: e.line,
        message,
    };
    let number = |slot: &str| -> Result<Option<f64>> {
        match entries.get(slot) {
            None => Ok(None),
            Some(Entry {
                value: Value::Number(v),
                ..
            }) => Ok(Some(*v)),
            Some(e) => Err(parse_err(e, format!("'{slot}' needs a number"))),
        }
    };
    let required = |slot: &str| -> Result<f64> {
        number(slot)?.ok_or_else(|| Error::Validation(format!("missing required key '{slot}'")))
    };

    let crystal = match entries.get("crystal") {
        Some(
            e @ Entry {
                value: Value::Word(w),
                ..
            },
        ) => CrystalModel::from_name(w).map_err(|err| parse_err(e, err.to_string()))?,
        Some(e) => return Err(parse_err(e, "crystal must be LiIO3 or BBO".into())),
        None => return Err(Error::Validation("missing required key 'crystal'".into())),
    };

    let mut wavelengths = [
        number("pump_wavelength")?,
        number("signal_wavelength")?,
        number("idler_wavelength")?,
    ];
    let missing: Vec<usize> = (0..3).filter(|&i| wavelengths[i].is_none()).collect();
    match missing.as_slice() {
        [] => {}
        [0] => {
            wavelengths[0] =
                Some(1.0 / (1.0 / wavelengths[1].unwrap() + 1.0 / wavelengths[2].unwrap()))
        }
        [i] => {
            let other = if *i == 1 {
                wavelengths[2]
            } else {
                wavelengths[1]
            }
            .unwrap();
            let inv = 1.0 / wavelengths[0].unwrap() - 1.0 / other;
            if !(inv > 0.0) {
                return Err(Error::Validation(
                    "energy conservation violated: no positive wavelength closes 1/lambda_p = 1/lambda_s + 1/lambda_i".into(),
                ));
            }
            wavelengths[*i] = Some(1.0 / inv);
        }
        _ => {
            return Err(Error::Validation(
                "energy conservation closure needs at least two of pump/signal/idler wavelength"
                    .into(),
            ))
        }
    }

    let pump_spectrum = match entries.get("pump") {
        None => {
            return Err(Error::Validation(
                "missing pump spectrum: set pump_duration_fs, pump_bandwidth_nm or pump = cw"
                    .into(),
            ))
        }
        Some(e) => match (&e.quantity, &e.value) {
            (Quantity::PumpDuration, Value::Number(t)) => PumpSpectrum::Duration(*t),
            (Quantity::PumpBandwidth, Value::Number(b)) => PumpSpectrum::Bandwidth(*b),
            (Quantity::Pump, Value::Word(w)) if w.eq_ignore_ascii_case("cw") => {
                PumpSpectrum::ContinuousWave
            }
            _ => {
                return Err(parse_err(
                    e,
                    "pump must be 'cw' (or use pump_duration_fs / pump_bandwidth_nm)".into(),
                ))
            }
        },
    };

    let pair = |joint: &str, s: &str, i: &str, default: f64| -> Result<(f64, f64)> {
        let j = number(joint)?;
        Ok((
            number(s)?.or(j).unwrap_or(default),
            number(i)?.or(j).unwrap_or(default),
        ))
    };
    let (ws, wi) = pair(
        "collection_width",
        "collection_width_signal",
        "collection_width_idler",
        f64::INFINITY,
    )?;
    let (fs, fi) = pair(
        "filter_width",
        "filter_width_signal",
        "filter_width_idler",
        f64::INFINITY,
    )?;
    let (phs, phi) = pair(
        "emission_angle",
        "emission_angle_signal",
        "emission_angle_idler",
        0.0,
    )?;

    let walkoff = match entries.get("walkoff") {
        None => Walkoff::Manual(0.0),
        Some(Entry {
            value: Value::Number(v),
            ..
        }) => Walkoff::Manual(*v),
        Some(
            e @ Entry {
                value: Value::Word(w),
                ..
            },
        ) => {
            if w.eq_ignore_ascii_case("computed") {
                Walkoff::Computed
            } else {
                return Err(parse_err(
                    e,
                    format!("walkoff must be 'computed' or an angle, got '{w}'"),
                ));
            }
        }
    };
    let cut_angle = match entries.get("cut_angle") {
        None => CutAngle::Auto,
        Some(Entry {
            value: Value::Number(v),
            ..
        }) => CutAngle::Manual(*v),
        Some(
            e @ Entry {
                value: Value::Word(w),
                ..
            },
        ) => {
            if w.eq_ignore_ascii_case("auto") {
                CutAngle::Auto
            } else {
                return Err(parse_err(
                    e,
                    format!("cut_angle must be 'auto' or an angle, got '{w}'"),
                ));
            }
        }
    };

    Ok(Config {
        crystal,
        length: required("length")?,
        pump_wavelength: wavelengths[0].unwrap(),
        signal_wavelength: wavelengths[1].unwrap(),
        idler_wavelength: wavelengths[2].unwrap(),
        pump_waist: required("pump_waist")?,
        pump_spectrum,
        collection_width_signal: ws,
        collection_width_idler: wi,
        filter_width_signal: fs,
        filter_width_idler: fi,
        emission_angle_signal: phs,
        emission_angle_idler: phi,
        azimuth: number("azimuth")?.unwrap_or(0.0),
        walkoff,
        cut_angle,
        beta: number("beta")?.unwrap_or(DEFAULT_BETA),
    })
}

/// Reads, parses and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config = parse_config(&text)?;
    config.validate()?;
    Ok(config)
}

fn fmt_width(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

/// Emits `config` in the file schema, lengths in µm, wavelengths in µm,
/// widths in nm and angles in degrees.
pub fn to_config_text(config: &Config) -> Result<String> {
    let crystal = match &config.crystal.kind {
        CrystalKind::Custom(name) => {
            return Err(Error::Validation(format!(
                "custom crystal '{name}' cannot be written to a config file"
            )))
        }
        kind => kind.to_string(),
    };
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    line("crystal", crystal);
    line("length_um", format!("{}", config.length));
    line("pump_wavelength_um", format!("{}", config.pump_wavelength));
    line(
        "signal_wavelength_um",
        format!("{}", config.signal_wavelength),
    );
    line(
        "idler_wavelength_um",
        format!("{}", config.idler_wavelength),
    );
    line("pump_waist_um", format!("{}", config.pump_waist));
    match config.pump_spectrum {
        PumpSpectrum::Duration(t) => line("pump_duration_fs", format!("{t}")),
        PumpSpectrum::Bandwidth(b) => line("pump_bandwidth_nm", format!("{b}")),
        PumpSpectrum::ContinuousWave => line("pump", "cw".into()),
    }
    line(
        "collection_width_signal_um",
        fmt_width(config.collection_width_signal),
    );
    line(
        "collection_width_idler_um",
        fmt_width(config.collection_width_idler),
    );
    line(
        "filter_width_signal_nm",
        fmt_width(config.filter_width_signal),
    );
    line(
        "filter_width_idler_nm",
        fmt_width(config.filter_width_idler),
    );
    line(
        "emission_angle_signal_deg",
        format!("{}", config.emission_angle_signal.to_degrees()),
    );
    line(
        "emission_angle_idler_deg",
        format!("{}", config.emission_angle_idler.to_degrees()),
    );
    line("azimuth_deg", format!("{}", config.azimuth.to_degrees()));
    match config.walkoff {
        Walkoff::Manual(r) => line("walkoff_deg", format!("{}", r.to_degrees())),
        Walkoff::Computed => line("walkoff", "computed".into()),
    }
    match config.cut_angle {
        CutAngle::Manual(t) => line("cut_angle_deg", format!("{}", t.to_degrees())),
        CutAngle::Auto => line("cut_angle", "auto".into()),
    }
    line("beta", format!("{}", config.beta));
    Ok(out)
}
