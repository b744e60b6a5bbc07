use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::quadratic_state::{evaluate, PurityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Joint collection width w_s = w_i, µm.
    CollectionWidth,
    /// Joint filter width Δλ_s = Δλ_i, nm.
    FilterWidth,
    /// Pump waist w_p, µm.
    PumpWaist,
    /// Joint emission angle φ_s = φ_i, degrees.
    EmissionAngle,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] = [
        SweepParameter::CollectionWidth,
        SweepParameter::FilterWidth,
        SweepParameter::PumpWaist,
        SweepParameter::EmissionAngle,
    ];

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "ws" | "w" | "collection_width" => Ok(Self::CollectionWidth),
            "dl" | "filter_width" => Ok(Self::FilterWidth),
            "wp" | "pump_waist" => Ok(Self::PumpWaist),
            "phi" | "emission_angle" => Ok(Self::EmissionAngle),
            other => Err(Error::Validation(format!(
                "'{other}' is not a sweepable parameter (expected ws, dl, wp or phi)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::CollectionWidth => "ws",
            Self::FilterWidth => "dl",
            Self::PumpWaist => "wp",
            Self::EmissionAngle => "phi",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Self::CollectionWidth | Self::PumpWaist => "um",
            Self::FilterWidth => "nm",
            Self::EmissionAngle => "deg",
        }
    }

    /// `config` with the parameter set to `value` (in [`Self::unit`]).
    pub fn apply(self, config: &Config, value: f64) -> Config {
        let c = config.clone();
        match self {
            Self::CollectionWidth => c.with_collection_width(value),
            Self::FilterWidth => c.with_filter_width(value),
            Self::PumpWaist => c.with_pump_waist(value),
            Self::EmissionAngle => c.with_emission_angle(value.to_radians()),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    PuritySpatialPair,
    PuritySignal,
    SchmidtK,
    IConcurrence,
}

impl Output {
    pub const ALL: [Output; 4] = [
        Output::PuritySpatialPair,
        Output::PuritySignal,
        Output::SchmidtK,
        Output::IConcurrence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PuritySpatialPair => "purity_spatial_pair",
            Self::PuritySignal => "purity_signal",
            Self::SchmidtK => "schmidt_K",
            Self::IConcurrence => "i_concurrence",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(name.trim()))
            .ok_or_else(|| Error::Validation(format!("unknown output '{name}'")))
    }

    pub fn get(self, report: &PurityReport) -> f64 {
        match self {
            Self::PuritySpatialPair => report.purity_spatial_pair,
            Self::PuritySignal => report.purity_signal,
            Self::SchmidtK => report.schmidt_k,
            Self::IConcurrence => report.i_concurrence,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    /// Evaluation failed; the error kind and message.
    Failed {
        kind: &'static str,
        message: String,
    },
}

impl RowStatus {
    pub fn label(&self) -> &str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Failed { kind, .. } => kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub status: RowStatus,
    /// One entry per requested output; empty for failed rows.
    pub outputs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub outputs: Vec<Output>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    /// Column of `output`, `None` for failed rows.
    pub fn column(&self, output: Output) -> Option<Vec<Option<f64>>> {
        let idx = self.outputs.iter().position(|o| *o == output)?;
        Some(
            self.rows
                .iter()
                .map(|r| (r.status == RowStatus::Ok).then(|| r.outputs[idx]))
                .collect(),
        )
    }

    pub fn failed_rows(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status != RowStatus::Ok)
            .count()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec![format!(
            "{} ({})",
            self.parameter.name(),
            self.parameter.unit()
        )];
        h.extend(self.outputs.iter().map(|o| format!("{} (1)", o.name())));
        h.push("status".into());
        h
    }

    /// CSV with a header carrying units, LF line endings and shortest
    /// round-trip float formatting. Failed rows have empty output cells.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let csv_err = |e: csv::Error| Error::Validation(format!("CSV output failed: {e}"));
        w.write_record(self.header()).map_err(csv_err)?;
        for row in &self.rows {
            let mut rec = vec![format!("{}", row.value)];
            if row.status == RowStatus::Ok {
                rec.extend(row.outputs.iter().map(|v| format!("{v}")));
            } else {
                rec.extend(self.outputs.iter().map(|_| String::new()));
            }
            rec.push(row.status.label().to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()
            .map_err(|e| Error::Validation(format!("CSV output failed: {e}")))?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }
}

/// `steps` evenly spaced values from `from` to `to`; one step yields `[from]`.
pub fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::Validation("a sweep needs at least one step".into()));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                to
            } else {
                from + (to - from) * k as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

/// Evaluates `config` at each value of `parameter`. Rows run in parallel;
/// order follows `values`, and failing rows are flagged rather than fatal.
pub fn sweep(
    config: &Config,
    parameter: SweepParameter,
    values: &[f64],
    outputs: &[Output],
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::Validation("a sweep needs at least one value".into()));
    }
    if outputs.is_empty() {
        return Err(Error::Validation(
            "a sweep needs at least one output".into(),
        ));
    }
    if let Some(w) = values.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Validation(format!(
            "sweep values must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let rows = values
        .par_iter()
        .map(|&value| match evaluate(&parameter.apply(config, value)) {
            Ok(report) => SweepRow {
                value,
                status: RowStatus::Ok,
                outputs: outputs.iter().map(|o| o.get(&report)).collect(),
            },
            Err(e) => SweepRow {
                value,
                status: RowStatus::Failed {
                    kind: e.kind(),
                    message: e.to_string(),
                },
                outputs: Vec::new(),
            },
        })
        .collect();
    Ok(SweepTable {
        parameter,
        outputs: outputs.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(1.0, 2.0, 1).unwrap(), vec![1.0]);
        let v = linspace(50.0, 3000.0, 60).unwrap();
        assert_eq!(v.len(), 60);
        assert_eq!((v[0], v[59]), (50.0, 3000.0));
        assert!(linspace(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn parameter_names() {
        for p in SweepParameter::ALL {
            assert_eq!(SweepParameter::from_name(p.name()).unwrap(), p);
        }
        assert!(SweepParameter::from_name("length").is_err());
    }
}
