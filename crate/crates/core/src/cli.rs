//! Command-line front end.
//!
//! Exit codes: 0 success, 1 oracle disagreement (|z| > 3), 2 usage error,
//! 3 invalid input, 4 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::oracle::{mc_gaussian_purity, Z_THRESHOLD};
use crate::phasematch::DeltaEvaluator;
use crate::quadratic_state::{assemble_a, evaluate, purity, PurityReport, TracePairing};
use crate::scenarios::{self, linspace, Output, SweepParameter};

/// Directory for sweep output files when `--out` is relative or omitted.
pub const OUT_DIR_ENV: &str = "SPDC_PURITY_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ORACLE_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "spdc-purity",
    version,
    about = "Space-frequency purity, Schmidt number and I-concurrence of SPDC photon pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate purities and entanglement measures for one configuration.
    Purity {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sweep one parameter and write a CSV table.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Swept parameter: ws (um), dl (nm), wp (um) or phi (deg).
        #[arg(long)]
        param: String,
        #[arg(long, requires_all = ["to", "steps"], conflicts_with = "values", allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, requires = "from")]
        to: Option<f64>,
        #[arg(long, requires = "from")]
        steps: Option<usize>,
        /// Explicit comma-separated values, strictly increasing.
        #[arg(long, value_delimiter = ',', required_unless_present = "from")]
        values: Option<Vec<f64>>,
        /// Output CSV path; relative paths resolve against $SPDC_PURITY_OUT_DIR when set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the determinant formula with a Monte Carlo estimate.
    OracleCheck {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Trace::Frequency)]
        trace: Trace,
    },
    /// List presets with their parameter sources.
    Presets,
}

#[derive(Debug, Args)]
struct Source {
    /// Named preset (see `presets`).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// Config file in key = value form.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Filter width for both photons, nm (0 and inf allowed).
    #[arg(long = "dl-nm")]
    dl_nm: Option<f64>,
    /// Collection width for both photons, um (inf allowed).
    #[arg(long = "ws-um")]
    ws_um: Option<f64>,
    /// Pump waist, um.
    #[arg(long = "wp-um")]
    wp_um: Option<f64>,
    /// Emission angle for both photons, degrees.
    #[arg(long = "phi-deg", allow_hyphen_values = true)]
    phi_deg: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Trace {
    Frequency,
    Idler,
    Both,
}

impl Source {
    fn label(&self) -> String {
        match (&self.preset, &self.config) {
            (Some(p), _) => p.clone(),
            (None, Some(path)) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "config".into()),
            (None, None) => "config".into(),
        }
    }

    /// Preset or file values, then flag overrides.
    fn resolve(&self) -> Result<Config> {
        let mut config = match (&self.preset, &self.config) {
            (Some(name), _) => scenarios::preset(name)?,
            (None, Some(path)) => scenarios::load_config(path)?,
            (None, None) => return Err(Error::Validation("need --preset or --config".into())),
        };
        if let Some(v) = self.dl_nm {
            config = config.with_filter_width(v);
        }
        if let Some(v) = self.ws_um {
            config = config.with_collection_width(v);
        }
        if let Some(v) = self.wp_um {
            config = config.with_pump_waist(v);
        }
        if let Some(v) = self.phi_deg {
            config = config.with_emission_angle(v.to_radians());
        }
        config.validate()?;
        Ok(config)
    }
}

fn presets_help() -> String {
    let mut s = String::from("Presets:\n");
    for p in scenarios::presets() {
        s.push_str(&format!("  {:<20} {}\n", p.name, p.note));
    }
    s
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let command = Cli::command().after_help(presets_help());
    let cli = match command
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn write_io(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<output>", e))
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Purity { source, format } => {
            let config = source.resolve()?;
            let report = evaluate(&config)?;
            let text = match format {
                Format::Text => report_text(&source.label(), &report),
                Format::Csv => report_csv(&report)?,
            };
            write_io(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            source,
            param,
            from,
            to,
            steps,
            values,
            out: path,
        } => {
            let parameter = SweepParameter::from_name(&param)?;
            let config = source.resolve()?;
            let values = match (values, from, to, steps) {
                (Some(v), _, _, _) => v,
                (None, Some(f), Some(t), Some(s)) => linspace(f, t, s)?,
                _ => {
                    return Err(Error::Validation(
                        "give --values or --from/--to/--steps".into(),
                    ))
                }
            };
            let table = scenarios::sweep(&config, parameter, &values, &Output::ALL)?;
            let csv = table.to_csv()?;
            let target = output_path(path, &source.label(), parameter);
            let summary = sweep_summary(&table);
            match target {
                Some(p) => {
                    std::fs::write(&p, csv).map_err(|e| Error::io(&p, e))?;
                    write_io(out, &format!("wrote {}: {summary}\n", p.display()))?;
                }
                None => {
                    write_io(out, &csv)?;
                    let _ = writeln!(err, "{summary}");
                }
            }
            Ok(EXIT_OK)
        }
        Command::OracleCheck {
            source,
            samples,
            seed,
            trace,
        } => oracle_check(&source, samples, seed, trace, out),
        Command::Presets => {
            write_io(out, &presets_help())?;
            Ok(EXIT_OK)
        }
    }
}

fn output_path(path: Option<PathBuf>, label: &str, parameter: SweepParameter) -> Option<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    match (path, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p),
        (None, Some(d)) => Some(d.join(format!("{label}_{}.csv", parameter.name()))),
        (None, None) => None,
    }
}

fn sweep_summary(table: &scenarios::SweepTable) -> String {
    let mut s = format!("{} rows, {} failed", table.rows.len(), table.failed_rows());
    for output in [Output::PuritySpatialPair, Output::PuritySignal] {
        let vals: Vec<f64> = table
            .column(output)
            .unwrap_or_default()
            .into_iter()
            .flatten()
            .collect();
        if !vals.is_empty() {
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            s.push_str(&format!("; {} min {min:.6} max {max:.6}", output.name()));
        }
    }
    s
}

fn report_text(label: &str, r: &PurityReport) -> String {
    let d = &r.diagnostics;
    let mut rows: Vec<(String, String)> = vec![
        ("source".into(), label.into()),
        (
            "purity_spatial_pair".into(),
            format!("{}", r.purity_spatial_pair),
        ),
        ("purity_signal".into(), format!("{}", r.purity_signal)),
        ("schmidt_K".into(), format!("{}", r.schmidt_k)),
        ("i_concurrence".into(), format!("{}", r.i_concurrence)),
        (
            "cut_angle_deg".into(),
            format!("{:.6}", d.cut_angle.to_degrees()),
        ),
        (
            "walkoff_deg".into(),
            format!("{:.6}", d.walkoff.to_degrees()),
        ),
        (
            "pump_duration_fs".into(),
            format!("{:.6e}", d.pump_duration),
        ),
        ("pivot_ratio_A".into(), format!("{:.3e}", d.a.pivot_ratio())),
        ("pivot_ratio_B".into(), format!("{:.3e}", d.b.pivot_ratio())),
        ("pivot_ratio_C".into(), format!("{:.3e}", d.c.pivot_ratio())),
    ];
    if d.clamped_spatial || d.clamped_signal {
        rows.push((
            "clamped".into(),
            format!("spatial={} signal={}", d.clamped_spatial, d.clamped_signal),
        ));
    }
    if let Some(lc) = d.limit_check {
        rows.push((
            "limit_check".into(),
            format!(
                "spatial {:.3e}, signal {:.3e}",
                lc.spatial_change, lc.signal_change
            ),
        ));
    }
    if let Some(cw) = d.cw_check {
        rows.push((
            "cw_check".into(),
            format!(
                "spatial {:.3e}, signal {:.3e}{}",
                cw.spatial_change,
                cw.signal_change,
                if cw.signal_converged {
                    ""
                } else {
                    " (signal purity not converged in T0)"
                }
            ),
        ));
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

fn report_csv(r: &PurityReport) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Validation(format!("CSV output failed: {e}"));
    w.write_record([
        "purity_spatial_pair (1)",
        "purity_signal (1)",
        "schmidt_K (1)",
        "i_concurrence (1)",
        "cut_angle (rad)",
        "walkoff (rad)",
        "pump_duration (fs)",
    ])
    .map_err(csv_err)?;
    let d = &r.diagnostics;
    w.write_record(
        [
            r.purity_spatial_pair,
            r.purity_signal,
            r.schmidt_k,
            r.i_concurrence,
            d.cut_angle,
            d.walkoff,
            d.pump_duration,
        ]
        .map(|v| format!("{v}")),
    )
    .map_err(csv_err)?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Validation(format!("CSV output failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn oracle_check(
    source: &Source,
    samples: usize,
    seed: u64,
    trace: Trace,
    out: &mut dyn Write,
) -> Result<i32> {
    let config = source.resolve()?;
    let lin = DeltaEvaluator::new(&config)?.linearize()?;
    let a = assemble_a(&config, &lin)?;
    let pairings = match trace {
        Trace::Frequency => vec![TracePairing::frequency()],
        Trace::Idler => vec![TracePairing::idler()],
        Trace::Both => vec![TracePairing::frequency(), TracePairing::idler()],
    };
    let mut text = format!(
        "source       {}\nsamples      {samples}\nseed         {seed}\n",
        source.label()
    );
    let mut agree = true;
    for pairing in pairings {
        let det = purity(&a, &pairing)?.value;
        let mc = mc_gaussian_purity(&a, &pairing, samples, seed)?;
        let z = if mc.std_error > 0.0 {
            mc.z_score(det)
        } else if (det - mc.mean).abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        let ok = z.abs() <= Z_THRESHOLD;
        agree &= ok;
        text.push_str(&format!(
            "[{}]\ndeterminant  {det}\nmonte_carlo  {} +/- {}\nz_score      {z:.4}\ness          {:.1}\nresult       {}\n",
            pairing.kind,
            mc.mean,
            mc.std_error,
            mc.effective_sample_size,
            if ok { "agree" } else { "DISAGREE" }
        ));
    }
    write_io(out, &text)?;
    Ok(if agree { EXIT_OK } else { EXIT_ORACLE_MISMATCH })
}

/// Resolves `path` the way `sweep --out` does; exposed for tests.
pub fn resolve_out_path(path: &Path) -> PathBuf {
    output_path(
        Some(path.to_path_buf()),
        "",
        SweepParameter::CollectionWidth,
    )
    .unwrap_or_else(|| path.to_path_buf())
}
