use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{crystal}: wavelength {wavelength} um outside valid range [{min}, {max}] um")]
    WavelengthRange {
        crystal: String,
        wavelength: f64,
        min: f64,
        max: f64,
    },

    #[error("domain: {0}")]
    Domain(String),

    #[error("no phase matching: {0}")]
    NoPhaseMatching(String),

    #[error("validation: {0}")]
    Validation(String),

    #[error("conditioning: {message} (pivot ratio {pivot_ratio:.3e})")]
    Conditioning { message: String, pivot_ratio: f64 },

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("limit handling: {0}")]
    Limit(String),

    #[error("quadrature window: {0}")]
    Window(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 3 for input/validation problems, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::WavelengthRange { .. }
            | Error::NoPhaseMatching(_)
            | Error::Validation(_)
            | Error::Parse { .. }
            | Error::FileNotFound(_)
            | Error::Io { .. } => 3,
            Error::Domain(_)
            | Error::Assembly(_)
            | Error::Conditioning { .. }
            | Error::Limit(_)
            | Error::Window(_) => 4,
        }
    }

    /// Short machine-readable name, used for sweep row flags.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::WavelengthRange { .. } => "wavelength_range",
            Error::Domain(_) => "domain",
            Error::NoPhaseMatching(_) => "no_phase_matching",
            Error::Validation(_) => "validation",
            Error::Conditioning { .. } => "conditioning",
            Error::Assembly(_) => "assembly",
            Error::Limit(_) => "limit",
            Error::Window(_) => "window",
            Error::Parse { .. } => "parse",
            Error::FileNotFound(_) => "file_not_found",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }
}
