use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength {wavelength_nm} nm is outside the valid range [{min_nm}, {max_nm}] nm of {name}")]
    WavelengthOutOfRange {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
        name: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no phase-matching solution: {0}")]
    NoPhaseMatching(String),

    #[error("outside tuning range: {0}")]
    OutsideTuningRange(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Finite-difference estimates at two step sizes disagree.
    #[error("unstable derivative estimate: step h gives {coarse:e}, step h/2 gives {fine:e}")]
    UnstableDerivative { coarse: f64, fine: f64 },

    #[error("delay {tau_fs} fs exceeds the resolvable range ±{max_fs} fs of the detuning grid")]
    DelayOutOfRange { tau_fs: f64, max_fs: f64 },

    #[error("delay grid spacing {spacing_fs} fs is coarser than one tenth of the carrier period ({limit_fs} fs)")]
    Aliasing { spacing_fs: f64, limit_fs: f64 },

    #[error("unresolved peak: {0}")]
    UnresolvedPeak(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io { .. } | Error::Parse { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
