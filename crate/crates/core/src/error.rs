use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Fock truncation at n_max = {n_max} keeps only {kept:.15} of the norm")]
    TruncationLoss { n_max: usize, kept: f64 },

    #[error("time {t} s lies outside the tabulated schedule range [0, {t_end}] s")]
    ScheduleDomain { t: f64, t_end: f64 },

    #[error("grid resolution: {0}")]
    GridResolution(String),

    #[error("local-oscillator window [{z1}, {z2}] m is not inside the grid [{z_min}, {z_max}] m")]
    WindowOutsideGrid {
        z1: f64,
        z2: f64,
        z_min: f64,
        z_max: f64,
    },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("trajectory diverged at t = {t:.6e} s: {reason}")]
    Diverged { t: f64, reason: String },

    #[error("{failed} of {total} trajectories failed (limit 1%); first failure: {first}")]
    EnsembleFailed {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data: {0}")]
    Parse(String),

    /// Raised after the report files have been written.
    #[error("{report}")]
    ConvergenceFailed { files: Vec<PathBuf>, report: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
