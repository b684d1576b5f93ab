use std::path::PathBuf;

/// Exit status for malformed or missing inputs.
pub const EXIT_INPUT: i32 = 2;
/// Exit status for failures inside the analysis.
pub const EXIT_ANALYSIS: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("missing sidecar {0}")]
    MissingSidecar(PathBuf),
    #[error("corrupt frame {index}: {reason}")]
    CorruptFrame { index: usize, reason: String },
    #[error("frame {index} is {got:?}, expected {expected:?}")]
    DimensionMismatch {
        index: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Analysis(#[from] rppg_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Self::Format {
            path: path.into(),
            reason: reason.to_string(),
        }
    }

    /// Process exit status: 2 for problems with what the user supplied, 3 for
    /// analysis failures on well-formed input.
    pub fn exit_code(&self) -> i32 {
        use rppg_core::Error as E;
        match self {
            Self::Analysis(
                E::InvalidConfig(_)
                | E::InvalidSpec(_)
                | E::DimensionMismatch { .. }
                | E::DegenerateLandmarks(_)
                | E::EmptyMask
                | E::MissingReference
                | E::LengthMismatch(..),
            ) => EXIT_INPUT,
            Self::Analysis(_) => EXIT_ANALYSIS,
            _ => EXIT_INPUT,
        }
    }
}
