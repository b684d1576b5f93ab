use alloc::string::String;

/// Errors produced by the analysis core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("signal too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("channel `{0}` has (near) zero temporal mean")]
    ZeroMeanChannel(&'static str),
    #[error("frequency {freq} Hz is at or above the Nyquist frequency {nyquist} Hz")]
    NyquistViolation { freq: f64, nyquist: f64 },
    #[error("no spectrum bins inside the band [{f1}, {f2}] Hz")]
    EmptyBand { f1: f64, f2: f64 },
    #[error("frequency {0} Hz lies outside the analysis band")]
    OutOfBand(f64),
    #[error("green channel low-pass mean is not positive")]
    NonPositiveMean,
    #[error("signal has zero variance")]
    ZeroVariance,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("mask selects no pixels")]
    EmptyMask,
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("image too small for the requested operation")]
    TooSmall,
    #[error("landmark geometry is degenerate: {0}")]
    DegenerateLandmarks(String),
    #[error("recording of {got:.3} s is shorter than the {needed:.3} s analysis window")]
    TooShortRecording { needed: f64, got: f64 },
    #[error("neither a reference region nor an external heart rate was supplied")]
    MissingReference,
    #[error("invalid synthetic video spec: {0}")]
    InvalidSpec(String),
    #[error("no regions to choose a reference from")]
    NoRegions,
    #[error("training data contains a single class")]
    SingleClass,
    #[error("insufficient training data: {0}")]
    InsufficientData(String),
    #[error("SMO did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("empty matrix")]
    EmptyMatrix,
}

pub type Result<T> = core::result::Result<T, Error>;
