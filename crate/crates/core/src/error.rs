use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the analysis pipeline can report.
///
/// Row numbers are 1-based data rows (the header is not counted).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("file not found: {0}")]
    FileMissing(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("time not strictly increasing at row {row}")]
    NonMonotonicTime { row: usize },
    #[error("non-positive resistance at row {row}")]
    NonPositiveResistance { row: usize },
    #[error("negative displacement at row {row}")]
    NegativeDisplacement { row: usize },
    #[error("non-finite value at row {row}")]
    NonFiniteValue { row: usize },
    #[error("trace does not cover the {window_s} s baseline window")]
    WindowTooShort { window_s: f64 },
    #[error("traces overlap for less than {min_s} s")]
    NoOverlap { min_s: f64 },
    #[error("tensile trace spans zero time")]
    DegenerateTensileTrace,
    #[error("resistance timebase is not uniformly spaced near sample {index}")]
    NonUniformTimebase { index: usize },
    #[error("no loading-unloading cycles found")]
    NoCyclesFound,
    #[error("strain grid has zero spread")]
    DegenerateGrid,
    #[error("loading branch of cycle {cycle} encloses zero area")]
    ZeroLoadingArea { cycle: usize },
    #[error("need at least {needed} cycles, got {got}")]
    TooFewCycles { needed: usize, got: usize },
    #[error("fitted intercept is not positive")]
    NonPositiveIntercept,
    #[error("trace carries no force channel")]
    MissingForce,
    #[error("strain decreases at sample {index}")]
    NonMonotonicStrain { index: usize },
    #[error("no strain window reaches the linearity floor")]
    NoLinearRange,
    #[error("calibration points are degenerate: {0}")]
    DegeneratePoints(String),
    #[error("no ground-truth sample at or above {min_angle_deg} deg")]
    AllSamplesBelowThreshold { min_angle_deg: f64 },
    #[error("angle {angle} deg outside [0, 180] at row {row}")]
    AngleOutOfRange { row: usize, angle: f64 },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: String, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name, used by the command line to report failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::FileMissing(_) => "FileMissing",
            Error::SchemaMismatch(_) => "SchemaMismatch",
            Error::MalformedRow { .. } => "MalformedRow",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::NonMonotonicTime { .. } => "NonMonotonicTime",
            Error::NonPositiveResistance { .. } => "NonPositiveResistance",
            Error::NegativeDisplacement { .. } => "NegativeDisplacement",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::WindowTooShort { .. } => "WindowTooShort",
            Error::NoOverlap { .. } => "NoOverlap",
            Error::DegenerateTensileTrace => "DegenerateTensileTrace",
            Error::NonUniformTimebase { .. } => "NonUniformTimebase",
            Error::NoCyclesFound => "NoCyclesFound",
            Error::DegenerateGrid => "DegenerateGrid",
            Error::ZeroLoadingArea { .. } => "ZeroLoadingArea",
            Error::TooFewCycles { .. } => "TooFewCycles",
            Error::NonPositiveIntercept => "NonPositiveIntercept",
            Error::MissingForce => "MissingForce",
            Error::NonMonotonicStrain { .. } => "NonMonotonicStrain",
            Error::NoLinearRange => "NoLinearRange",
            Error::DegeneratePoints(_) => "DegeneratePoints",
            Error::AllSamplesBelowThreshold { .. } => "AllSamplesBelowThreshold",
            Error::AngleOutOfRange { .. } => "AngleOutOfRange",
            Error::InvalidParams { .. } => "InvalidParams",
            Error::Io(_) => "Io",
        }
    }

    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParams {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
