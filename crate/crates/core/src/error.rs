use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("targets {first} and {second} share range bin {bin}")]
    DuplicateRangeBin {
        bin: usize,
        first: usize,
        second: usize,
    },

    #[error("range bin {bin} outside grid of {num_ranges} bins")]
    RangeBinOutOfGrid { bin: usize, num_ranges: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite quantizer input {0}")]
    NonFinite(f64),

    #[error("observations are identically zero")]
    ZeroSignal,

    #[error("estimate list is empty")]
    EmptyEstimate,

    #[error("cell ({range_cell}, {angle_cell}) outside {range_bins}x{angle_bins} map")]
    IndexOutOfRange {
        range_cell: usize,
        angle_cell: usize,
        range_bins: usize,
        angle_bins: usize,
    },

    #[error("support enumeration C({n}, {k}) too large for the brute-force oracle")]
    TooLarge { n: usize, k: usize },

    #[error("malformed dataset: {0}")]
    Format(String),

    #[error("dataset dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Parse { .. } => 2,
            Error::Format(_) | Error::DimensionMismatch(_) | Error::Io(_) => 3,
            Error::DuplicateRangeBin { .. } | Error::RangeBinOutOfGrid { .. } => 2,
            _ => 4,
        }
    }
}
