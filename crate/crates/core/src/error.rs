use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("point {point:?} lies outside the window")]
    OutsideWindow { point: [f64; 3] },

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("box escapes the sampled region")]
    BoxOutsideRegion,

    #[error("the SNR radius is undefined without noise (N0 = 0)")]
    UndefinedRadius,

    #[error("no solution: tau*N0 = {threshold} is not below l(0) = {cap}")]
    NoSolution { threshold: f64, cap: f64 },

    #[error("path-loss tail is not integrable in dimension {0}")]
    Divergent(usize),

    #[error("invalid bracket: success at lower end {lo_p:.4}, at upper end {hi_p:.4} (threshold {p_succ})")]
    InvalidBracket { lo_p: f64, hi_p: f64, p_succ: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
