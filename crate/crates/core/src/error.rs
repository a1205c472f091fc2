use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("polynomial construction failed: {0}")]
    ConstructionFailed(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("expected a {expected} polynomial, got a {found} one")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("|T_{degree}(a)|^2 is not monotone on [{lo}, {hi}]")]
    MonotonicityViolated { degree: u64, lo: f64, hi: f64 },

    #[error("iteration cap of {0} reached")]
    IterationCap(u64),

    #[error("likelihood is degenerate: every round returned all heads or all tails")]
    DegenerateLikelihood,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    expected: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}

pub(crate) fn check_open(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value > lo && value < hi {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "open interval",
        })
    }
}
