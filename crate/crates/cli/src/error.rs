use omegalab::chain::ChainError;
use omegalab::numeric::NumericError;
use omegalab::omega::RealizeError;
use omegalab::pseudo_orbit::OrbitError;
use omegalab::shadowing::ShadowError;
use omegalab::symbolic::ShiftError;
use thiserror::Error;

/// Failures of a run. Exit codes 0-2 are verdicts, so errors start at 3.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags, rationals or files.
    #[error("input: {0}")]
    Input(String),
    #[error("io: {0}")]
    Io(String),
    /// The analysis refused its input or ran out of budget.
    #[error("{0}")]
    Analysis(String),
    #[error("size: {0}")]
    Size(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 3,
            CliError::Analysis(_) => 4,
            CliError::Size(_) => 5,
        }
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::Parse(_) | NumericError::Parameter(_) => CliError::Input(e.to_string()),
            _ => CliError::Analysis(e.to_string()),
        }
    }
}

impl From<ChainError> for CliError {
    fn from(e: ChainError) -> Self {
        match e {
            ChainError::Size(s) => CliError::Size(s),
            ChainError::Numeric(n) => n.into(),
            other => CliError::Analysis(other.to_string()),
        }
    }
}

macro_rules! analysis_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Analysis(e.to_string())
            }
        }
    )*};
}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::Numeric(n) => n.into(),
            OrbitError::Domain(_) => CliError::Input(e.to_string()),
            other => CliError::Analysis(other.to_string()),
        }
    }
}

analysis_error!(ShiftError, ShadowError, RealizeError);
