//! Exact rational arithmetic, closed rational intervals and continuous
//! piecewise-linear interval maps.

mod interval;
mod plmap;
mod scalar;

use thiserror::Error;

pub use interval::Interval;
pub use plmap::{Lap, PlMap};
pub use scalar::{q, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("malformed rational {0:?}: expected \"p/q\" with q != 0")]
    Parse(String),
    #[error("rational budget exceeded: {bits} bits > limit {limit}")]
    BudgetExceeded { bits: u64, limit: u64 },
}

/// Denominator/numerator size limit applied during long exact iterations.
///
/// Exceeding the limit is an error; values are never rounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    pub max_bits: u64,
}

impl Budget {
    pub const DEFAULT_BITS: u64 = 4096;

    pub fn new(max_bits: u64) -> Self {
        Budget { max_bits }
    }

    pub fn unlimited() -> Self {
        Budget { max_bits: u64::MAX }
    }

    pub fn check(&self, x: &Scalar) -> Result<(), NumericError> {
        let bits = x.bits();
        if bits > self.max_bits {
            Err(NumericError::BudgetExceeded { bits, limit: self.max_bits })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_BITS)
    }
}
