//! Truncated arithmetic in the ring of integers of the six ramified
//! quadratic extensions of Q2.

mod descriptor;
mod digits;
mod element;

pub use descriptor::{make_field, Family, FieldDescriptor, FieldId, UniformizerKind};
pub use digits::DigitExpansion;
pub use element::{enumerate_units_mod, RingElement, Valuation, DEFAULT_BITS, MAX_BITS, MIN_BITS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("unknown field identifier `{0}`")]
    UnknownField(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldId, FieldId),
    #[error("precision mismatch: {0} vs {1} bits")]
    PrecisionMismatch(u32, u32),
    #[error("bit precision {0} outside {MIN_BITS}..={MAX_BITS}")]
    InvalidPrecision(u32),
    #[error("degree {0} is not 2m with m odd and m >= 3")]
    InvalidDegree(u32),
    #[error("requested {requested} pi-digits but only {available} are guaranteed")]
    Precision { requested: u32, available: u32 },
    #[error("element is not divisible by pi^{0}")]
    NotDivisible(u32),
    #[error("element is not a unit")]
    NotUnit,
    #[error("syntax error: {0}")]
    Syntax(String),
}

/// Accepts `d = 2m` with `m` odd and `m >= 3`.
pub fn check_degree(d: u32) -> Result<(), RingError> {
    if d >= 6 && d.is_multiple_of(2) && !(d / 2).is_multiple_of(2) {
        Ok(())
    } else {
        Err(RingError::InvalidDegree(d))
    }
}
