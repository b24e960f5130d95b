//! Additive forms, level profiles, normalization, generation and file I/O.

pub mod catalog;
mod format;
mod model;
mod profile;
mod random;

pub use format::{parse_form, parse_form_with_bits, serialize_form, serialize_form_json};
pub use model::{AdditiveForm, Degree};
pub use profile::{normalize, normalizing_rotation, profile, LevelProfile};
pub use random::{random_form, random_unit, LevelDistribution};

use thiserror::Error;

use crate::field_ring::RingError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("degree {0} is not 2m with m odd and m >= 3")]
    InvalidDegree(u32),
    #[error("coefficient {index} is zero to working precision")]
    ZeroCoefficient { index: usize },
    #[error("coefficient {index} has a different field or precision")]
    IncompatibleCoefficient { index: usize },
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}
