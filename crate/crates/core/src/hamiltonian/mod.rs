//! Hamiltonian specifications: the text grammar, canonicalization and the
//! non-resonance check.

mod expr;
mod random;
mod resonance;
mod spec;

use thiserror::Error;

pub use expr::{format_rational, format_spec_value, parse_decimal, parse_scalar_expr, ExprContext, SpecValue};
pub use random::RandomSpec;
pub use resonance::{check_nonresonant, check_nonresonant_with, small_divisor, NonResonance, NUMERIC_TOLERANCE_BITS};
pub use spec::{DomainTag, FrequencyVector, HamiltonianSpec, NormalizationMode};

use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: quadratic part must live in lambda (H2 is diagonal)")]
    NonDiagonalQuadratic { line: usize },
    #[error("conflicting radical declarations: {0}")]
    ConflictingRadicals(String),
    #[error("missing `{0} =` line")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl SpecError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        SpecError::Syntax {
            line,
            message: message.into(),
        }
    }
}
