//! Sparse graded multivariate series over a pluggable coefficient domain.

mod compose;
pub mod dump;
mod exponent;
mod graded;
mod homogeneous;

use std::collections::BTreeMap;

use thiserror::Error;

pub use compose::Composer;
pub use exponent::Exponent;
pub use graded::GradedSeries;
pub use homogeneous::HomogeneousPoly;

use crate::scalar::{Field, ParamPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("monomial of degree {found} stored in a part of degree {expected}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("part of degree {degree} beyond truncation order {order}")]
    BeyondOrder { degree: u32, order: u32 },
    #[error("stored zero coefficient at {0:?}")]
    StoredZero(Exponent),
    #[error("empty part stored at degree {0}")]
    EmptyPart(u32),
    #[error("substituted series {0} has a constant part")]
    ConstantSubstitution(usize),
    #[error("dump line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Exact t-degree of every stored coefficient of a parameter-domain series.
pub fn param_degree<F>(s: &GradedSeries<ParamPoly<F>>) -> BTreeMap<Exponent, usize>
where
    F: Field + crate::scalar::DumpCoeff,
{
    s.terms()
        .map(|(e, c)| (e.clone(), c.degree().expect("stored coefficients are nonzero")))
        .collect()
}

/// Largest t-degree over the coefficients of one homogeneous part; `None`
/// when the part is empty.
pub fn max_param_degree<F>(p: &HomogeneousPoly<ParamPoly<F>>) -> Option<usize>
where
    F: Field + crate::scalar::DumpCoeff,
{
    p.iter().filter_map(|(_, c)| c.degree()).max()
}
