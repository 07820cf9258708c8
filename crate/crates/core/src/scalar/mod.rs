//! Coefficient domains for series arithmetic.
//!
//! Every series is generic over a [`Coeff`]. Exact runs use [`Rational`] or
//! [`Radical`], parameter runs use [`ParamPoly`] over one of those, and numeric
//! runs use [`BigFloat`] (or its complex extension, or plain `f64`).

mod float;
mod param;
mod radical;
mod rational;

use std::fmt;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_traits::{One, Zero};
use thiserror::Error;

pub use float::{BigFloat, ComplexFloat, RealFloat, DEFAULT_PRECISION};
pub use param::ParamPoly;
pub use radical::{squarefree_factor, Radical, RadicalKey};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by an exact zero")]
    DivisionByZero,
    #[error("value not representable in the {domain} domain: {reason}")]
    NotRepresentable { domain: &'static str, reason: String },
    #[error("cannot parse coefficient `{0}`")]
    Parse(String),
}

/// Ring of coefficients a series may carry.
///
/// `Field` is the ring of constants: the homological equation divides by
/// elements of it, and parameter polynomials are scaled by it.
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    type Field: Field;

    fn from_field(c: Self::Field) -> Self;

    fn scale(&self, c: &Self::Field) -> Self;

    fn mul_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out *= rhs;
        out
    }

    fn from_i64(v: i64) -> Self {
        Self::from_field(<Self::Field as Field>::from_int(v))
    }

    /// Largest modulus carried by the value, as an `f64`.
    ///
    /// For parameter polynomials this is the largest modulus over the
    /// t-coefficients.
    fn magnitude(&self) -> f64;

    /// Name of the coefficient domain, used in diagnostics and dumps.
    fn domain_name() -> &'static str;
}

/// A coefficient domain closed under division by nonzero elements.
pub trait Field: Coeff<Field = Self> {
    fn from_int(v: i64) -> Self;

    fn inv(&self) -> Result<Self, ScalarError>;

    fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul_ref(&rhs.inv()?))
    }

    /// Whether the value should be treated as zero when deciding resonance.
    ///
    /// Exact domains answer exactly; numeric domains compare against their
    /// tolerance.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

/// Coefficient domains that can be produced from exact spec values.
///
/// Spec values are held as parameter polynomials over the radical field; a
/// target domain accepts or rejects them (for instance [`Rational`] rejects
/// radicals and any dependence on `t`).
pub trait FromExact: Coeff {
    fn from_exact(value: &ParamPoly<Radical>, ctx: &ConvertCtx) -> Result<Self, ScalarError>;

    /// Whether the domain is exact; approximate (decimal) inputs are refused
    /// by exact domains.
    fn is_exact() -> bool;
}

/// Settings used when converting exact values into a target domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvertCtx {
    /// Binary precision for arbitrary-precision floats.
    pub precision: usize,
}

impl Default for ConvertCtx {
    fn default() -> Self {
        Self {
            precision: DEFAULT_PRECISION,
        }
    }
}

/// Coefficient domains with a bit-exact text form in series dumps.
pub trait DumpCoeff: Coeff {
    fn write_coeff(&self, out: &mut String);

    fn parse_coeff(text: &str) -> Result<Self, ScalarError>;

    fn to_dump_string(&self) -> String {
        let mut s = String::new();
        self.write_coeff(&mut s);
        s
    }
}

/// Splits `text` at top-level occurrences of ` + `, ignoring those nested in
/// parentheses.
pub(crate) fn split_top_level_plus(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut depth = 0i32;
    let mut start = 0;
    let mut parts = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b' ' if depth == 0 && text[i..].starts_with(" + ") => {
                parts.push(text[start..i].trim());
                i += 3;
                start = i;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    parts.push(text[start..].trim());
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_respects_parentheses() {
        assert_eq!(
            split_top_level_plus("(1/2 + 1/3*sqrt(2)) + (3/1)t"),
            vec!["(1/2 + 1/3*sqrt(2))", "(3/1)t"]
        );
        assert_eq!(split_top_level_plus("-1/2"), vec!["-1/2"]);
    }
}
