use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use num_traits::{One, Zero};

use super::{Coeff, ConvertCtx, DumpCoeff, Field, FromExact, ParamPoly, Radical, ScalarError};

/// An exact rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(RBig);

impl Rational {
    /// `num / den`; panics when `den` is zero.
    pub fn new(num: IBig, den: IBig) -> Self {
        assert!(den != IBig::ZERO, "zero denominator");
        Rational(RBig::from_parts_signed(num, den))
    }

    pub fn from_integer(v: IBig) -> Self {
        Rational(RBig::from(v))
    }

    pub fn numer(&self) -> &IBig {
        self.0.numerator()
    }

    pub fn denom(&self) -> &UBig {
        self.0.denominator()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_int()
    }

    pub fn is_negative(&self) -> bool {
        *self.numer() < IBig::ZERO
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `1 / self`; panics on zero.
    pub fn recip(&self) -> Self {
        Rational(RBig::ONE / &self.0)
    }

    pub fn pow(&self, exp: usize) -> Self {
        Rational(self.0.pow(exp as isize))
    }

    /// Nearest `f64` (infinite when out of range).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational(RBig::from(v))
    }
}

impl From<IBig> for Rational {
    fn from(v: IBig) -> Self {
        Rational(RBig::from(v))
    }
}

impl FromStr for Rational {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, ScalarError> {
        parse_rational(s)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(&self.0, rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $assign_trait for Rational {
            fn $assign_method(&mut self, rhs: Rational) {
                $assign_trait::$assign_method(&mut self.0, rhs.0);
            }
        }
        impl<'a> $assign_trait<&'a Rational> for Rational {
            fn $assign_method(&mut self, rhs: &Rational) {
                $assign_trait::$assign_method(&mut self.0, &rhs.0);
            }
        }
    };
}

rational_binop!(Add, add, AddAssign, add_assign);
rational_binop!(Sub, sub, SubAssign, sub_assign);
rational_binop!(Mul, mul, MulAssign, mul_assign);
rational_binop!(Div, div, DivAssign, div_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0.clone())
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(RBig::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(RBig::ONE)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |a, b| a * b)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == RBig::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(&RBig::from(*other))
    }
}

impl Coeff for Rational {
    type Field = Rational;

    fn from_field(c: Rational) -> Self {
        c
    }

    fn scale(&self, c: &Rational) -> Self {
        self * c
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn domain_name() -> &'static str {
        "rational"
    }
}

impl Field for Rational {
    fn from_int(v: i64) -> Self {
        Rational::from(v)
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.recip())
    }
}

impl FromExact for Rational {
    fn from_exact(value: &ParamPoly<Radical>, _ctx: &ConvertCtx) -> Result<Self, ScalarError> {
        let constant = value.as_constant().ok_or_else(|| ScalarError::NotRepresentable {
            domain: "rational",
            reason: "value depends on the parameter t".into(),
        })?;
        constant
            .as_rational()
            .ok_or_else(|| ScalarError::NotRepresentable {
                domain: "rational",
                reason: format!("value {} involves square roots", constant.to_dump_string()),
            })
    }

    fn is_exact() -> bool {
        true
    }
}

impl DumpCoeff for Rational {
    fn write_coeff(&self, out: &mut String) {
        out.push_str(&format!("{}/{}", self.numer(), self.denom()));
    }

    fn parse_coeff(text: &str) -> Result<Self, ScalarError> {
        parse_rational(text)
    }
}

/// Parses `p/q` or a bare integer `p`.
pub(crate) fn parse_rational(text: &str) -> Result<Rational, ScalarError> {
    let text = text.trim();
    let err = || ScalarError::Parse(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let num: IBig = num.parse().map_err(|_| err())?;
    let den: IBig = den.parse().map_err(|_| err())?;
    if den == IBig::ZERO {
        return Err(ScalarError::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let r = Rational::new(IBig::from(-6), IBig::from(4));
        let text = r.to_dump_string();
        assert_eq!(text, "-3/2");
        assert_eq!(Rational::parse_coeff(&text).unwrap(), r);
        assert_eq!(
            Rational::parse_coeff("5").unwrap(),
            Rational::from_integer(5.into())
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            Rational::zero().inv().unwrap_err(),
            ScalarError::DivisionByZero
        );
        assert!(Rational::parse_coeff("1/0").is_err());
    }
}
