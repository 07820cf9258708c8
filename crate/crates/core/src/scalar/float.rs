//! Arbitrary-precision binary floats and their complex extension.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::IBig;
use num_complex::Complex;
use num_traits::{Num, One, Zero};

use super::{Coeff, ConvertCtx, DumpCoeff, Field, FromExact, ParamPoly, Radical, Rational, ScalarError};

/// Default binary precision of numeric runs.
pub const DEFAULT_PRECISION: usize = 256;

type Repr = FBig<HalfEven, 2>;

/// A binary floating-point number with a per-value precision.
///
/// The constants `zero()` and `one()` carry unlimited precision and adopt the
/// precision of whatever they are combined with.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Repr);

impl BigFloat {
    pub fn from_rational(r: &Rational, precision: usize) -> Self {
        let num = Repr::from(r.numer().clone()).with_precision(precision).value();
        let den = Repr::from(r.denom().clone()).with_precision(precision).value();
        BigFloat(num / den)
    }

    pub fn from_f64(v: f64, precision: usize) -> Self {
        let repr = Repr::try_from(v).expect("finite f64");
        BigFloat(repr.with_precision(precision.max(53)).value())
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn sqrt(&self) -> Self {
        BigFloat(self.0.sqrt())
    }

    pub fn abs(&self) -> Self {
        if self.0 < Repr::ZERO {
            BigFloat(-self.0.clone())
        } else {
            self.clone()
        }
    }

    pub fn with_precision(&self, precision: usize) -> Self {
        BigFloat(self.0.clone().with_precision(precision).value())
    }

    /// `2^exp` at the given precision.
    pub fn pow2(exp: isize, precision: usize) -> Self {
        BigFloat(
            Repr::from_parts(IBig::ONE, exp)
                .with_precision(precision)
                .value(),
        )
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $apply:path) => {
        impl $trait for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                BigFloat($apply(&self.0, &rhs.0))
            }
        }
        impl<'a> $trait<&'a BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &BigFloat) -> BigFloat {
                BigFloat($apply(&self.0, &rhs.0))
            }
        }
        impl $assign_trait for BigFloat {
            fn $assign_method(&mut self, rhs: BigFloat) {
                self.0 = $apply(&self.0, &rhs.0);
            }
        }
        impl<'a> $assign_trait<&'a BigFloat> for BigFloat {
            fn $assign_method(&mut self, rhs: &BigFloat) {
                self.0 = $apply(&self.0, &rhs.0);
            }
        }
    };
}

fn add_repr(a: &Repr, b: &Repr) -> Repr {
    a + b
}

fn sub_repr(a: &Repr, b: &Repr) -> Repr {
    a - b
}

fn mul_repr(a: &Repr, b: &Repr) -> Repr {
    a * b
}

// Quotients of two unlimited-precision values are rounded at the default
// precision instead of failing.
fn div_repr(a: &Repr, b: &Repr) -> Repr {
    if a.precision() == 0 && b.precision() == 0 {
        a.clone().with_precision(DEFAULT_PRECISION).value() / b
    } else {
        a / b
    }
}

fn rem_repr(a: &Repr, b: &Repr) -> Repr {
    a % b
}

forward_binop!(Add, add, AddAssign, add_assign, add_repr);
forward_binop!(Sub, sub, SubAssign, sub_assign, sub_repr);
forward_binop!(Mul, mul, MulAssign, mul_assign, mul_repr);
forward_binop!(Div, div, DivAssign, div_assign, div_repr);
forward_binop!(Rem, rem, RemAssign, rem_assign, rem_repr);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        BigFloat(Repr::ZERO)
    }
    fn is_zero(&self) -> bool {
        *self.0.repr().significand() == IBig::ZERO
    }
}

impl One for BigFloat {
    fn one() -> Self {
        BigFloat(Repr::ONE)
    }
}

impl Num for BigFloat {
    type FromStrRadixErr = ScalarError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ScalarError> {
        if radix != 10 {
            return Err(ScalarError::Parse(s.to_string()));
        }
        let r = crate::hamiltonian::parse_decimal(s).ok_or_else(|| ScalarError::Parse(s.to_string()))?;
        Ok(BigFloat::from_rational(&r, DEFAULT_PRECISION))
    }
}

impl Coeff for BigFloat {
    type Field = BigFloat;

    fn from_field(c: BigFloat) -> Self {
        c
    }

    fn scale(&self, c: &BigFloat) -> Self {
        self * c
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    fn domain_name() -> &'static str {
        "float"
    }
}

impl Field for BigFloat {
    /// Integers carry unlimited precision, like `zero()` and `one()`.
    fn from_int(v: i64) -> Self {
        BigFloat(Repr::from(v).with_precision(0).value())
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(BigFloat(div_repr(&Repr::ONE, &self.0)))
    }
}

/// Real and imaginary parts of an exact radical value at a given precision.
fn radical_parts(value: &Radical, precision: usize) -> (BigFloat, BigFloat) {
    let mut re = BigFloat::zero().with_precision(precision);
    let mut im = BigFloat::zero().with_precision(precision);
    for (k, c) in value.coords() {
        let coord = BigFloat::from_rational(c, precision);
        let d = k.radicand().unsigned_abs();
        let term = if d == 1 {
            coord
        } else {
            coord * BigFloat::from_rational(&Rational::from_integer(d.into()), precision).sqrt()
        };
        if k.is_imaginary() {
            im += &term;
        } else {
            re += &term;
        }
    }
    (re, im)
}

fn constant_of(value: &ParamPoly<Radical>, domain: &'static str) -> Result<Radical, ScalarError> {
    value.as_constant().ok_or_else(|| ScalarError::NotRepresentable {
        domain,
        reason: "value depends on the parameter t".into(),
    })
}

impl FromExact for BigFloat {
    fn from_exact(value: &ParamPoly<Radical>, ctx: &ConvertCtx) -> Result<Self, ScalarError> {
        let c = constant_of(value, "float")?;
        if c.has_imaginary() {
            return Err(ScalarError::NotRepresentable {
                domain: "float",
                reason: "imaginary values need the complex float domain".into(),
            });
        }
        Ok(radical_parts(&c, ctx.precision).0)
    }

    fn is_exact() -> bool {
        false
    }
}

impl DumpCoeff for BigFloat {
    /// Written as `m*2^e` with integer significand, which is exact.
    fn write_coeff(&self, out: &mut String) {
        let repr = self.0.repr();
        out.push_str(&format!("{}*2^{}", repr.significand(), repr.exponent()));
    }

    fn parse_coeff(text: &str) -> Result<Self, ScalarError> {
        let err = || ScalarError::Parse(text.to_string());
        let (m, e) = text.trim().split_once("*2^").ok_or_else(err)?;
        let m: IBig = m.trim().parse().map_err(|_| err())?;
        let e: isize = e.trim().parse().map_err(|_| err())?;
        let digits = m.clone().unsigned_abs().bit_len().max(1);
        Ok(BigFloat(
            Repr::from_parts(m, e)
                .with_precision(digits.max(DEFAULT_PRECISION))
                .value(),
        ))
    }
}

/// Real scalar types usable as the components of a complex coefficient.
pub trait RealFloat: Field + num_traits::NumAssign + for<'a> AddAssign<&'a Self> + PartialOrd {
    fn from_exact_rational(r: &Rational, precision: usize) -> Self;

    fn to_f64_lossy(&self) -> f64;

    fn sqrt_real(&self) -> Self;
}

impl RealFloat for BigFloat {
    fn from_exact_rational(r: &Rational, precision: usize) -> Self {
        BigFloat::from_rational(r, precision)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64()
    }

    fn sqrt_real(&self) -> Self {
        self.sqrt()
    }
}

/// Complex arbitrary-precision coefficients, used for complex parameter scans.
pub type ComplexFloat = Complex<BigFloat>;

impl<T: RealFloat> Coeff for Complex<T> {
    type Field = Complex<T>;

    fn from_field(c: Self) -> Self {
        c
    }

    fn scale(&self, c: &Self) -> Self {
        self.clone() * c.clone()
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    fn magnitude(&self) -> f64 {
        self.re.to_f64_lossy().hypot(self.im.to_f64_lossy())
    }

    fn domain_name() -> &'static str {
        "complex"
    }
}

impl<T: RealFloat> Field for Complex<T> {
    fn from_int(v: i64) -> Self {
        Complex::new(T::from_int(v), T::zero())
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let norm = self.re.mul_ref(&self.re) + self.im.mul_ref(&self.im);
        let inv = norm.inv()?;
        Ok(Complex::new(self.re.mul_ref(&inv), -self.im.mul_ref(&inv)))
    }
}

impl FromExact for ComplexFloat {
    fn from_exact(value: &ParamPoly<Radical>, ctx: &ConvertCtx) -> Result<Self, ScalarError> {
        let c = constant_of(value, "complex")?;
        let (re, im) = radical_parts(&c, ctx.precision);
        Ok(Complex::new(re, im))
    }

    fn is_exact() -> bool {
        false
    }
}

impl<T: RealFloat + DumpCoeff> DumpCoeff for Complex<T> {
    fn write_coeff(&self, out: &mut String) {
        self.re.write_coeff(out);
        out.push_str(" + ");
        self.im.write_coeff(out);
        out.push_str("*i");
    }

    fn parse_coeff(text: &str) -> Result<Self, ScalarError> {
        let err = || ScalarError::Parse(text.to_string());
        let (re, im) = text.split_once(" + ").ok_or_else(err)?;
        let im = im.trim().strip_suffix("*i").ok_or_else(err)?;
        Ok(Complex::new(T::parse_coeff(re)?, T::parse_coeff(im)?))
    }
}

macro_rules! primitive_float {
    ($t:ty, $name:expr) => {
        impl Coeff for $t {
            type Field = $t;

            fn from_field(c: $t) -> Self {
                c
            }

            fn scale(&self, c: &$t) -> Self {
                self * c
            }

            fn mul_ref(&self, rhs: &Self) -> Self {
                self * rhs
            }

            fn magnitude(&self) -> f64 {
                (*self as f64).abs()
            }

            fn domain_name() -> &'static str {
                $name
            }
        }

        impl Field for $t {
            fn from_int(v: i64) -> Self {
                v as $t
            }

            fn inv(&self) -> Result<Self, ScalarError> {
                if *self == 0.0 {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(1.0 / self)
            }
        }

        impl RealFloat for $t {
            fn from_exact_rational(r: &Rational, _precision: usize) -> Self {
                r.to_f64() as $t
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }

            fn sqrt_real(&self) -> Self {
                self.sqrt()
            }
        }

        impl FromExact for $t {
            fn from_exact(value: &ParamPoly<Radical>, _ctx: &ConvertCtx) -> Result<Self, ScalarError> {
                let c = constant_of(value, $name)?;
                if c.has_imaginary() {
                    return Err(ScalarError::NotRepresentable {
                        domain: $name,
                        reason: "imaginary value".into(),
                    });
                }
                Ok(c.to_complex_f64().0 as $t)
            }

            fn is_exact() -> bool {
                false
            }
        }

        impl FromExact for Complex<$t> {
            fn from_exact(value: &ParamPoly<Radical>, _ctx: &ConvertCtx) -> Result<Self, ScalarError> {
                let (re, im) = constant_of(value, $name)?.to_complex_f64();
                Ok(Complex::new(re as $t, im as $t))
            }

            fn is_exact() -> bool {
                false
            }
        }

        impl DumpCoeff for $t {
            fn write_coeff(&self, out: &mut String) {
                out.push_str(&format!("{:?}", self));
            }

            fn parse_coeff(text: &str) -> Result<Self, ScalarError> {
                text.trim()
                    .parse()
                    .map_err(|_| ScalarError::Parse(text.to_string()))
            }
        }
    };
}

primitive_float!(f64, "f64");
primitive_float!(f32, "f32");
