//! The field ℚ(√d₁, …, √d_m), optionally extended by √−1.
//!
//! Elements are stored as rational coordinates over the basis of square roots
//! of square-free integers. A basis element is identified by its signed
//! square-free radicand: `1` is the rational unit, `d > 1` is √d, and `-d` is
//! √−1·√d. Because square roots of distinct square-free integers are linearly
//! independent over ℚ, the sparse coordinate list is a canonical form.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::parse_rational;
use super::{Coeff, ConvertCtx, DumpCoeff, Field, FromExact, ParamPoly, Rational, ScalarError};

/// Signed square-free radicand naming one basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RadicalKey(i64);

impl RadicalKey {
    pub const ONE: RadicalKey = RadicalKey(1);
    pub const I: RadicalKey = RadicalKey(-1);

    pub fn radicand(self) -> i64 {
        self.0
    }

    pub fn is_imaginary(self) -> bool {
        self.0 < 0
    }

    /// √a·√b = coefficient·√key.
    fn product(self, other: RadicalKey) -> (i64, RadicalKey) {
        let (a, b) = (self.0.unsigned_abs(), other.0.unsigned_abs());
        let g = a.gcd(&b);
        let mag = (a / g)
            .checked_mul(b / g)
            .expect("radical basis product overflows i64");
        let mut coeff = g as i64;
        let negative = match (self.is_imaginary(), other.is_imaginary()) {
            (true, true) => {
                coeff = -coeff;
                false
            }
            (true, false) | (false, true) => true,
            (false, false) => false,
        };
        let mag = mag as i64;
        (coeff, RadicalKey(if negative { -mag } else { mag }))
    }
}

impl Ord for RadicalKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .unsigned_abs()
            .cmp(&other.0.unsigned_abs())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for RadicalKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Splits `d` as `s² · f` with `f` square-free and carrying the sign of `d`.
///
/// Returns `(s, f)`. Panics on `d == 0`.
pub fn squarefree_factor(d: i64) -> (i64, i64) {
    assert!(d != 0, "radicand must be nonzero");
    let sign = d.signum();
    let mut rest = d.unsigned_abs();
    let mut square_root = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        let mut count = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            count += 1;
        }
        square_root *= p.pow(count / 2);
        if count % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    free *= rest;
    (square_root as i64, sign * free as i64)
}

fn prime_factors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p) {
            out.push(p);
            while d.is_multiple_of(p) {
                d /= p;
            }
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Radical {
    /// Sorted by key, no zero coordinates.
    coords: Vec<(RadicalKey, Rational)>,
}

impl Radical {
    pub fn from_rational(r: Rational) -> Self {
        let mut out = Radical { coords: Vec::new() };
        if !r.is_zero() {
            out.coords.push((RadicalKey::ONE, r));
        }
        out
    }

    /// The exact value of √d for any nonzero integer `d`.
    pub fn sqrt(d: i64) -> Self {
        let (s, f) = squarefree_factor(d);
        Self::from_coords([(RadicalKey(f), Rational::from_integer(s.into()))])
    }

    /// Builds an element from (radicand, coordinate) pairs. Radicands must be
    /// square-free.
    pub fn from_coords(items: impl IntoIterator<Item = (RadicalKey, Rational)>) -> Self {
        let mut map: BTreeMap<RadicalKey, Rational> = BTreeMap::new();
        for (k, c) in items {
            debug_assert_eq!(squarefree_factor(k.0).0, 1, "radicand not square-free");
            *map.entry(k).or_insert_with(Rational::zero) += c;
        }
        Radical {
            coords: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn coords(&self) -> &[(RadicalKey, Rational)] {
        &self.coords
    }

    pub fn rational_part(&self) -> Rational {
        self.coordinate(RadicalKey::ONE)
    }

    pub fn coordinate(&self, key: RadicalKey) -> Rational {
        self.coords
            .binary_search_by(|(k, _)| k.cmp(&key))
            .map(|i| self.coords[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.coords.as_slice() {
            [] => Some(Rational::zero()),
            [(k, c)] if *k == RadicalKey::ONE => Some(c.clone()),
            _ => None,
        }
    }

    pub fn has_imaginary(&self) -> bool {
        self.coords.iter().any(|(k, _)| k.is_imaginary())
    }

    /// Real and imaginary parts as `f64`.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in &self.coords {
            let v = c.to_f64();
            let root = (k.0.unsigned_abs() as f64).sqrt();
            if k.is_imaginary() {
                im += v * root;
            } else {
                re += v * root;
            }
        }
        (re, im)
    }

    /// Applies the automorphism that flips the sign of every basis element
    /// whose radicand is divisible by `p` (or, for `p == -1`, every imaginary
    /// element).
    fn conjugate(&self, p: i64) -> Self {
        let coords = self
            .coords
            .iter()
            .map(|(k, c)| {
                let flip = if p == -1 {
                    k.is_imaginary()
                } else {
                    k.0.unsigned_abs() % (p as u64) == 0
                };
                (*k, if flip { -c.clone() } else { c.clone() })
            })
            .collect();
        Radical { coords }
    }

    fn generators(&self) -> Vec<i64> {
        let mut primes: Vec<i64> = Vec::new();
        for (k, _) in &self.coords {
            for p in prime_factors(k.0.unsigned_abs()) {
                if !primes.contains(&(p as i64)) {
                    primes.push(p as i64);
                }
            }
        }
        primes.sort_unstable();
        if self.has_imaginary() {
            primes.push(-1);
        }
        primes
    }

    fn mul_impl(&self, rhs: &Radical) -> Radical {
        if self.coords.len() == 1 && self.coords[0].0 == RadicalKey::ONE {
            return rhs.scale_rational(&self.coords[0].1);
        }
        if rhs.coords.len() == 1 && rhs.coords[0].0 == RadicalKey::ONE {
            return self.scale_rational(&rhs.coords[0].1);
        }
        let mut out = Radical::zero();
        for (ka, ca) in &self.coords {
            for (kb, cb) in &rhs.coords {
                let (factor, key) = ka.product(*kb);
                let mut term = ca * cb;
                if factor != 1 {
                    term *= Rational::from(factor);
                }
                out.add_coord(key, term);
            }
        }
        out
    }

    /// In-place `self ± rhs`; avoids reallocating when the supports agree,
    /// which is the common case inside series arithmetic.
    fn accumulate(&mut self, rhs: &Radical, negate: bool) {
        let mut dropped = false;
        for (k, c) in &rhs.coords {
            match self.coords.binary_search_by(|(key, _)| key.cmp(k)) {
                Ok(i) => {
                    let slot = &mut self.coords[i].1;
                    if negate {
                        *slot -= c;
                    } else {
                        *slot += c;
                    }
                    dropped |= slot.is_zero();
                }
                Err(i) => {
                    let c = if negate { -c.clone() } else { c.clone() };
                    self.coords.insert(i, (*k, c));
                }
            }
        }
        if dropped {
            self.coords.retain(|(_, c)| !c.is_zero());
        }
    }

    fn add_coord(&mut self, k: RadicalKey, c: Rational) {
        match self.coords.binary_search_by(|(key, _)| key.cmp(&k)) {
            Ok(i) => {
                self.coords[i].1 += c;
                if self.coords[i].1.is_zero() {
                    self.coords.remove(i);
                }
            }
            Err(i) => {
                if !c.is_zero() {
                    self.coords.insert(i, (k, c));
                }
            }
        }
    }

    fn scale_rational(&self, r: &Rational) -> Radical {
        if r.is_zero() {
            return Radical::zero();
        }
        Radical {
            coords: self.coords.iter().map(|(k, c)| (*k, c * r)).collect(),
        }
    }

    fn add_impl(&self, rhs: &Radical, negate: bool) -> Radical {
        let mut out = Vec::with_capacity(self.coords.len() + rhs.coords.len());
        let (mut i, mut j) = (0, 0);
        while i < self.coords.len() || j < rhs.coords.len() {
            let ord = match (self.coords.get(i), rhs.coords.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                (None, _) => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.coords[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (k, c) = &rhs.coords[j];
                    out.push((*k, if negate { -c.clone() } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let (k, a) = &self.coords[i];
                    let b = &rhs.coords[j].1;
                    let s = if negate { a - b } else { a + b };
                    if !s.is_zero() {
                        out.push((*k, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Radical { coords: out }
    }
}

impl PartialEq<Rational> for Radical {
    fn eq(&self, other: &Rational) -> bool {
        self.as_rational().is_some_and(|r| &r == other)
    }
}

impl fmt::Debug for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dump_string())
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dump_string())
    }
}

impl From<Rational> for Radical {
    fn from(r: Rational) -> Self {
        Radical::from_rational(r)
    }
}

impl Add for Radical {
    type Output = Radical;
    fn add(self, rhs: Radical) -> Radical {
        self.add_impl(&rhs, false)
    }
}

impl Sub for Radical {
    type Output = Radical;
    fn sub(self, rhs: Radical) -> Radical {
        self.add_impl(&rhs, true)
    }
}

impl Mul for Radical {
    type Output = Radical;
    fn mul(self, rhs: Radical) -> Radical {
        self.mul_impl(&rhs)
    }
}

impl<'a> Add<&'a Radical> for &'a Radical {
    type Output = Radical;
    fn add(self, rhs: &Radical) -> Radical {
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a Radical> for &'a Radical {
    type Output = Radical;
    fn sub(self, rhs: &Radical) -> Radical {
        self.add_impl(rhs, true)
    }
}

impl<'a> Mul<&'a Radical> for &'a Radical {
    type Output = Radical;
    fn mul(self, rhs: &Radical) -> Radical {
        self.mul_impl(rhs)
    }
}

impl Neg for Radical {
    type Output = Radical;
    fn neg(self) -> Radical {
        Radical {
            coords: self.coords.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl AddAssign<&Radical> for Radical {
    fn add_assign(&mut self, rhs: &Radical) {
        self.accumulate(rhs, false);
    }
}

impl SubAssign<&Radical> for Radical {
    fn sub_assign(&mut self, rhs: &Radical) {
        self.accumulate(rhs, true);
    }
}

impl MulAssign<&Radical> for Radical {
    fn mul_assign(&mut self, rhs: &Radical) {
        *self = self.mul_impl(rhs);
    }
}

impl Zero for Radical {
    fn zero() -> Self {
        Radical { coords: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }
}

impl One for Radical {
    fn one() -> Self {
        Radical::from_rational(Rational::one())
    }
}

impl Coeff for Radical {
    type Field = Radical;

    fn from_field(c: Radical) -> Self {
        c
    }

    fn scale(&self, c: &Radical) -> Self {
        self.mul_impl(c)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul_impl(rhs)
    }

    fn magnitude(&self) -> f64 {
        let (re, im) = self.to_complex_f64();
        re.hypot(im)
    }

    fn domain_name() -> &'static str {
        "radical"
    }
}

impl Field for Radical {
    fn from_int(v: i64) -> Self {
        Radical::from_rational(Rational::from_integer(v.into()))
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let mut numer = Radical::one();
        let mut norm = self.clone();
        for g in self.generators() {
            let conj = norm.conjugate(g);
            numer = numer.mul_impl(&conj);
            norm = norm.mul_impl(&conj);
        }
        let r = norm
            .as_rational()
            .expect("conjugate product of a radical element is rational");
        if r.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(numer.scale_rational(&r.recip()))
    }
}

impl FromExact for Radical {
    fn from_exact(value: &ParamPoly<Radical>, _ctx: &ConvertCtx) -> Result<Self, ScalarError> {
        value.as_constant().ok_or_else(|| ScalarError::NotRepresentable {
            domain: "radical",
            reason: "value depends on the parameter t".into(),
        })
    }

    fn is_exact() -> bool {
        true
    }
}

impl DumpCoeff for Radical {
    fn write_coeff(&self, out: &mut String) {
        if self.coords.is_empty() {
            out.push_str("0/1");
            return;
        }
        for (i, (k, c)) in self.coords.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&format!("{}/{}", c.numer(), c.denom()));
            if *k != RadicalKey::ONE {
                out.push_str(&format!("*sqrt({})", k.0));
            }
        }
    }

    fn parse_coeff(text: &str) -> Result<Self, ScalarError> {
        let mut items = Vec::new();
        for part in super::split_top_level_plus(text) {
            let (c, key) = match part.split_once("*sqrt(") {
                Some((c, rest)) => {
                    let d = rest
                        .strip_suffix(')')
                        .ok_or_else(|| ScalarError::Parse(part.to_string()))?;
                    let d: i64 = d
                        .trim()
                        .parse()
                        .map_err(|_| ScalarError::Parse(part.to_string()))?;
                    if d == 0 || squarefree_factor(d).0 != 1 {
                        return Err(ScalarError::Parse(part.to_string()));
                    }
                    (c, RadicalKey(d))
                }
                None => (part, RadicalKey::ONE),
            };
            items.push((key, parse_rational(c)?));
        }
        Ok(Radical::from_coords(items))
    }
}
