use std::collections::btree_map::{self, Entry};
use std::collections::BTreeMap;


use super::{Exponent, SeriesError};
use crate::scalar::Coeff;

/// A homogeneous polynomial: every key has total degree `degree`, and no
/// stored coefficient is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPoly<S> {
    degree: u32,
    terms: BTreeMap<Exponent, S>,
}

impl<S: Coeff> HomogeneousPoly<S> {
    pub fn new(degree: u32) -> Self {
        HomogeneousPoly {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        degree: u32,
        terms: impl IntoIterator<Item = (Exponent, S)>,
    ) -> Result<Self, SeriesError> {
        let mut p = Self::new(degree);
        for (e, c) in terms {
            if e.degree() != degree {
                return Err(SeriesError::DegreeMismatch {
                    expected: degree,
                    found: e.degree(),
                });
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, e: &Exponent) -> Option<&S> {
        self.terms.get(e)
    }

    pub fn coeff(&self, e: &Exponent) -> S {
        self.terms.get(e).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Exponent, S> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Exponent, S> {
        self.terms
    }

    /// Adds `c` to the coefficient of `e`, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Exponent, c: &S) {
        debug_assert_eq!(e.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
        }
    }

    pub fn add_term_owned(&mut self, e: Exponent, c: S) {
        debug_assert_eq!(e.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn remove(&mut self, e: &Exponent) -> Option<S> {
        self.terms.remove(e)
    }

    pub fn add_assign(&mut self, other: &Self) {
        debug_assert!(other.is_empty() || other.degree == self.degree);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c);
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        debug_assert!(other.is_empty() || other.degree == self.degree);
        for (e, c) in &other.terms {
            self.add_term_owned(e.clone(), -c.clone());
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        if factor.is_zero() {
            return;
        }
        debug_assert!(other.is_empty() || other.degree == self.degree);
        for (e, c) in &other.terms {
            self.add_term_owned(e.clone(), c.mul_ref(factor));
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::new(self.degree);
        out.add_scaled(self, factor);
        out
    }

    pub fn scale_field(&self, factor: &S::Field) -> Self {
        let mut out = Self::new(self.degree);
        for (e, c) in &self.terms {
            out.add_term_owned(e.clone(), c.scale(factor));
        }
        out
    }

    pub fn neg(&self) -> Self {
        HomogeneousPoly {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    /// `self += a · b`; `a.degree + b.degree` must equal `self.degree`.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        if a.is_empty() || b.is_empty() {
            return;
        }
        debug_assert_eq!(a.degree + b.degree, self.degree);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                self.add_term_owned(ea.mul(eb), ca.mul_ref(cb));
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new(self.degree + other.degree);
        out.add_product(self, other);
        out
    }

    /// Partial derivative with respect to variable `var` (0-based over 2n).
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::new(self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            let p = e.power(var);
            if p == 0 {
                continue;
            }
            let lowered = e.lower(var).expect("power is positive");
            out.add_term_owned(lowered, c.mul_ref(&S::from_i64(p as i64)));
        }
        out
    }

    /// Multiplies by the single variable `var`.
    pub fn mul_variable(&self, var: usize) -> Self {
        HomogeneousPoly {
            degree: self.degree + 1,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.raise(var), c.clone()))
                .collect(),
        }
    }

    pub fn filter(&self, keep: impl Fn(&Exponent) -> bool) -> Self {
        HomogeneousPoly {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<T: Coeff>(&self, f: impl Fn(&S) -> T) -> HomogeneousPoly<T> {
        let mut out = HomogeneousPoly::new(self.degree);
        for (e, c) in &self.terms {
            out.add_term_owned(e.clone(), f(c));
        }
        out
    }

    /// Checks the canonical-form invariants.
    pub fn validate(&self) -> Result<(), SeriesError> {
        for (e, c) in &self.terms {
            if e.degree() != self.degree {
                return Err(SeriesError::DegreeMismatch {
                    expected: self.degree,
                    found: e.degree(),
                });
            }
            if c.is_zero() {
                return Err(SeriesError::StoredZero(e.clone()));
            }
        }
        Ok(())
    }
}

impl<'a, S> IntoIterator for &'a HomogeneousPoly<S> {
    type Item = (&'a Exponent, &'a S);
    type IntoIter = btree_map::Iter<'a, Exponent, S>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}
