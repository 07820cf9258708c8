use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{Composer, Exponent, HomogeneousPoly, SeriesError};
use crate::scalar::Coeff;

/// A multivariate power series in `2n` variables, truncated at a total degree.
///
/// Variables are ordered `(x₁..xₙ, y₁..yₙ)` (or `(ξ, η)`). Only nonempty
/// homogeneous parts are stored, and none beyond the truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSeries<S> {
    n: usize,
    order: u32,
    parts: BTreeMap<u32, HomogeneousPoly<S>>,
}

impl<S: Coeff> GradedSeries<S> {
    pub fn zero(n: usize, order: u32) -> Self {
        GradedSeries {
            n,
            order,
            parts: BTreeMap::new(),
        }
    }

    /// The series consisting of the single variable `var`.
    pub fn variable(n: usize, var: usize, order: u32) -> Self {
        let mut s = Self::zero(n, order);
        s.add_term(Exponent::unit(n, var), &S::one());
        s
    }

    pub fn constant(n: usize, order: u32, c: S) -> Self {
        let mut s = Self::zero(n, order);
        s.add_term(Exponent::zero(n), &c);
        s
    }

    pub fn from_terms(
        n: usize,
        order: u32,
        terms: impl IntoIterator<Item = (Exponent, S)>,
    ) -> Result<Self, SeriesError> {
        let mut s = Self::zero(n, order);
        for (e, c) in terms {
            if e.n() != n {
                return Err(SeriesError::VariableCountMismatch {
                    left: n,
                    right: e.n(),
                });
            }
            s.add_term(e, &c);
        }
        Ok(s)
    }

    pub fn from_parts(
        n: usize,
        order: u32,
        parts: impl IntoIterator<Item = HomogeneousPoly<S>>,
    ) -> Self {
        let mut s = Self::zero(n, order);
        for p in parts {
            s.add_part(&p);
        }
        s
    }

    /// Degrees of freedom (half the variable count).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, degree: u32) -> Option<&HomogeneousPoly<S>> {
        self.parts.get(&degree)
    }

    pub fn part_or_empty(&self, degree: u32) -> HomogeneousPoly<S> {
        self.parts
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| HomogeneousPoly::new(degree))
    }

    pub fn parts(&self) -> impl Iterator<Item = &HomogeneousPoly<S>> {
        self.parts.values()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.parts.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.parts.keys().next_back().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.parts.values().map(HomogeneousPoly::len).sum()
    }

    /// All terms in canonical (graded lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &S)> {
        self.parts.values().flat_map(|p| p.iter())
    }

    pub fn coeff(&self, e: &Exponent) -> S {
        self.parts
            .get(&e.degree())
            .map(|p| p.coeff(e))
            .unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, e: Exponent, c: &S) {
        let d = e.degree();
        if d > self.order || c.is_zero() {
            return;
        }
        let part = self
            .parts
            .entry(d)
            .or_insert_with(|| HomogeneousPoly::new(d));
        part.add_term(e, c);
        if part.is_empty() {
            self.parts.remove(&d);
        }
    }

    /// Adds a homogeneous part (ignored beyond the truncation order).
    pub fn add_part(&mut self, p: &HomogeneousPoly<S>) {
        if p.is_empty() || p.degree() > self.order {
            return;
        }
        let d = p.degree();
        let part = self
            .parts
            .entry(d)
            .or_insert_with(|| HomogeneousPoly::new(d));
        part.add_assign(p);
        if part.is_empty() {
            self.parts.remove(&d);
        }
    }

    /// Replaces the part of degree `p.degree()`.
    pub fn set_part(&mut self, p: HomogeneousPoly<S>) {
        let d = p.degree();
        if p.is_empty() || d > self.order {
            self.parts.remove(&d);
        } else {
            self.parts.insert(d, p);
        }
    }

    pub fn truncate(&self, order: u32) -> Self {
        GradedSeries {
            n: self.n,
            order,
            parts: self
                .parts
                .range(..=order)
                .map(|(d, p)| (*d, p.clone()))
                .collect(),
        }
    }

    /// Keeps the parts of degree in `lo..=hi`.
    pub fn degree_range(&self, lo: u32, hi: u32) -> Self {
        GradedSeries {
            n: self.n,
            order: self.order,
            parts: self
                .parts
                .range(lo..=hi)
                .map(|(d, p)| (*d, p.clone()))
                .collect(),
        }
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.parts.retain(|d, _| *d <= order);
        self.order = order;
        self
    }

    fn check_arity(&self, other: &Self) -> Result<(), SeriesError> {
        if self.n != other.n {
            return Err(SeriesError::VariableCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Coefficientwise sum, truncated at the smaller of the two orders.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_arity(other)?;
        let mut out = self.truncate(self.order.min(other.order));
        for p in other.parts.values() {
            out.add_part(p);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GradedSeries {
            n: self.n,
            order: self.order,
            parts: self.parts.iter().map(|(d, p)| (*d, p.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for p in self.parts.values() {
            out.add_part(&p.scale(c));
        }
        out
    }

    pub fn scale_field(&self, c: &S::Field) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for p in self.parts.values() {
            out.add_part(&p.scale_field(c));
        }
        out
    }

    /// Product with every part above `order` discarded.
    ///
    /// Output degrees are computed independently (in parallel); each one sums
    /// its contributions in a fixed order, so the result does not depend on
    /// scheduling.
    pub fn mul_truncated(&self, other: &Self, order: u32) -> Result<Self, SeriesError> {
        self.check_arity(other)?;
        let (Some(lo_a), Some(lo_b)) = (self.min_degree(), other.min_degree()) else {
            return Ok(Self::zero(self.n, order));
        };
        let lo = lo_a + lo_b;
        let hi = (self.max_degree().unwrap() + other.max_degree().unwrap()).min(order);
        if lo > hi {
            return Ok(Self::zero(self.n, order));
        }
        let parts: Vec<HomogeneousPoly<S>> = (lo..=hi)
            .into_par_iter()
            .map(|d| {
                let mut acc = HomogeneousPoly::new(d);
                for (da, pa) in &self.parts {
                    if *da > d {
                        break;
                    }
                    if let Some(pb) = other.parts.get(&(d - da)) {
                        acc.add_product(pa, pb);
                    }
                }
                acc
            })
            .collect();
        Ok(Self::from_parts(self.n, order, parts))
    }

    /// Partial derivative with respect to variable `var` (0-based over 2n).
    ///
    /// The truncation order drops by one.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.n, self.order.saturating_sub(1));
        for p in self.parts.values() {
            if p.degree() == 0 {
                continue;
            }
            out.add_part(&p.derivative(var));
        }
        out
    }

    /// Poisson bracket `{f, g} = Σ_k ∂f/∂x_k ∂g/∂y_k − ∂f/∂y_k ∂g/∂x_k`,
    /// truncated at `order`. Degree-0 and degree-1 parts are kept.
    pub fn poisson_bracket(&self, other: &Self, order: u32) -> Result<Self, SeriesError> {
        self.check_arity(other)?;
        let n = self.n;
        let mut out = Self::zero(n, order);
        for k in 0..n {
            let fx = self.derivative(k);
            let fy = self.derivative(n + k);
            let gx = other.derivative(k);
            let gy = other.derivative(n + k);
            let plus = fx.mul_truncated(&gy, order)?;
            let minus = fy.mul_truncated(&gx, order)?;
            for p in plus.parts.values() {
                out.add_part(p);
            }
            for p in minus.parts.values() {
                out.add_part(&p.neg());
            }
        }
        Ok(out)
    }

    /// Substitutes `subs[i]` for variable `i`, truncating at `order`.
    ///
    /// Every substituted series must have no constant part so that the
    /// result is well defined degree by degree.
    pub fn compose_truncated(&self, subs: &[GradedSeries<S>], order: u32) -> Result<Self, SeriesError> {
        if subs.len() != 2 * self.n {
            return Err(SeriesError::VariableCountMismatch {
                left: 2 * self.n,
                right: subs.len(),
            });
        }
        let out_n = subs.first().map_or(self.n, |s| s.n);
        for (i, s) in subs.iter().enumerate() {
            if s.n != out_n {
                return Err(SeriesError::VariableCountMismatch {
                    left: out_n,
                    right: s.n,
                });
            }
            if s.part(0).is_some() {
                return Err(SeriesError::ConstantSubstitution(i));
            }
        }
        let mut composer = Composer::from_series(out_n, subs, order);
        let mut out = Self::zero(out_n, order);
        let min_sub = subs.iter().filter_map(|s| s.min_degree()).min().unwrap_or(1);
        for (e, c) in self.terms() {
            let d = e.degree();
            if d == 0 {
                out.add_term(Exponent::zero(out_n), c);
                continue;
            }
            for m in (d * min_sub)..=order {
                let part = composer.part(e, m);
                if !part.is_empty() {
                    let scaled = part.scale(c);
                    out.add_part(&scaled);
                }
            }
        }
        Ok(out)
    }

    /// Only the resonant monomials (α = β).
    pub fn resonant_part(&self) -> Self {
        self.filter(Exponent::is_resonant)
    }

    pub fn nonresonant_part(&self) -> Self {
        self.filter(|e| !e.is_resonant())
    }

    pub fn filter(&self, keep: impl Fn(&Exponent) -> bool) -> Self {
        let mut out = Self::zero(self.n, self.order);
        for p in self.parts.values() {
            out.set_part(p.filter(&keep));
        }
        out
    }

    pub fn map_coeffs<T: Coeff>(&self, f: impl Fn(&S) -> T) -> GradedSeries<T> {
        let mut out = GradedSeries::zero(self.n, self.order);
        for p in self.parts.values() {
            out.set_part(p.map_coeffs(&f));
        }
        out
    }

    /// Checks the canonical-form invariants: no stored zero, no off-degree
    /// key, no part beyond the truncation order, consistent arity.
    pub fn validate(&self) -> Result<(), SeriesError> {
        for (d, p) in &self.parts {
            if *d != p.degree() {
                return Err(SeriesError::DegreeMismatch {
                    expected: *d,
                    found: p.degree(),
                });
            }
            if *d > self.order {
                return Err(SeriesError::BeyondOrder {
                    degree: *d,
                    order: self.order,
                });
            }
            if p.is_empty() {
                return Err(SeriesError::EmptyPart(*d));
            }
            p.validate()?;
            for (e, _) in p {
                if e.n() != self.n {
                    return Err(SeriesError::VariableCountMismatch {
                        left: self.n,
                        right: e.n(),
                    });
                }
            }
        }
        Ok(())
    }
}
