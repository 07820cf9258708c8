use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Multi-index of a monomial `ξ^α η^β` (or `x^α y^β`).
///
/// Stored as the concatenation `(α₁..αₙ, β₁..βₙ)`. Ordered graded
/// lexicographically: first by total degree, then lexicographically on the
/// concatenated vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent(SmallVec<[u16; 8]>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(SmallVec::from_elem(0, 2 * n))
    }

    pub fn new(alpha: &[u16], beta: &[u16]) -> Self {
        assert_eq!(alpha.len(), beta.len(), "alpha and beta must have equal length");
        let mut v = SmallVec::with_capacity(2 * alpha.len());
        v.extend_from_slice(alpha);
        v.extend_from_slice(beta);
        Exponent(v)
    }

    pub fn from_powers(powers: &[u16]) -> Self {
        assert!(powers.len().is_multiple_of(2), "exponent needs an even number of entries");
        Exponent(SmallVec::from_slice(powers))
    }

    /// The exponent of the single variable `var` (0-based over all 2n).
    pub fn unit(n: usize, var: usize) -> Self {
        let mut e = Self::zero(n);
        e.0[var] = 1;
        e
    }

    /// Degrees of freedom.
    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn powers(&self) -> &[u16] {
        &self.0
    }

    pub fn alpha(&self) -> &[u16] {
        &self.0[..self.n()]
    }

    pub fn beta(&self) -> &[u16] {
        &self.0[self.n()..]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&p| p as u32).sum()
    }

    pub fn power(&self, var: usize) -> u16 {
        self.0[var]
    }

    /// A monomial is resonant when α = β componentwise.
    pub fn is_resonant(&self) -> bool {
        self.alpha() == self.beta()
    }

    /// α − β.
    pub fn difference(&self) -> SmallVec<[i32; 4]> {
        self.alpha()
            .iter()
            .zip(self.beta())
            .map(|(&a, &b)| a as i32 - b as i32)
            .collect()
    }

    pub fn mul(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.0.len(), other.0.len());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Removes one power of `var`; `None` if the variable is absent.
    pub fn lower(&self, var: usize) -> Option<Exponent> {
        if self.0[var] == 0 {
            return None;
        }
        let mut e = self.clone();
        e.0[var] -= 1;
        Some(e)
    }

    pub fn raise(&self, var: usize) -> Exponent {
        let mut e = self.clone();
        e.0[var] += 1;
        e
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.0.iter().position(|&p| p != 0)
    }

    /// All exponents in `2n` variables of total degree `degree`, in canonical
    /// order.
    pub fn all_of_degree(n: usize, degree: u32) -> Vec<Exponent> {
        let mut out = Vec::new();
        let mut current = vec![0u16; 2 * n];
        fill(&mut current, 0, degree, &mut out);
        out.sort();
        out
    }

    /// All resonant exponents (α = β) of total degree `degree`.
    pub fn resonant_of_degree(n: usize, degree: u32) -> Vec<Exponent> {
        if degree % 2 == 1 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut half = vec![0u16; n];
        fill(&mut half, 0, degree / 2, &mut out);
        let mut res: Vec<Exponent> = out
            .into_iter()
            .map(|h| Exponent::new(&h.0, &h.0))
            .collect();
        res.sort();
        res
    }
}

fn fill(current: &mut Vec<u16>, pos: usize, remaining: u32, out: &mut Vec<Exponent>) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u16;
        out.push(Exponent(SmallVec::from_slice(current)));
        current[pos] = 0;
        return;
    }
    if current.is_empty() {
        return;
    }
    for p in 0..=remaining {
        current[pos] = p as u16;
        fill(current, pos + 1, remaining - p, out);
    }
    current[pos] = 0;
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:?}", self.alpha(), self.beta())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={:?} beta={:?}", self.alpha(), self.beta())
    }
}
