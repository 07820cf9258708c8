//! Seeded random Hamiltonians for test suites and the audit matrix.

use std::collections::BTreeMap;

use rand::Rng;

use super::{DomainTag, FrequencyVector, HamiltonianSpec, NormalizationMode, SpecValue};
use crate::scalar::{Radical, Rational};
use crate::series::Exponent;

/// Shape of a random Hamiltonian.
#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub order: u32,
    pub lambda: Vec<Radical>,
    /// Radicands to declare; must cover every radical used in `lambda`.
    pub radicals: Vec<i64>,
    /// Probability that a monomial of degree `3..=order` gets a coefficient.
    pub density: f64,
    /// Numerators are drawn from `-max_num..=max_num` without zero.
    pub max_num: i64,
    /// Denominators are drawn from `1..=max_den`.
    pub max_den: i64,
    pub mode: NormalizationMode,
}

impl RandomSpec {
    pub fn dense(order: u32, lambda: Vec<Radical>, radicals: Vec<i64>) -> Self {
        RandomSpec {
            order,
            lambda,
            radicals,
            density: 1.0,
            max_num: 3,
            max_den: 4,
            mode: NormalizationMode::Phi,
        }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn sample(&self, rng: &mut impl Rng) -> HamiltonianSpec {
        let n = self.lambda.len();
        let mut terms = BTreeMap::new();
        for d in 3..=self.order {
            for e in Exponent::all_of_degree(n, d) {
                if !rng.gen_bool(self.density) {
                    continue;
                }
                let mut num = rng.gen_range(-self.max_num..self.max_num);
                if num >= 0 {
                    num += 1;
                }
                let den = rng.gen_range(1..=self.max_den);
                let c = Rational::new(num.into(), den.into());
                terms.insert(e, SpecValue::constant(Radical::from_rational(c)));
            }
        }
        HamiltonianSpec {
            n,
            order: self.order,
            radicals: self.radicals.clone(),
            lambda: FrequencyVector(self.lambda.iter().cloned().map(SpecValue::constant).collect()),
            terms,
            mode: self.mode,
            domain: DomainTag::Exact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampling_is_seeded_and_round_trips() {
        let shape = RandomSpec::dense(5, vec![Radical::from_int(1), Radical::sqrt(2)], vec![2]);
        let a = shape.sample(&mut ChaCha8Rng::seed_from_u64(3));
        let b = shape.sample(&mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        // 20 + 35 + 56 monomials of degrees 3, 4, 5 in four variables
        assert_eq!(a.terms.len(), 20 + 35 + 56);
        assert_eq!(HamiltonianSpec::parse(&a.to_text()).unwrap(), a);
    }
}
