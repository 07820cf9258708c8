use std::fmt;

use num_traits::Zero;

use super::FrequencyVector;
use crate::scalar::{BigFloat, Coeff, ComplexFloat, ConvertCtx, Field, FromExact, ParamPoly, Radical};
use crate::series::Exponent;

/// Default zero tolerance `2^-128` for frequencies entered as decimals.
pub const NUMERIC_TOLERANCE_BITS: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonResonance {
    /// No integer relation up to the order. `certified` is false when some
    /// frequency was entered as a decimal and the check used a tolerance.
    Pass { certified: bool },
    /// Lexicographically first `(α, β)` with `Σ λ_k(α_k − β_k) = 0`.
    Fail { alpha: Vec<u16>, beta: Vec<u16> },
}

impl NonResonance {
    pub fn passed(&self) -> bool {
        matches!(self, NonResonance::Pass { .. })
    }
}

impl fmt::Display for NonResonance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonResonance::Pass { certified: true } => f.write_str("PASS"),
            NonResonance::Pass { certified: false } => f.write_str("PASS (numeric non-resonance only)"),
            NonResonance::Fail { alpha, beta } => {
                write!(f, "FAIL: resonance witness alpha={alpha:?} beta={beta:?}")
            }
        }
    }
}

/// `Σ λ_k (α_k − β_k)` for the monomial `e`.
pub fn small_divisor<F: Field>(lambda: &[F], e: &Exponent) -> F {
    let mut acc = F::zero();
    for (k, m) in e.difference().iter().enumerate() {
        if *m != 0 {
            acc += &lambda[k].scale(&F::from_int(*m as i64));
        }
    }
    acc
}

/// Exhaustive check over integer vectors `m` with `0 < |m|₁ ≤ order`.
pub fn check_nonresonant(lambda: &FrequencyVector, order: u32) -> NonResonance {
    check_nonresonant_with(lambda, order, NUMERIC_TOLERANCE_BITS)
}

/// As [`check_nonresonant`], with tolerance `2^-tol_bits` for decimal input.
pub fn check_nonresonant_with(lambda: &FrequencyVector, order: u32, tol_bits: u32) -> NonResonance {
    let values = lambda.exact_values();
    let approximate = lambda.is_approximate();
    let n = values.len();
    let precision = 2 * tol_bits as usize + 64;
    let tol2 = BigFloat::pow2(-2 * tol_bits as isize, precision);
    let vanishes = |m: &[i64]| -> bool {
        let mut s = Radical::zero();
        for (l, &mk) in values.iter().zip(m) {
            if mk != 0 {
                s += &l.scale(&Radical::from_int(mk));
            }
        }
        if !approximate {
            return s.is_zero();
        }
        let ctx = ConvertCtx { precision };
        let z = ComplexFloat::from_exact(&ParamPoly::constant(s), &ctx).expect("constant value");
        z.norm_sqr() < tol2
    };

    let mut best: Option<(Vec<u16>, Vec<u16>)> = None;
    let mut m = vec![0i64; n];
    enumerate(&mut m, 0, order as i64, &mut |m| {
        if m.iter().all(|x| *x == 0) || !vanishes(m) {
            return;
        }
        let alpha: Vec<u16> = m.iter().map(|x| (*x).max(0) as u16).collect();
        let beta: Vec<u16> = m.iter().map(|x| (-*x).max(0) as u16).collect();
        let better = match &best {
            None => true,
            Some((a, b)) => (&alpha, &beta) < (a, b),
        };
        if better {
            best = Some((alpha, beta));
        }
    });
    match best {
        Some((alpha, beta)) => NonResonance::Fail { alpha, beta },
        None => NonResonance::Pass {
            certified: !approximate,
        },
    }
}

fn enumerate(m: &mut [i64], k: usize, budget: i64, visit: &mut impl FnMut(&[i64])) {
    if k == m.len() {
        visit(m);
        return;
    }
    for v in -budget..=budget {
        m[k] = v;
        enumerate(m, k + 1, budget - v.abs(), visit);
    }
    m[k] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HamiltonianSpec;
    use crate::scalar::Rational;

    fn lambda(text: &str) -> FrequencyVector {
        HamiltonianSpec::parse(text).unwrap().lambda
    }

    #[test]
    fn one_three_resonance_witness() {
        let l = lambda("n = 2\norder = 4\nlambda 1 = 1\nlambda 2 = 3\n");
        assert_eq!(
            check_nonresonant(&l, 4),
            NonResonance::Fail {
                alpha: vec![0, 1],
                beta: vec![3, 0]
            }
        );
        assert!(check_nonresonant(&l, 3).passed());
    }

    #[test]
    fn irrational_ratio_passes() {
        let l = lambda("n = 2\norder = 12\nradicals = 2\nlambda 1 = 1\nlambda 2 = sqrt(2)\n");
        assert_eq!(check_nonresonant(&l, 12), NonResonance::Pass { certified: true });
    }

    #[test]
    fn one_degree_of_freedom_always_passes() {
        let l = lambda("n = 1\norder = 30\nlambda 1 = 1\n");
        assert!(check_nonresonant(&l, 30).passed());
    }

    #[test]
    fn decimal_frequencies_are_flagged() {
        let l = lambda("n = 2\norder = 6\ndomain = float256\nlambda 1 = 1\nlambda 2 = 1.4142135623730951\n");
        assert_eq!(check_nonresonant(&l, 6), NonResonance::Pass { certified: false });
        let l = lambda("n = 2\norder = 6\ndomain = float256\nlambda 1 = 1\nlambda 2 = 0.5\n");
        assert!(!check_nonresonant(&l, 6).passed());
    }

    #[test]
    fn divisor_examples() {
        let l = vec![Radical::from_int(1), Radical::sqrt(2)];
        let e = Exponent::new(&[1, 0], &[0, 1]);
        assert_eq!(small_divisor(&l, &e), Radical::from_int(1) - Radical::sqrt(2));
        assert!(small_divisor(&l, &Exponent::new(&[2, 1], &[2, 1])).is_zero());
        let q = vec![Rational::new(2.into(), 3.into())];
        assert_eq!(
            small_divisor(&q, &Exponent::new(&[3], &[1])),
            Rational::new(4.into(), 3.into())
        );
    }

    #[test]
    fn pass_implies_nonzero_divisors() {
        let l = lambda("n = 2\norder = 8\nradicals = 2\nlambda 1 = 1\nlambda 2 = 1 + sqrt(2)\n");
        assert!(check_nonresonant(&l, 8).passed());
        let vals = l.exact_values();
        for d in 1..=8 {
            for e in Exponent::all_of_degree(2, d) {
                assert_eq!(small_divisor(&vals, &e).is_zero(), e.is_resonant(), "{e:?}");
            }
        }
    }
}
