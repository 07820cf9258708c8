//! Univariate polynomials in the family parameter `t`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::{
    split_top_level_plus, Coeff, ConvertCtx, DumpCoeff, Field, FromExact, Radical, Rational,
    ScalarError,
};

/// A polynomial `c₀ + c₁t + … + c_d t^d` with coefficients in a field.
///
/// Stored densely with no trailing zero coefficient, so the zero polynomial
/// has an empty coefficient list and degree `None` (−∞).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParamPoly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> ParamPoly<F> {
    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ParamPoly { coeffs }
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The parameter `t` itself.
    pub fn t() -> Self {
        Self::from_coeffs(vec![F::zero(), F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    /// Exact degree in `t`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn as_constant(&self) -> Option<F> {
        match self.coeffs.len() {
            0 => Some(F::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Substitutes `t = t0`.
    pub fn eval(&self, t0: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc *= t0;
            acc += c;
        }
        acc
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> ParamPoly<G> {
        ParamPoly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// The unique polynomial of degree `< points.len()` through the given
    /// nodes, by Newton divided differences. Nodes must be distinct.
    pub fn interpolate(points: &[(F, F)]) -> Result<Self, ScalarError> {
        let m = points.len();
        let mut table: Vec<F> = points.iter().map(|(_, y)| y.clone()).collect();
        for level in 1..m {
            for i in (level..m).rev() {
                let dx = {
                    let mut d = points[i].0.clone();
                    d -= &points[i - level].0;
                    d
                };
                let mut dy = table[i].clone();
                dy -= &table[i - 1];
                table[i] = dy.checked_div(&dx)?;
            }
        }
        // Horner over the Newton basis.
        let mut acc = ParamPoly::zero();
        for i in (0..m).rev() {
            let mut shift = ParamPoly::t();
            shift -= &ParamPoly::constant(points[i].0.clone());
            acc = acc * shift;
            acc += &ParamPoly::constant(table[i].clone());
        }
        Ok(acc)
    }

    fn add_impl(&mut self, rhs: &Self, negate: bool) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), F::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if negate {
                *a -= b;
            } else {
                *a += b;
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &a.mul_ref(b);
            }
        }
        Self::from_coeffs(out)
    }
}

impl<F: Field + DumpCoeff> fmt::Debug for ParamPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dump_string())
    }
}

impl<F: Field> Add for ParamPoly<F> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.add_impl(&rhs, false);
        self
    }
}

impl<F: Field> Sub for ParamPoly<F> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.add_impl(&rhs, true);
        self
    }
}

impl<F: Field> Mul for ParamPoly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_impl(&rhs)
    }
}

impl<F: Field> Neg for ParamPoly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        ParamPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<F: Field> AddAssign<&ParamPoly<F>> for ParamPoly<F> {
    fn add_assign(&mut self, rhs: &ParamPoly<F>) {
        self.add_impl(rhs, false);
    }
}

impl<F: Field> SubAssign<&ParamPoly<F>> for ParamPoly<F> {
    fn sub_assign(&mut self, rhs: &ParamPoly<F>) {
        self.add_impl(rhs, true);
    }
}

impl<F: Field> MulAssign<&ParamPoly<F>> for ParamPoly<F> {
    fn mul_assign(&mut self, rhs: &ParamPoly<F>) {
        *self = self.mul_impl(rhs);
    }
}

impl<F: Field> Zero for ParamPoly<F> {
    fn zero() -> Self {
        ParamPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<F: Field> One for ParamPoly<F> {
    fn one() -> Self {
        Self::constant(F::one())
    }
}

impl<F: Field + DumpCoeff> Coeff for ParamPoly<F> {
    type Field = F;

    fn from_field(c: F) -> Self {
        Self::constant(c)
    }

    fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ParamPoly {
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    fn domain_name() -> &'static str {
        "param"
    }
}

impl FromExact for ParamPoly<Radical> {
    fn from_exact(value: &ParamPoly<Radical>, _ctx: &ConvertCtx) -> Result<Self, ScalarError> {
        Ok(value.clone())
    }

    fn is_exact() -> bool {
        true
    }
}

impl FromExact for ParamPoly<Rational> {
    fn from_exact(value: &ParamPoly<Radical>, _ctx: &ConvertCtx) -> Result<Self, ScalarError> {
        let coeffs = value
            .coeffs()
            .iter()
            .map(|c| {
                c.as_rational().ok_or_else(|| ScalarError::NotRepresentable {
                    domain: "param",
                    reason: format!("coefficient {c} involves square roots"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParamPoly::from_coeffs(coeffs))
    }

    fn is_exact() -> bool {
        true
    }
}

impl<F: Field + DumpCoeff> DumpCoeff for ParamPoly<F> {
    fn write_coeff(&self, out: &mut String) {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                out.push_str(" + ");
            }
            first = false;
            out.push('(');
            c.write_coeff(out);
            out.push(')');
            match k {
                0 => {}
                1 => out.push('t'),
                _ => out.push_str(&format!("t^{k}")),
            }
        }
        if first {
            out.push_str("(0/1)");
        }
    }

    fn parse_coeff(text: &str) -> Result<Self, ScalarError> {
        let err = || ScalarError::Parse(text.to_string());
        let mut coeffs: Vec<F> = Vec::new();
        for part in split_top_level_plus(text) {
            let inner_end = part.rfind(')').ok_or_else(err)?;
            let inner = part.strip_prefix('(').ok_or_else(err)?;
            let inner = &inner[..inner_end - 1];
            let power = match &part[inner_end + 1..] {
                "" => 0,
                "t" => 1,
                rest => rest
                    .strip_prefix("t^")
                    .and_then(|p| p.parse::<usize>().ok())
                    .ok_or_else(err)?,
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, F::zero());
            }
            coeffs[power] += &F::parse_coeff(inner)?;
        }
        Ok(Self::from_coeffs(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn degree_tracks_leading_term() {
        let p = ParamPoly::from_coeffs(vec![q(0), q(1), q(3)]);
        assert_eq!(p.degree(), Some(2));
        let z = p.clone() - p;
        assert_eq!(z.degree(), None);
        assert!(z.is_zero());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = ParamPoly::from_coeffs(vec![q(2), q(-1), q(0), q(5)]);
        let pts: Vec<_> = (0..5).map(|x| (q(x), p.eval(&q(x)))).collect();
        assert_eq!(ParamPoly::interpolate(&pts).unwrap(), p);
        let dup = vec![(q(1), q(1)), (q(1), q(2))];
        assert!(ParamPoly::interpolate(&dup).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let p = ParamPoly::from_coeffs(vec![
            Radical::sqrt(2),
            Radical::zero(),
            Radical::from_int(3) + Radical::sqrt(3),
        ]);
        let text = p.to_dump_string();
        assert_eq!(text, "(1/1*sqrt(2)) + (3/1 + 1/1*sqrt(3))t^2");
        assert_eq!(ParamPoly::<Radical>::parse_coeff(&text).unwrap(), p);
    }
}
