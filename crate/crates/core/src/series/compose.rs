use std::collections::HashMap;


use super::{Exponent, GradedSeries, HomogeneousPoly};
use crate::scalar::Coeff;

/// Memoized homogeneous parts of monomials in substituted series.
///
/// For a substitution `z_i ↦ s_i` (each `s_i` without constant part) this
/// caches the degree-`m` part of `s^e` for every monomial `e` requested so
/// far. The part of `s^e` at degree `m` depends only on the parts of the
/// `s_i` up to degree `m − |e| + 1`, so the components may keep growing
/// (as they do during normalization) as long as callers only ask for parts
/// whose inputs are final.
pub struct Composer<S> {
    n: usize,
    components: Vec<Vec<HomogeneousPoly<S>>>,
    cache: HashMap<Exponent, Vec<HomogeneousPoly<S>>>,
    zeros: Vec<HomogeneousPoly<S>>,
    one: HomogeneousPoly<S>,
}

impl<S: Coeff> Composer<S> {
    /// A composer over `nvars` input variables producing series in `2n`
    /// variables, able to answer parts up to degree `max_degree`.
    pub fn new(n: usize, nvars: usize, max_degree: u32) -> Self {
        let mut one = HomogeneousPoly::new(0);
        one.add_term(Exponent::zero(n), &S::one());
        Composer {
            n,
            components: vec![vec![HomogeneousPoly::new(0)]; nvars],
            cache: HashMap::new(),
            zeros: (0..=max_degree).map(HomogeneousPoly::new).collect(),
            one,
        }
    }

    pub fn from_series(n: usize, subs: &[GradedSeries<S>], order: u32) -> Self {
        let mut c = Self::new(n, subs.len(), order);
        for (i, s) in subs.iter().enumerate() {
            for d in 1..=order {
                c.push_part(i, s.part_or_empty(d));
            }
        }
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Highest degree currently stored for component `var`.
    pub fn known_degree(&self, var: usize) -> u32 {
        (self.components[var].len() - 1) as u32
    }

    /// Appends the next homogeneous part of component `var`.
    pub fn push_part(&mut self, var: usize, part: HomogeneousPoly<S>) {
        let expected = self.components[var].len() as u32;
        assert_eq!(part.degree(), expected, "component parts must be pushed in degree order");
        self.components[var].push(part);
    }

    pub fn component_part(&self, var: usize, degree: u32) -> &HomogeneousPoly<S> {
        self.components[var]
            .get(degree as usize)
            .unwrap_or(&self.zeros[degree as usize])
    }

    /// Degree-`m` part of `s^e`.
    pub fn part(&mut self, e: &Exponent, m: u32) -> &HomogeneousPoly<S> {
        self.ensure(e, m);
        self.part_ref(e, m)
    }

    fn part_ref(&self, e: &Exponent, m: u32) -> &HomogeneousPoly<S> {
        let d = e.degree();
        match d {
            0 if m == 0 => &self.one,
            0 => &self.zeros[m as usize],
            1 => self.component_part(e.first_nonzero().expect("degree one"), m),
            _ if m < d => &self.zeros[m as usize],
            _ => &self.cache[e][(m - d) as usize],
        }
    }

    fn ensure(&mut self, e: &Exponent, m: u32) {
        let d = e.degree();
        if d <= 1 || m < d {
            return;
        }
        let have = self.cache.get(e).map_or(0, Vec::len) as u32;
        if d + have > m {
            return;
        }
        let var = e.first_nonzero().expect("nonzero exponent");
        let rest = e.lower(var).expect("variable present");
        self.ensure(&rest, m - 1);
        for mm in (d + have)..=m {
            let mut acc = HomogeneousPoly::new(mm);
            for j in 1..=(mm + 1 - d) {
                let comp = self.component_part(var, j);
                if comp.is_empty() {
                    continue;
                }
                acc.add_product(comp, self.part_ref(&rest, mm - j));
            }
            self.cache.entry(e.clone()).or_default().push(acc);
        }
    }
}

impl<S: Coeff> GradedSeries<S> {
    /// Degree-`m` part of this series composed through `composer`.
    pub fn composed_part(&self, composer: &mut Composer<S>, m: u32) -> HomogeneousPoly<S> {
        let mut out = HomogeneousPoly::new(m);
        for (e, c) in self.terms() {
            if e.degree() > m {
                break;
            }
            let part = composer.part(e, m);
            out.add_scaled(part, c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn cached_powers_match_repeated_multiplication() {
        let q = |v: i64| Rational::from_integer(v.into());
        // s = (x + 2x²y, y − x²) in one degree of freedom
        let sx = GradedSeries::from_terms(
            1,
            8,
            [
                (Exponent::new(&[1], &[0]), q(1)),
                (Exponent::new(&[2], &[1]), q(2)),
            ],
        )
        .unwrap();
        let sy = GradedSeries::from_terms(
            1,
            8,
            [
                (Exponent::new(&[0], &[1]), q(1)),
                (Exponent::new(&[2], &[0]), q(-1)),
            ],
        )
        .unwrap();
        let mut comp = Composer::from_series(1, &[sx.clone(), sy.clone()], 8);
        let e = Exponent::new(&[2], &[2]);
        let direct = sx
            .mul_truncated(&sx, 8)
            .unwrap()
            .mul_truncated(&sy, 8)
            .unwrap()
            .mul_truncated(&sy, 8)
            .unwrap();
        for m in 0..=8 {
            assert_eq!(*comp.part(&e, m), direct.part_or_empty(m), "degree {m}");
        }
    }
}
