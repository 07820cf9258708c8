//! The normalizing coordinates `(ξ, η)` as series in `(x, y)`, the first
//! integrals `P_k = ξ_k η_k` and `F(P₁, …, Pₙ)`, and the split of a series
//! into its resonant and non-resonant parts.
//!
//! Every integral is checked against the original `H` in `(x, y)`, never
//! against `K`, so the bracket check is an end-to-end test of the engine.

mod omega;

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{unit_part, EngineError, NormalFormArtifacts};
use crate::hamiltonian::small_divisor;
use crate::scalar::{Coeff, ConvertCtx, FromExact, ParamPoly, ScalarError};
use crate::series::{Composer, Exponent, GradedSeries, SeriesError};

pub use omega::{OmegaError, OmegaPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegralError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("F has degree {degree} in the actions; truncation order {order} allows at most {max}")]
    DegreeTooHigh { degree: u32, order: u32, max: u32 },
    #[error("F uses {found} symbols but the system has {n} degrees of freedom")]
    SymbolCount { found: usize, n: usize },
}

/// `ξ(x, y)` and `η(x, y)`.
///
/// Their degree-`m` parts use `v_{m+1}`, so with `v` known through the
/// truncation order `N` they are exact through `N − 1`; `order` records that.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseMaps<S: Coeff> {
    pub n: usize,
    /// Truncation order of the run that produced them.
    pub run_order: u32,
    pub xi: Vec<GradedSeries<S>>,
    pub eta: Vec<GradedSeries<S>>,
}

impl<S: Coeff> InverseMaps<S> {
    /// Degree through which `xi` and `eta` are exact.
    pub fn order(&self) -> u32 {
        self.run_order - 1
    }

    pub fn substitution(&self) -> Vec<GradedSeries<S>> {
        self.xi.iter().chain(self.eta.iter()).cloned().collect()
    }
}

/// A series `P(x, y)` meant to Poisson-commute with `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegral<S: Coeff> {
    pub p: GradedSeries<S>,
    /// The action polynomial it was built from, as `F(w1, …, wn)`.
    pub origin: String,
}

impl<S: Coeff> FirstIntegral<S> {
    /// `{P, H}` through degree `N − 1`, the highest degree at which both
    /// inputs (exact through `N`) determine the bracket.
    pub fn bracket_residual(&self, h: &GradedSeries<S>) -> Result<GradedSeries<S>, SeriesError> {
        let through = self.p.order().min(h.order()) - 1;
        self.p.poisson_bracket(h, through)
    }
}

/// Solves `η_k = y_k − Σ_{l≥3} v_{l,x_k}(x, η)` degree by degree, then sets
/// `ξ_k = x_k + Σ_{l≥3} v_{l,η_k}(x, η(x, y))`.
pub fn inverse_maps<S: Coeff>(art: &NormalFormArtifacts<S>) -> InverseMaps<S> {
    inverse_of_generating(&art.v, art.order)
}

/// [`inverse_maps`] for a bare generating function `v = Σ x_k η_k + …`
/// known through degree `run_order`.
pub fn inverse_of_generating<S: Coeff>(v: &GradedSeries<S>, run_order: u32) -> InverseMaps<S> {
    let n = v.n();
    let order = run_order - 1;
    let higher = v.degree_range(3, run_order);
    let dv_x: Vec<GradedSeries<S>> = (0..n).map(|k| higher.derivative(k)).collect();
    let dv_eta: Vec<GradedSeries<S>> = (0..n).map(|k| higher.derivative(n + k)).collect();

    // (x, η) ↦ (x, η(x, y)); the η components grow as they are solved.
    let mut comp: Composer<S> = Composer::new(n, 2 * n, order);
    for k in 0..n {
        comp.push_part(k, unit_part(n, k));
        comp.push_part(n + k, unit_part(n, n + k));
    }
    let mut eta: Vec<GradedSeries<S>> = (0..n).map(|k| GradedSeries::variable(n, n + k, order)).collect();
    for m in 2..=order {
        let parts: Vec<_> = (0..n).map(|k| dv_x[k].composed_part(&mut comp, m).neg()).collect();
        for (k, p) in parts.into_iter().enumerate() {
            comp.push_part(n + k, p.clone());
            eta[k].set_part(p);
        }
    }
    let mut xi: Vec<GradedSeries<S>> = (0..n).map(|k| GradedSeries::variable(n, k, order)).collect();
    for m in 2..=order {
        for k in 0..n {
            xi[k].set_part(dv_eta[k].composed_part(&mut comp, m));
        }
    }
    InverseMaps {
        n,
        run_order,
        xi,
        eta,
    }
}

/// `P_k = ξ_k η_k`, truncated at the run order `N`.
///
/// The degree-`N` part only needs `ξ` and `η` through degree `N − 1`, so the
/// products are exact through `N`.
pub fn first_integrals<S: Coeff>(inv: &InverseMaps<S>) -> Vec<FirstIntegral<S>> {
    (0..inv.n)
        .into_par_iter()
        .map(|k| FirstIntegral {
            p: inv.xi[k]
                .mul_truncated(&inv.eta[k], inv.run_order)
                .expect("components share their arity"),
            origin: format!("w{}", k + 1),
        })
        .collect()
}

/// `F(P₁, …, Pₙ)` truncated at the run order. Each `P_k` starts in degree
/// two, so `F` may have degree at most `N / 2` in the actions.
pub fn universal_integral<S>(
    f: &OmegaPoly,
    integrals: &[FirstIntegral<S>],
    ctx: &ConvertCtx,
) -> Result<FirstIntegral<S>, IntegralError>
where
    S: FromExact,
{
    let n = integrals.len();
    if f.n() != n {
        return Err(IntegralError::SymbolCount { found: f.n(), n });
    }
    let order = integrals.first().map_or(2, |p| p.p.order());
    let max = order / 2;
    if f.degree() > max {
        return Err(IntegralError::DegreeTooHigh {
            degree: f.degree(),
            order,
            max,
        });
    }
    // powers[k][j] = P_k^j
    let mut powers: Vec<Vec<GradedSeries<S>>> = integrals
        .iter()
        .map(|p| vec![GradedSeries::constant(p.p.n(), order, S::one())])
        .collect();
    let mut out = GradedSeries::zero(integrals.first().map_or(0, |p| p.p.n()), order);
    for (e, c) in f.terms() {
        let c = S::from_exact(&ParamPoly::constant(c.clone()), ctx)?;
        let mut term = GradedSeries::constant(out.n(), order, c);
        for (k, &pw) in e.iter().enumerate() {
            while powers[k].len() <= pw as usize {
                let next = powers[k]
                    .last()
                    .expect("starts with P^0")
                    .mul_truncated(&integrals[k].p, order)?;
                powers[k].push(next);
            }
            term = term.mul_truncated(&powers[k][pw as usize], order)?;
        }
        out = out.add(&term)?;
    }
    Ok(FirstIntegral {
        p: out,
        origin: f.to_string(),
    })
}

/// Splits `q` into its resonant part `T` (α = β) and the rest `J`.
pub fn decompose_resonant<S: Coeff>(q: &GradedSeries<S>) -> (GradedSeries<S>, GradedSeries<S>) {
    (q.resonant_part(), q.nonresonant_part())
}

/// The lowest non-resonant monomial of a pulled-back integral together with
/// its divisor `Σ λ_k (α_k − β_k)`.
///
/// If `{Q, H} = 0` then the lowest-degree part `J_d` of `J` satisfies
/// `{J_d, K₂} = 0`, which multiplies each of its coefficients by that
/// divisor. A nonzero divisor therefore forces `J_d = 0`; a surviving
/// monomial points at an integral that is not one, or at an engine bug.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadingJ<S: Coeff> {
    pub exponent: Exponent,
    pub coefficient: S,
    pub divisor: S::Field,
}

/// Result of pulling a candidate integral back to `(ξ, η)` and splitting it.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonantSplit<S: Coeff> {
    pub t: GradedSeries<S>,
    pub j: GradedSeries<S>,
    pub leading: Option<LeadingJ<S>>,
}

/// Pulls `q(x, y)` back through `(φ, ψ)` to `(ξ, η)` and splits the result.
///
/// For `q` exact through the run order `N`, the pullback is exact through
/// `N` as well: its degree-`m` part uses `φ`, `ψ` only through degree
/// `m − 1`.
pub fn pull_back_and_split<S: Coeff>(
    q: &GradedSeries<S>,
    art: &NormalFormArtifacts<S>,
) -> Result<ResonantSplit<S>, SeriesError> {
    let order = q.order().min(art.order);
    let pulled = q.compose_truncated(&art.transformation(), order)?;
    let (t, j) = decompose_resonant(&pulled);
    let leading = j.terms().next().map(|(e, c)| LeadingJ {
        exponent: e.clone(),
        coefficient: c.clone(),
        divisor: small_divisor(&art.lambda, e),
    });
    Ok(ResonantSplit { t, j, leading })
}

/// Largest coefficient magnitude of each homogeneous part, for every degree
/// from the lowest stored one through `through` (empty degrees report 0).
pub fn residual_by_degree<S: Coeff>(s: &GradedSeries<S>, through: u32) -> Vec<(u32, f64)> {
    (0..=through)
        .map(|d| {
            let m = s
                .part(d)
                .map_or(0.0, |p| p.iter().map(|(_, c)| c.magnitude()).fold(0.0, f64::max));
            (d, m)
        })
        .collect()
}

/// `{P_j, P_k}` for all `j < k`, each through degree `N − 1`.
pub fn involution_residuals<S: Coeff>(
    integrals: &[FirstIntegral<S>],
) -> Result<Vec<((usize, usize), GradedSeries<S>)>, SeriesError> {
    let mut pairs = Vec::new();
    for j in 0..integrals.len() {
        for k in j + 1..integrals.len() {
            pairs.push((j, k));
        }
    }
    pairs
        .into_par_iter()
        .map(|(j, k)| {
            let (a, b) = (&integrals[j].p, &integrals[k].p);
            let through = a.order().min(b.order()) - 1;
            Ok(((j, k), a.poisson_bracket(b, through)?))
        })
        .collect()
}

#[cfg(test)]
mod tests;
