use super::{unit_part, EngineError, NormalFormArtifacts};
use crate::scalar::Coeff;
use crate::series::{Composer, Exponent, GradedSeries, HomogeneousPoly};

/// Solves `ξ = v_η(x, η)`, `y = v_x(x, η)` for `x = φ(ξ, η)`, `y = ψ(ξ, η)`
/// through degree `order`, treating `v` as exact (no parts beyond its
/// stored ones).
///
/// Each round of the fixed-point iteration `x_k = ξ_k − Σ_{j≥3} v_{j,η_k}(x, η)`
/// fixes one more homogeneous degree, so the rounds are run degree by degree.
pub fn invert_generating<S: Coeff>(
    v: &GradedSeries<S>,
    order: u32,
) -> Result<(Vec<GradedSeries<S>>, Vec<GradedSeries<S>>), EngineError> {
    let n = v.n();
    let mut v2 = HomogeneousPoly::new(2);
    for k in 0..n {
        v2.add_term_owned(Exponent::unit(n, k).raise(n + k), S::one());
    }
    if v.part_or_empty(2) != v2 || v.min_degree().is_some_and(|d| d < 2) {
        return Err(EngineError::NotIdentityGenerator);
    }
    let higher = v.degree_range(3, v.order());
    let dv_eta: Vec<GradedSeries<S>> = (0..n).map(|k| higher.derivative(n + k)).collect();
    let dv_x: Vec<GradedSeries<S>> = (0..n).map(|k| higher.derivative(k)).collect();

    let mut comp: Composer<S> = Composer::new(n, 2 * n, order);
    let mut phi: Vec<GradedSeries<S>> = (0..n).map(|k| GradedSeries::variable(n, k, order)).collect();
    let mut psi: Vec<GradedSeries<S>> = (0..n).map(|k| GradedSeries::variable(n, n + k, order)).collect();
    for k in 0..n {
        comp.push_part(k, unit_part(n, k));
        comp.push_part(n + k, unit_part(n, n + k));
    }
    for m in 2..=order {
        let parts: Vec<HomogeneousPoly<S>> = (0..n).map(|k| dv_eta[k].composed_part(&mut comp, m).neg()).collect();
        for k in 0..n {
            psi[k].set_part(dv_x[k].composed_part(&mut comp, m));
        }
        for (k, p) in parts.into_iter().enumerate() {
            comp.push_part(k, p.clone());
            phi[k].set_part(p);
        }
    }
    Ok((phi, psi))
}

/// Resonant monomials of `Φ = Σ (ξ_k ψ_k − η_k φ_k)` through the truncation
/// order.
pub fn phi_residual<S: Coeff>(art: &NormalFormArtifacts<S>) -> GradedSeries<S> {
    let n = art.n;
    let mut out = GradedSeries::zero(n, art.order);
    for k in 0..n {
        for p in art.psi[k].parts() {
            out.add_part(&p.mul_variable(k));
        }
        for p in art.phi[k].parts() {
            out.add_part(&p.mul_variable(n + k).neg());
        }
    }
    out.resonant_part()
}
