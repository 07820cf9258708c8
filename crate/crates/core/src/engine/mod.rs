//! Order-by-order construction of the normal form, the generating function
//! and the canonical transformation.

mod invert;
mod linear;
mod log;

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::hamiltonian::{check_nonresonant, small_divisor, HamiltonianSpec, NonResonance, NormalizationMode, SpecError};
use crate::scalar::{Coeff, ConvertCtx, Field, FromExact, ScalarError};
use crate::series::{Composer, Exponent, GradedSeries, HomogeneousPoly, SeriesError};

pub use invert::{invert_generating, phi_residual};
pub use linear::solve_linear;
pub use log::{OrderRecord, RunLog};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("frequencies are resonant: alpha={alpha:?} beta={beta:?}")]
    Resonance { alpha: Vec<u16>, beta: Vec<u16> },
    #[error("zero divisor at degree {degree} for monomial {exponent:?}")]
    ZeroDivisor { degree: u32, exponent: Exponent },
    #[error("quadratic part is not diagonal with the given frequencies")]
    NotDiagonal,
    #[error("the generating function does not start with sum x_k eta_k")]
    NotIdentityGenerator,
    #[error("normalization condition singular at degree {degree}\n{dump}")]
    SingularPhiSystem { degree: u32, dump: String },
    #[error("truncation order {0} is below 2")]
    OrderTooLow(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineOptions {
    pub mode: NormalizationMode,
    /// Walk frequencies and monomials in reverse order. The output must not
    /// depend on it; it exists so tests can check that.
    pub reverse: bool,
}

impl EngineOptions {
    pub fn with_mode(mode: NormalizationMode) -> Self {
        EngineOptions {
            mode,
            reverse: false,
        }
    }
}

/// A homological division `γ = −A_P / λ(P)` with the smallest `|λ(P)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorRecord<F> {
    pub exponent: Exponent,
    pub value: F,
    pub magnitude: f64,
}

/// Everything produced by [`normalize`].
///
/// `phi` and `psi` are the maps `x = φ(ξ, η)`, `y = ψ(ξ, η)`. Their parts of
/// degree `m` need `v_{m+1}`, so they are known through degree `N − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormArtifacts<S: Coeff> {
    pub n: usize,
    pub order: u32,
    pub h: GradedSeries<S>,
    pub lambda: Vec<S::Field>,
    pub k: GradedSeries<S>,
    pub v: GradedSeries<S>,
    pub phi: Vec<GradedSeries<S>>,
    pub psi: Vec<GradedSeries<S>>,
    pub mode: NormalizationMode,
    pub min_divisor: Option<DivisorRecord<S::Field>>,
    pub log: RunLog,
}

impl<S: Coeff> NormalFormArtifacts<S> {
    /// Degree through which `phi` and `psi` are exact.
    pub fn transform_degree(&self) -> u32 {
        self.order - 1
    }

    /// The substitution `(φ₁..φₙ, ψ₁..ψₙ)`.
    pub fn transformation(&self) -> Vec<GradedSeries<S>> {
        self.phi.iter().chain(self.psi.iter()).cloned().collect()
    }

    /// Maps every coefficient, for instance to evaluate a parameter run.
    pub fn map_coeffs<T: Coeff>(
        &self,
        f: impl Fn(&S) -> T,
        g: impl Fn(&S::Field) -> T::Field,
    ) -> NormalFormArtifacts<T> {
        NormalFormArtifacts {
            n: self.n,
            order: self.order,
            h: self.h.map_coeffs(&f),
            lambda: self.lambda.iter().map(&g).collect(),
            k: self.k.map_coeffs(&f),
            v: self.v.map_coeffs(&f),
            phi: self.phi.iter().map(|s| s.map_coeffs(&f)).collect(),
            psi: self.psi.iter().map(|s| s.map_coeffs(&f)).collect(),
            mode: self.mode,
            min_divisor: self.min_divisor.as_ref().map(|d| DivisorRecord {
                exponent: d.exponent.clone(),
                value: g(&d.value),
                magnitude: d.magnitude,
            }),
            log: self.log.clone(),
        }
    }
}

/// `Σ λ_k x_k y_k`.
pub fn quadratic_part<S: Coeff>(n: usize, lambda: &[S::Field]) -> HomogeneousPoly<S> {
    let mut p = HomogeneousPoly::new(2);
    for (k, l) in lambda.iter().enumerate() {
        p.add_term_owned(Exponent::unit(n, k).raise(n + k), S::from_field(l.clone()));
    }
    p
}

pub(crate) fn unit_part<S: Coeff>(n: usize, var: usize) -> HomogeneousPoly<S> {
    let mut p = HomogeneousPoly::new(1);
    p.add_term_owned(Exponent::unit(n, var), S::one());
    p
}

/// Checks non-resonance, converts the spec into the domain `S` and
/// normalizes it with the spec's mode.
pub fn normalize_spec<S>(spec: &HamiltonianSpec, ctx: &ConvertCtx) -> Result<NormalFormArtifacts<S>, EngineError>
where
    S: FromExact,
    S::Field: FromExact,
{
    if let NonResonance::Fail { alpha, beta } = check_nonresonant(&spec.lambda, spec.order) {
        return Err(EngineError::Resonance { alpha, beta });
    }
    let lambda = spec.lambda.convert::<S>(ctx)?;
    let h = spec.hamiltonian::<S>(ctx)?;
    normalize(&h, &lambda, &EngineOptions::with_mode(spec.mode))
}

/// Computes `K`, `v`, `φ`, `ψ` for `H = Σ λ_k x_k y_k + H₃ + … + H_N`, with
/// `N` the truncation order of `h`.
///
/// At each degree `l` the part `A_l` of `H(φ, ψ)` not involving `v_l` is
/// assembled from transformation parts that are already final; every
/// non-resonant monomial of `A_l` is cancelled by `v_l`, and the resonant
/// remainder is `K_l`.
pub fn normalize<S: Coeff>(
    h: &GradedSeries<S>,
    lambda: &[S::Field],
    opts: &EngineOptions,
) -> Result<NormalFormArtifacts<S>, EngineError> {
    let n = h.n();
    let order = h.order();
    if order < 2 {
        return Err(EngineError::OrderTooLow(order));
    }
    if lambda.len() != n {
        return Err(SeriesError::VariableCountMismatch {
            left: n,
            right: lambda.len(),
        }
        .into());
    }
    let h2 = quadratic_part::<S>(n, lambda);
    if h.part_or_empty(2) != h2 || h.min_degree().is_some_and(|d| d < 2) {
        return Err(EngineError::NotDiagonal);
    }
    let higher = h.degree_range(3, order);

    let mut k_series = GradedSeries::zero(n, order);
    k_series.set_part(h2.clone());
    let mut v = GradedSeries::zero(n, order);
    let mut v2 = HomogeneousPoly::new(2);
    for k in 0..n {
        v2.add_term_owned(Exponent::unit(n, k).raise(n + k), S::one());
    }
    v.set_part(v2);

    // phi_parts[k][m] is the degree-m part of φ_k (index 0 unused).
    let mut phi_parts: Vec<Vec<HomogeneousPoly<S>>> =
        (0..n).map(|k| vec![HomogeneousPoly::new(0), unit_part(n, k)]).collect();
    let mut psi_parts: Vec<Vec<HomogeneousPoly<S>>> =
        (0..n).map(|k| vec![HomogeneousPoly::new(0), unit_part(n, n + k)]).collect();

    // Σ_{j≥3} v_{j,η_k} and Σ_{j≥3} v_{j,x_k}, in (x, η).
    let mut dv_eta: Vec<GradedSeries<S>> = vec![GradedSeries::zero(n, order); n];
    let mut dv_x: Vec<GradedSeries<S>> = vec![GradedSeries::zero(n, order); n];

    // x ↦ φ(ξ, η), η ↦ η for the generating function; (x, y) ↦ (φ, ψ) for H.
    let mut v_comp: Composer<S> = Composer::new(n, 2 * n, order);
    let mut h_comp: Composer<S> = Composer::new(n, 2 * n, order);
    for k in 0..n {
        v_comp.push_part(k, unit_part(n, k));
        v_comp.push_part(n + k, unit_part(n, n + k));
        h_comp.push_part(k, unit_part(n, k));
        h_comp.push_part(n + k, unit_part(n, n + k));
    }

    let ks: Vec<usize> = if opts.reverse { (0..n).rev().collect() } else { (0..n).collect() };
    let mut log = RunLog::default();
    let mut min_divisor: Option<DivisorRecord<S::Field>> = None;

    for l in 3..=order {
        let started = Instant::now();

        // Degree l−1 parts of φ and ψ, still without the v_l contribution.
        let mut phi_t: Vec<HomogeneousPoly<S>> = vec![HomogeneousPoly::new(l - 1); n];
        let mut psi_t: Vec<HomogeneousPoly<S>> = vec![HomogeneousPoly::new(l - 1); n];
        for &k in &ks {
            phi_t[k] = dv_eta[k].composed_part(&mut v_comp, l - 1).neg();
            psi_t[k] = dv_x[k].composed_part(&mut v_comp, l - 1);
        }

        // A_l: H₂(φ, ψ) with φ̃, ψ̃ in the top slots, plus H₃..H_l(φ, ψ).
        let mut a = higher.composed_part(&mut h_comp, l);
        for &k in &ks {
            let mut acc = HomogeneousPoly::new(l);
            for m in 1..l {
                let pm = if m == l - 1 { &phi_t[k] } else { &phi_parts[k][m as usize] };
                let qm = if m == 1 { &psi_t[k] } else { &psi_parts[k][(l - m) as usize] };
                acc.add_product(pm, qm);
            }
            a.add_assign(&acc.scale_field(&lambda[k]));
        }

        // Homological equation: λ(P)·γ_P + A_P = 0 off resonance.
        let mut nonres: Vec<(&Exponent, &S)> = a.iter().filter(|(e, _)| !e.is_resonant()).collect();
        if opts.reverse {
            nonres.reverse();
        }
        let solved: Vec<(Exponent, S, S::Field)> = nonres
            .par_iter()
            .map(|(e, c)| {
                let d = small_divisor(lambda, e);
                let inv = d.inv().map_err(|_| EngineError::ZeroDivisor {
                    degree: l,
                    exponent: (*e).clone(),
                })?;
                Ok(((*e).clone(), -c.scale(&inv), d))
            })
            .collect::<Result<_, EngineError>>()?;

        let mut v_l = HomogeneousPoly::new(l);
        let mut order_min: Option<DivisorRecord<S::Field>> = None;
        for (e, gamma, d) in solved {
            let magnitude = d.magnitude();
            let better = order_min
                .as_ref()
                .is_none_or(|m| (magnitude, &e) < (m.magnitude, &m.exponent));
            if better {
                order_min = Some(DivisorRecord {
                    exponent: e.clone(),
                    value: d,
                    magnitude,
                });
            }
            v_l.add_term_owned(e, gamma);
        }
        let divisions = v_l.len();

        let k_l = a.filter(Exponent::is_resonant);

        let resonant = Exponent::resonant_of_degree(n, l);
        if opts.mode == NormalizationMode::Phi && !resonant.is_empty() {
            let mut phi_l = HomogeneousPoly::new(l);
            for &k in &ks {
                phi_l.add_assign(&psi_t[k].mul_variable(k));
                phi_l.sub_assign(&phi_t[k].mul_variable(n + k));
            }
            phi_l.add_assign(&euler_part(n, &v_l));
            let rhs: Vec<S> = resonant.iter().map(|r| -phi_l.coeff(r)).collect();
            let matrix = phi_condition_matrix::<S::Field>(n, &resonant);
            let coeffs = solve_linear(matrix.clone(), rhs).ok_or_else(|| EngineError::SingularPhiSystem {
                degree: l,
                dump: format!("unknowns {resonant:?}\nmatrix {matrix:?}"),
            })?;
            for (r, c) in resonant.iter().zip(coeffs) {
                v_l.add_term_owned(r.clone(), c);
            }
        }

        for &k in &ks {
            let mut phi_new = std::mem::replace(&mut phi_t[k], HomogeneousPoly::new(l - 1));
            phi_new.sub_assign(&v_l.derivative(n + k));
            let mut psi_new = std::mem::replace(&mut psi_t[k], HomogeneousPoly::new(l - 1));
            psi_new.add_assign(&v_l.derivative(k));
            v_comp.push_part(k, phi_new.clone());
            h_comp.push_part(k, phi_new.clone());
            h_comp.push_part(n + k, psi_new.clone());
            phi_parts[k].push(phi_new);
            psi_parts[k].push(psi_new);
            dv_eta[k].add_part(&v_l.derivative(n + k));
            dv_x[k].add_part(&v_l.derivative(k));
        }

        log.records.push(OrderRecord {
            degree: l,
            v_terms: v_l.len(),
            k_terms: k_l.len(),
            divisions,
            resonant_unknowns: if opts.mode == NormalizationMode::Phi { resonant.len() } else { 0 },
            min_divisor: order_min.as_ref().map(|d| d.magnitude),
            elapsed: started.elapsed(),
        });
        if let Some(m) = order_min {
            let better = min_divisor
                .as_ref()
                .is_none_or(|b| (m.magnitude, &m.exponent) < (b.magnitude, &b.exponent));
            if better {
                min_divisor = Some(m);
            }
        }
        v.set_part(v_l);
        k_series.set_part(k_l);
    }
    log.notes.push(format!("mode {}", opts.mode));
    log.notes.push(
        "odd degrees carry no resonant monomials, so both modes agree on v there".to_string(),
    );

    let collect = |parts: Vec<Vec<HomogeneousPoly<S>>>| -> Vec<GradedSeries<S>> {
        parts
            .into_iter()
            .map(|ps| GradedSeries::from_parts(n, order, ps.into_iter().skip(1)))
            .collect()
    };
    let phi = collect(phi_parts);
    let psi = collect(psi_parts);

    Ok(NormalFormArtifacts {
        n,
        order,
        h: h.clone(),
        lambda: lambda.to_vec(),
        k: k_series,
        v,
        phi,
        psi,
        mode: opts.mode,
        min_divisor,
        log,
    })
}

/// `Σ_k (x_k ∂_{x_k} + η_k ∂_{η_k}) p`, the part of `Σ(ξ_k y_k − η_k x_k)`
/// contributed by a generating-function part `p`.
fn euler_part<S: Coeff>(n: usize, p: &HomogeneousPoly<S>) -> HomogeneousPoly<S> {
    let mut out = HomogeneousPoly::new(p.degree());
    for k in 0..n {
        out.add_assign(&p.derivative(k).mul_variable(k));
        out.add_assign(&p.derivative(n + k).mul_variable(n + k));
    }
    out
}

/// Column `j` holds the resonant coefficients of the normalization
/// functional applied to the unknown monomial `resonant[j]`.
fn phi_condition_matrix<F: Field>(n: usize, resonant: &[Exponent]) -> Vec<Vec<F>> {
    let mut m = vec![vec![F::zero(); resonant.len()]; resonant.len()];
    for (j, r) in resonant.iter().enumerate() {
        let mut unit = HomogeneousPoly::new(r.degree());
        unit.add_term_owned(r.clone(), F::one());
        let image = euler_part(n, &unit);
        for (i, ri) in resonant.iter().enumerate() {
            m[i][j] = image.coeff(ri);
        }
    }
    m
}
