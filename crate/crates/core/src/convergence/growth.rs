use std::fmt::Write as _;

use super::ConvergenceError;
use crate::engine::{normalize_spec, NormalFormArtifacts};
use crate::hamiltonian::{DomainTag, HamiltonianSpec};
use crate::scalar::{Coeff, ComplexFloat, ConvertCtx, Radical};
use crate::series::GradedSeries;

/// Smallest truncation order for which a tail fit is attempted.
pub const MIN_GROWTH_ORDER: u32 = 6;

/// Least-squares fit of `log r_l ≈ a + b l` over a window of degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub lo: u32,
    pub hi: u32,
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; `None` with only two points.
    pub slope_stderr: Option<f64>,
}

impl TailFit {
    /// `1 / lim r_l^{1/l} ≈ e^{−b}`.
    pub fn radius(&self) -> f64 {
        (-self.slope).exp()
    }
}

/// Coefficient growth of a normal form `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub order: u32,
    /// `(l, r_l)` with `r_l = max_{|i| = l} |K_i|`, for `l = 3..=N`.
    pub r: Vec<(u32, f64)>,
    /// `None` when the window holds no nonzero `r_l`: the radius is `+∞`.
    pub fit: Option<TailFit>,
    pub min_divisor: Option<f64>,
    /// Growth rate `ρ₀` of the probe `q_l = r_l ρ₀^{−l}`.
    pub rho0: f64,
    pub probe: Vec<(u32, f64)>,
}

impl GrowthReport {
    /// `+∞` when no growth is visible in the window.
    pub fn radius_estimate(&self) -> f64 {
        self.fit.map_or(f64::INFINITY, |f| f.radius())
    }

    /// Largest probe value over the fit window (or over the upper half of
    /// the degrees when there is no fit).
    pub fn probe_tail(&self) -> f64 {
        let (lo, _) = self.window();
        self.probe
            .iter()
            .filter(|(l, _)| *l >= lo)
            .map(|(_, q)| *q)
            .fold(0.0, f64::max)
    }

    /// Degrees the radius was fitted on; the default upper half when no fit
    /// was possible.
    pub fn window(&self) -> (u32, u32) {
        self.fit.map_or_else(|| upper_half(self.order), |f| (f.lo, f.hi))
    }

    /// CSV `l,r_l,log_r_l`, with `-inf` for vanishing degrees.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,r_l,log_r_l\n");
        for (l, r) in &self.r {
            let _ = writeln!(out, "{l},{},{}", fmt_float(*r), fmt_float(r.ln()));
        }
        out
    }
}

pub(crate) fn fmt_float(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.17e}")
    }
}

/// `⌈(N + 3) / 2⌉ ..= N`: the upper half of the degrees `3..=N`.
fn upper_half(order: u32) -> (u32, u32) {
    ((order + 4) / 2, order)
}

/// `r_l = max_{|i| = l} |K_i|` for every degree `3..=N`.
pub fn max_coefficients<S: Coeff>(k: &GradedSeries<S>) -> Vec<(u32, f64)> {
    (3..=k.order())
        .map(|l| {
            let r = k
                .part(l)
                .map_or(0.0, |p| p.iter().map(|(_, c)| c.magnitude()).fold(0.0, f64::max));
            (l, r)
        })
        .collect()
}

/// Fits `log r_l` over the upper half of the degrees. Vanishing degrees
/// (odd ones, for a normal form) are skipped; when the window holds a
/// single nonzero degree it is widened downwards until it holds two.
pub fn tail_fit(r: &[(u32, f64)], order: u32) -> Option<TailFit> {
    let (mut lo, hi) = upper_half(order);
    let nonzero = |lo: u32| -> Vec<(f64, f64)> {
        r.iter()
            .filter(|(l, v)| *l >= lo && *l <= hi && *v > 0.0)
            .map(|(l, v)| (f64::from(*l), v.ln()))
            .collect()
    };
    let mut pts = nonzero(lo);
    if pts.is_empty() {
        return None;
    }
    while pts.len() < 2 && lo > 3 {
        lo -= 1;
        pts = nonzero(lo);
    }
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if pts.len() > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        Some((rss / (m - 2.0) / sxx).sqrt())
    } else {
        None
    };
    Some(TailFit {
        lo,
        hi,
        points: pts.len(),
        slope,
        intercept,
        slope_stderr,
    })
}

/// Growth of `K` from a finished run. `rho0` is the growth rate of the
/// probe `q_l = r_l ρ₀^{−l}`, bounded exactly when `|K_i| ≤ C ρ₀^{|i|}`.
pub fn growth<S: Coeff>(art: &NormalFormArtifacts<S>, rho0: f64) -> Result<GrowthReport, ConvergenceError> {
    growth_of(&art.k, art.min_divisor.as_ref().map(|d| d.magnitude), rho0)
}

/// Normalizes `spec` and measures its growth: exactly for exact specs,
/// in complex floats at the spec's precision otherwise.
pub fn growth_of_spec(spec: &HamiltonianSpec, rho0: f64, ctx: &ConvertCtx) -> Result<GrowthReport, ConvergenceError> {
    if spec.order < MIN_GROWTH_ORDER {
        return Err(ConvergenceError::OrderTooLow(spec.order));
    }
    match spec.domain {
        DomainTag::Param => Err(ConvergenceError::Parametric),
        DomainTag::Exact => growth(&normalize_spec::<Radical>(spec, ctx)?, rho0),
        DomainTag::Float(bits) => {
            let ctx = ConvertCtx { precision: bits };
            growth(&normalize_spec::<ComplexFloat>(spec, &ctx)?, rho0)
        }
    }
}

pub fn growth_of<S: Coeff>(
    k: &GradedSeries<S>,
    min_divisor: Option<f64>,
    rho0: f64,
) -> Result<GrowthReport, ConvergenceError> {
    let order = k.order();
    if order < MIN_GROWTH_ORDER {
        return Err(ConvergenceError::OrderTooLow(order));
    }
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(ConvergenceError::BadRho(rho0));
    }
    let r = max_coefficients(k);
    let fit = tail_fit(&r, order);
    let probe = r
        .iter()
        .map(|&(l, v)| (l, v * rho0.powi(-(l as i32))))
        .collect();
    Ok(GrowthReport {
        order,
        r,
        fit,
        min_divisor,
        rho0,
        probe,
    })
}
