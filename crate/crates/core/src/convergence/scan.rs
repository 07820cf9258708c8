//! Parameter scans over a pencil and the Bernstein extrapolation of the
//! normal-form coefficients off the scanned set.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use super::bernstein::sup_norm_by;
use super::growth::{fmt_float, growth};
use super::{ConvergenceError, GreenDomain, GrowthReport, MIN_GROWTH_ORDER};
use crate::audit::PencilSpec;
use crate::engine::{normalize, EngineError, EngineOptions, NormalFormArtifacts};
use crate::hamiltonian::{check_nonresonant, NonResonance, SpecError};
use crate::scalar::{BigFloat, ComplexFloat, ConvertCtx, FromExact, ParamPoly};
use crate::series::{Exponent, GradedSeries};

/// Number of concentric rings in a disk grid.
pub const DISK_RINGS: usize = 4;

/// Parameter grid of a scan.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanGrid {
    /// The centre and [`DISK_RINGS`] rings of `per_ring` points at radii
    /// `R/4, R/2, 3R/4, R`.
    Disk { center: Complex64, radius: f64, per_ring: usize },
    /// `count` Chebyshev nodes of the segment `[a, b]`.
    Interval { a: f64, b: f64, count: usize },
}

impl ScanGrid {
    /// `disk:c:R:M` or `interval:a:b:M`. The disk centre may be complex,
    /// written `1.5`, `2i` or `1-0.5i`.
    pub fn parse(text: &str) -> Result<Self, ConvergenceError> {
        let bad = |why: &str| ConvergenceError::Grid(format!("`{text}`: {why}"));
        let fields: Vec<&str> = text.trim().split(':').collect();
        let [kind, p, q, m] = fields[..] else {
            return Err(bad("expected four fields separated by `:`"));
        };
        let count: usize = m.trim().parse().map_err(|_| bad("point count is not an integer"))?;
        let real = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let grid = match kind.trim() {
            "disk" => ScanGrid::Disk {
                center: parse_complex(p).ok_or_else(|| bad("centre is not a complex number"))?,
                radius: real(q)?,
                per_ring: count,
            },
            "interval" => ScanGrid::Interval {
                a: real(p)?,
                b: real(q)?,
                count,
            },
            _ => return Err(bad("kind must be `disk` or `interval`")),
        };
        grid.domain().validate().map_err(|_| bad("empty or degenerate domain"))?;
        if count == 0 {
            return Err(bad("the grid is empty"));
        }
        Ok(grid)
    }

    /// The compact set the grid samples.
    pub fn domain(&self) -> GreenDomain {
        match *self {
            ScanGrid::Disk { center, radius, .. } => GreenDomain::Disk { center, radius },
            ScanGrid::Interval { a, b, .. } => GreenDomain::Interval { a, b },
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        match *self {
            ScanGrid::Disk { center, radius, per_ring } => {
                let mut pts = vec![center];
                for ring in 1..=DISK_RINGS {
                    let r = radius * ring as f64 / DISK_RINGS as f64;
                    pts.extend(ring_angles(per_ring).map(|a| center + Complex64::from_polar(r, a)));
                }
                pts
            }
            ScanGrid::Interval { a, b, count } => chebyshev_nodes(count)
                .map(|x| Complex64::new(0.5 * (a + b) + 0.5 * (b - a) * x, 0.0))
                .collect(),
        }
    }

    /// Indices into [`ScanGrid::points`] of the nodes used to recover the
    /// coefficient polynomials: the outer ring, or all Chebyshev nodes.
    fn boundary_indices(&self) -> std::ops::Range<usize> {
        match *self {
            ScanGrid::Disk { per_ring, .. } => 1 + (DISK_RINGS - 1) * per_ring..1 + DISK_RINGS * per_ring,
            ScanGrid::Interval { count, .. } => 0..count,
        }
    }

    /// Highest polynomial degree the boundary nodes determine.
    pub fn resolvable_degree(&self) -> usize {
        self.boundary_indices().len() - 1
    }

    /// A default off-grid point: `c + 3R/2`, or `(a + b)/2 + i (b − a)/4`.
    pub fn default_probe(&self) -> Complex64 {
        match *self {
            ScanGrid::Disk { center, radius, .. } => center + 1.5 * radius,
            ScanGrid::Interval { a, b, .. } => Complex64::new(0.5 * (a + b), 0.25 * (b - a)),
        }
    }
}

fn ring_angles(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |j| TAU * j as f64 / m as f64)
}

fn chebyshev_nodes(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |j| (PI * (2 * j + 1) as f64 / (2 * m) as f64).cos())
}

/// Parses `1.5`, `2i`, `-i` or `1-0.5e-3i`.
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    // Split at the last sign that is not an exponent sign or the leading one.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    };
    match split {
        Some(k) => Some(Complex64::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

fn complex_float(t: Complex64, precision: usize) -> ComplexFloat {
    Complex::new(BigFloat::from_f64(t.re, precision), BigFloat::from_f64(t.im, precision))
}

pub(crate) fn to_complex64(c: &ComplexFloat) -> Complex64 {
    Complex64::new(c.re.to_f64(), c.im.to_f64())
}

/// Normalizes the member `H_t` in complex floats at `ctx.precision`.
pub fn normalize_at(
    pencil: &PencilSpec,
    t: Complex64,
    ctx: &ConvertCtx,
) -> Result<NormalFormArtifacts<ComplexFloat>, EngineError> {
    let family = pencil.family();
    let t = complex_float(t, ctx.precision);
    let lambda = family.lambda.convert::<ComplexFloat>(ctx)?;
    let mut h = GradedSeries::zero(family.n, family.order);
    for (k, l) in lambda.iter().enumerate() {
        h.add_term(Exponent::unit(family.n, k).raise(family.n + k), l);
    }
    for (e, v) in &family.terms {
        let mut value = ComplexFloat::new(BigFloat::from_f64(0.0, ctx.precision), BigFloat::from_f64(0.0, ctx.precision));
        for c in v.value.coeffs().iter().rev() {
            let c = ComplexFloat::from_exact(&ParamPoly::constant(c.clone()), ctx).map_err(SpecError::Scalar)?;
            value = value * t.clone() + c;
        }
        h.add_term(e.clone(), &value);
    }
    normalize(&h, &lambda, &EngineOptions::with_mode(family.mode))
}

/// One scanned parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub t: Complex64,
    /// The growth report, or the engine error that stopped this point.
    pub outcome: Result<GrowthReport, String>,
    /// `K_t` rounded to `f64`, kept for the extrapolation.
    pub k: Option<BTreeMap<Exponent, Complex64>>,
}

/// Runs the engine at every grid point in parallel; rows come back in grid
/// order and a failure at one point does not stop the others.
pub fn family_scan(
    pencil: &PencilSpec,
    grid: &[Complex64],
    rho0: f64,
    ctx: &ConvertCtx,
) -> Result<Vec<ScanRow>, ConvergenceError> {
    if grid.is_empty() {
        return Err(ConvergenceError::Grid("the grid is empty".into()));
    }
    if pencil.order() < MIN_GROWTH_ORDER {
        return Err(ConvergenceError::OrderTooLow(pencil.order()));
    }
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(ConvergenceError::BadRho(rho0));
    }
    if let NonResonance::Fail { alpha, beta } = check_nonresonant(&pencil.base.lambda, pencil.order()) {
        return Err(EngineError::Resonance { alpha, beta }.into());
    }
    Ok(grid
        .par_iter()
        .map(|&t| match normalize_at(pencil, t, ctx) {
            Ok(art) => {
                let k = art.k.terms().map(|(e, c)| (e.clone(), to_complex64(c))).collect();
                ScanRow {
                    t,
                    outcome: growth(&art, rho0).map_err(|e| e.to_string()),
                    k: Some(k),
                }
            }
            Err(e) => ScanRow {
                t,
                outcome: Err(e.to_string()),
                k: None,
            },
        })
        .collect())
}

/// CSV `t_re,t_im,radius_est,fit_window,min_divisor,probe_tail,status`.
pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("t_re,t_im,radius_est,fit_window,min_divisor,probe_tail,status\n");
    for row in rows {
        let _ = write!(out, "{},{},", row.t.re, row.t.im);
        match &row.outcome {
            Ok(g) => {
                let (lo, hi) = g.window();
                let _ = writeln!(
                    out,
                    "{},{lo}-{hi},{},{},ok",
                    fmt_float(g.radius_estimate()),
                    g.min_divisor.map_or_else(|| "none".into(), fmt_float),
                    fmt_float(g.probe_tail()),
                );
            }
            Err(e) => {
                let msg: String = e.chars().map(|c| if c == ',' || c == '\n' { ' ' } else { c }).collect();
                let _ = writeln!(out, "nan,,,nan,error: {msg}");
            }
        }
    }
    out
}

/// Bernstein prediction for one degree `l` at the probe point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtrapolationRow {
    pub l: u32,
    /// `max |K_i(t)|` over the grid and `|i| = l`.
    pub grid_max: f64,
    /// `max_i ‖K_i‖` on the compact set, from the recovered polynomials.
    pub sup_norm: f64,
    /// `max_i e^{(l−2) g(t*)} ‖K_i‖`.
    pub predicted: f64,
    /// `max_i |K_i(t*)|` from a direct run at `t*`.
    pub observed: f64,
    /// `max_i |K̃_i(t*) − K_i(t*)|` between the recovered polynomials and the
    /// direct run.
    pub recovery_error: f64,
    /// Every monomial of degree `l` satisfies its own bound.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub t_star: Complex64,
    pub green: f64,
    pub rows: Vec<ExtrapolationRow>,
}

impl Extrapolation {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,t_re,t_im,green,grid_max,sup_norm,predicted,observed,recovery_error,verdict\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.l,
                self.t_star.re,
                self.t_star.im,
                fmt_float(self.green),
                fmt_float(r.grid_max),
                fmt_float(r.sup_norm),
                fmt_float(r.predicted),
                fmt_float(r.observed),
                fmt_float(r.recovery_error),
                if r.passed { "PASS" } else { "FAIL" },
            );
        }
        out
    }
}

/// Relative slack of the extrapolation check, covering the rounding of
/// `K` to `f64` and of the polynomial recovery.
const EXTRAPOLATION_SLACK: f64 = 1e-9;

/// Recovers each `K_i(t)`, a polynomial of degree at most `|i| − 2`, from
/// the boundary nodes of a scan, and bounds `|K_i(t*)|` by
/// `e^{(|i|−2) g(t*)} ‖K_i‖`. The bounds are compared with `direct`, the
/// normal form computed at `t*`.
pub fn extrapolate(
    grid: &ScanGrid,
    rows: &[ScanRow],
    t_star: Complex64,
    direct: &GradedSeries<ComplexFloat>,
) -> Result<Extrapolation, ConvergenceError> {
    let pts = grid.points();
    if rows.len() != pts.len() || rows.iter().zip(&pts).any(|(r, p)| r.t != *p) {
        return Err(ConvergenceError::Extrapolation("scan rows do not match the grid".into()));
    }
    let order = direct.order();
    let need = order.saturating_sub(2) as usize;
    if grid.resolvable_degree() < need {
        return Err(ConvergenceError::Extrapolation(format!(
            "{} boundary nodes cannot resolve t-degree {need}",
            grid.resolvable_degree() + 1
        )));
    }
    let boundary: Vec<&BTreeMap<Exponent, Complex64>> = rows[grid.boundary_indices()]
        .iter()
        .map(|r| {
            r.k.as_ref().ok_or_else(|| {
                ConvergenceError::Extrapolation(format!("no normal form at boundary node t = {}", r.t))
            })
        })
        .collect::<Result<_, _>>()?;
    let domain = grid.domain();
    let green = match domain.green(t_star) {
        Ok(g) => g,
        // Inside a disk the maximum principle gives the bound with g = 0.
        Err(ConvergenceError::InsideSet(_)) => 0.0,
        Err(e) => return Err(e),
    };
    let direct_values: BTreeMap<Exponent, Complex64> =
        direct.terms().map(|(e, c)| (e.clone(), to_complex64(c))).collect();
    let mut support: BTreeSet<&Exponent> = boundary.iter().flat_map(|k| k.keys()).collect();
    support.extend(direct_values.keys());

    let mut by_degree: BTreeMap<u32, ExtrapolationRow> = (3..=order)
        .map(|l| {
            let row = ExtrapolationRow {
                l,
                grid_max: 0.0,
                sup_norm: 0.0,
                predicted: 0.0,
                observed: 0.0,
                recovery_error: 0.0,
                passed: true,
            };
            (l, row)
        })
        .collect();
    for row in rows {
        for (e, c) in row.k.iter().flatten() {
            if let Some(r) = by_degree.get_mut(&e.degree()) {
                r.grid_max = r.grid_max.max(c.norm());
            }
        }
    }
    for e in support {
        let l = e.degree();
        let Some(r) = by_degree.get_mut(&l) else { continue };
        let values: Vec<Complex64> = boundary
            .iter()
            .map(|k| k.get(e).copied().unwrap_or_default())
            .collect();
        let d = l as usize - 2;
        let (sup, at_star) = recover(grid, &values, d, t_star);
        let predicted = (d as f64 * green).exp() * sup;
        let direct_value = direct_values.get(e).copied().unwrap_or_default();
        let seen = direct_value.norm();
        r.recovery_error = r.recovery_error.max((at_star - direct_value).norm());
        r.sup_norm = r.sup_norm.max(sup);
        r.predicted = r.predicted.max(predicted);
        r.observed = r.observed.max(seen);
        r.passed &= seen <= predicted * (1.0 + EXTRAPOLATION_SLACK) + f64::MIN_POSITIVE;
    }
    Ok(Extrapolation {
        t_star,
        green,
        rows: by_degree.into_values().collect(),
    })
}

/// Interpolates the node values by a polynomial of degree `d` and returns its
/// sup norm on the grid's compact set and its value at `t_star`.
fn recover(grid: &ScanGrid, values: &[Complex64], d: usize, t_star: Complex64) -> (f64, Complex64) {
    let m = values.len();
    match *grid {
        ScanGrid::Disk { center, radius, .. } => {
            // a_k = (1/m) Σ_j f_j ω^{−jk} in the variable u = (t − c) / R.
            let coeffs: Vec<Complex64> = (0..=d)
                .map(|k| {
                    values
                        .iter()
                        .enumerate()
                        .map(|(j, f)| f * Complex64::from_polar(1.0, -TAU * (j * k % m) as f64 / m as f64))
                        .sum::<Complex64>()
                        / m as f64
                })
                .collect();
            let eval = |t: Complex64| super::eval_poly(&coeffs, (t - center) / radius);
            (sup_norm_by(eval, d, &grid.domain()), eval(t_star))
        }
        ScanGrid::Interval { a, b, .. } => {
            // Chebyshev coefficients in s = (2t − a − b) / (b − a).
            let nodes: Vec<f64> = chebyshev_nodes(m).collect();
            let coeffs: Vec<Complex64> = (0..=d)
                .map(|k| {
                    let scale = if k == 0 { 1.0 } else { 2.0 } / m as f64;
                    values
                        .iter()
                        .zip(&nodes)
                        .map(|(f, x)| f * (k as f64 * x.acos()).cos())
                        .sum::<Complex64>()
                        * scale
                })
                .collect();
            let eval = |t: Complex64| clenshaw(&coeffs, (2.0 * t - (a + b)) / (b - a));
            (sup_norm_by(eval, d, &grid.domain()), eval(t_star))
        }
    }
}

/// `Σ c_k T_k(s)`.
fn clenshaw(coeffs: &[Complex64], s: Complex64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let (mut b1, mut b2) = (zero, zero);
    for c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * s * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(zero) + s * b1 - b2
}
