use num_complex::Complex64;

use super::{ConvergenceError, GreenDomain};

/// Relative slack allowed in `|P(t)| ≤ e^{n g(t)} ‖P‖`.
pub const BERNSTEIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinVerdict {
    pub passed: bool,
    /// `max |P(t)| / (e^{n g(t)} ‖P‖)` over the trial points.
    pub max_ratio: f64,
    pub sup_norm: f64,
    pub degree: usize,
}

/// Horner evaluation of `Σ c_j t^j`.
pub fn eval_poly(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
}

fn degree(coeffs: &[Complex64]) -> usize {
    coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0)
}

/// `max |P|` over the boundary of the domain (which carries the maximum on
/// the whole compact set). Dense sampling locates the local maxima, each
/// of which is then refined by golden-section search.
pub fn sup_norm(coeffs: &[Complex64], domain: &GreenDomain) -> f64 {
    sup_norm_by(|t| eval_poly(coeffs, t), degree(coeffs), domain)
}

/// [`sup_norm`] for a polynomial of degree at most `n` given by an evaluator.
pub(crate) fn sup_norm_by(p: impl Fn(Complex64) -> Complex64, n: usize, domain: &GreenDomain) -> f64 {
    let span = domain.parameter_span();
    let closed = matches!(domain, GreenDomain::Interval { .. });
    let m = (16 * (n + 1)).max(256);
    let steps = if closed { m } else { m - 1 };
    let h = span / m as f64;
    let f = |theta: f64| p(domain.boundary_point(theta)).norm();
    let values: Vec<f64> = (0..=steps).map(|j| f(j as f64 * h)).collect();
    let mut best = values.iter().copied().fold(0.0, f64::max);
    let len = values.len();
    for j in 0..len {
        let (prev, next) = if closed {
            (j.checked_sub(1).map(|i| values[i]), values.get(j + 1).copied())
        } else {
            (Some(values[(j + len - 1) % len]), Some(values[(j + 1) % len]))
        };
        if prev.is_some_and(|p| p > values[j]) || next.is_some_and(|q| q > values[j]) {
            continue;
        }
        let theta = j as f64 * h;
        let lo = if closed { (theta - h).max(0.0) } else { theta - h };
        let hi = if closed { (theta + h).min(span) } else { theta + h };
        best = best.max(golden_max(&f, lo, hi));
    }
    best
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd).max(f(a)).max(f(b))
}

/// Checks Bernstein's inequality `|P(t)| ≤ e^{n g_Ω(t)} ‖P‖_Ω` at every
/// trial point, with `n = deg P`. A failure means a bug: the inequality is
/// a theorem.
pub fn bernstein_check(
    coeffs: &[Complex64],
    domain: &GreenDomain,
    points: &[Complex64],
) -> Result<BernsteinVerdict, ConvergenceError> {
    domain.validate()?;
    let n = degree(coeffs);
    let sup = sup_norm(coeffs, domain);
    let mut max_ratio: f64 = 0.0;
    for &t in points {
        let g = domain.green(t)?;
        let value = eval_poly(coeffs, t).norm();
        if value == 0.0 {
            continue;
        }
        let bound = (n as f64 * g).exp() * sup;
        max_ratio = max_ratio.max(value / bound);
    }
    Ok(BernsteinVerdict {
        passed: max_ratio <= 1.0 + BERNSTEIN_TOLERANCE,
        max_ratio,
        sup_norm: sup,
        degree: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomials_are_extremal_on_the_disk() {
        let mut p = vec![c(0.0, 0.0); 8];
        p[7] = c(1.0, 0.0);
        let v = bernstein_check(&p, &GreenDomain::unit_disk(), &[c(3.0, 0.0), c(0.0, -1.5), c(2.0, 2.0)]).unwrap();
        assert!(v.passed);
        assert!((v.max_ratio - 1.0).abs() < 1e-12, "{}", v.max_ratio);
    }

    #[test]
    fn chebyshev_polynomials_are_extremal_on_the_segment() {
        // T_4 = 8t⁴ − 8t² + 1
        let p = [c(1.0, 0.0), c(0.0, 0.0), c(-8.0, 0.0), c(0.0, 0.0), c(8.0, 0.0)];
        let v = bernstein_check(&p, &GreenDomain::unit_interval(), &[c(2.0, 0.0), c(0.0, 3.0)]).unwrap();
        assert!((v.sup_norm - 1.0).abs() < 1e-14);
        assert!(v.passed, "{}", v.max_ratio);
        // |T_n(t)| → e^{n g} / 2 as t → ∞; at t = 2 it is already within 1e−4.
        assert!(v.max_ratio > 0.49);
    }

    #[test]
    fn constants_and_inside_points() {
        let v = bernstein_check(&[c(2.0, -1.0)], &GreenDomain::unit_disk(), &[c(5.0, 0.0)]).unwrap();
        assert_eq!(v.degree, 0);
        assert!((v.max_ratio - 1.0).abs() < 1e-15);
        assert!(bernstein_check(&[c(1.0, 0.0)], &GreenDomain::unit_disk(), &[c(0.1, 0.0)]).is_err());
    }

    #[test]
    fn refinement_finds_off_grid_maxima() {
        // |1 + t^7 e^{iθ₀}| peaks between samples for an irrational θ₀.
        let mut p = vec![c(0.0, 0.0); 8];
        p[0] = c(1.0, 0.0);
        p[7] = Complex64::from_polar(1.0, 0.1234567);
        let sup = sup_norm(&p, &GreenDomain::unit_disk());
        assert!((sup - 2.0).abs() < 1e-13, "{sup}");
    }
}
