use num_complex::Complex64;

use super::ConvergenceError;

/// A compact set `E ⊂ ℂ` with a closed-form Green function of its
/// complement, `g(t) = log|t| − log cap(E) + o(1)` at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenDomain {
    Disk { center: Complex64, radius: f64 },
    /// The real segment `[a, b]`.
    Interval { a: f64, b: f64 },
}

impl GreenDomain {
    pub fn unit_disk() -> Self {
        GreenDomain::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn unit_interval() -> Self {
        GreenDomain::Interval { a: -1.0, b: 1.0 }
    }

    /// Logarithmic capacity: `r` for a disk, `(b − a) / 4` for a segment.
    pub fn capacity(&self) -> f64 {
        match *self {
            GreenDomain::Disk { radius, .. } => radius,
            GreenDomain::Interval { a, b } => (b - a) / 4.0,
        }
    }

    pub fn validate(&self) -> Result<(), ConvergenceError> {
        let ok = match *self {
            GreenDomain::Disk { center, radius } => radius > 0.0 && radius.is_finite() && center.is_finite(),
            GreenDomain::Interval { a, b } => a < b && a.is_finite() && b.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(ConvergenceError::BadDomain(format!("{self:?}")))
        }
    }

    /// `g_Ω(t, ∞)`, zero on the set itself. Points strictly inside a disk
    /// are rejected (the function is only defined off the compact set).
    pub fn green(&self, t: Complex64) -> Result<f64, ConvergenceError> {
        self.validate()?;
        match *self {
            GreenDomain::Disk { center, radius } => {
                let d = (t - center).norm();
                if d < radius {
                    return Err(ConvergenceError::InsideSet(t));
                }
                Ok((d / radius).ln())
            }
            GreenDomain::Interval { a, b } => {
                let s = (2.0 * t - Complex64::new(a + b, 0.0)) / (b - a);
                let root = (s * s - 1.0).sqrt();
                // The two branches are reciprocal; take the one outside the unit disk.
                let w = (s + root).norm().max((s - root).norm());
                Ok(w.ln().max(0.0))
            }
        }
    }

    /// Points on the boundary used to approximate sup norms: an `m`-point
    /// circle, or `m` Chebyshev nodes together with both endpoints.
    pub fn boundary_samples(&self, m: usize) -> Vec<Complex64> {
        match *self {
            GreenDomain::Disk { center, radius } => (0..m)
                .map(|j| center + Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / m as f64))
                .collect(),
            GreenDomain::Interval { a, b } => {
                let mut pts = vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)];
                pts.extend((0..m).map(|j| {
                    let x = (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * m) as f64).cos();
                    Complex64::new(0.5 * (a + b) + 0.5 * (b - a) * x, 0.0)
                }));
                pts
            }
        }
    }

    /// Boundary point at parameter `θ`: `θ ∈ [0, 2π)` on a circle, `θ ∈ [0, π]`
    /// along a segment (`a + b)/2 + (b − a)/2 · cos θ`).
    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        match *self {
            GreenDomain::Disk { center, radius } => center + Complex64::from_polar(radius, theta),
            GreenDomain::Interval { a, b } => Complex64::new(0.5 * (a + b) + 0.5 * (b - a) * theta.cos(), 0.0),
        }
    }

    /// Length of the parameter range of [`GreenDomain::boundary_point`].
    pub fn parameter_span(&self) -> f64 {
        match self {
            GreenDomain::Disk { .. } => std::f64::consts::TAU,
            GreenDomain::Interval { .. } => std::f64::consts::PI,
        }
    }
}

/// Five-point discrete Laplacian of `g` at `t` with step `h`.
pub fn laplacian_residual(domain: &GreenDomain, t: Complex64, h: f64) -> Result<f64, ConvergenceError> {
    let g = |z: Complex64| domain.green(z);
    let centre = g(t)?;
    let sum = g(t + h)? + g(t - h)? + g(t + Complex64::new(0.0, h))? + g(t - Complex64::new(0.0, h))?;
    Ok((sum - 4.0 * centre) / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_forms() {
        let disk = GreenDomain::unit_disk();
        assert!((disk.green(c(2.0, 0.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(disk.green(c(0.5, 0.0)), Err(ConvergenceError::InsideSet(_))));
        let seg = GreenDomain::unit_interval();
        assert_eq!(seg.green(c(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(seg.green(c(-1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(seg.green(c(0.3, 0.0)).unwrap(), 0.0);
        let expected = (1.0 + 2f64.sqrt()).ln();
        assert!((seg.green(c(0.0, 1.0)).unwrap() - expected).abs() < 1e-15);
        assert!((seg.green(c(0.0, -1.0)).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn affine_pullback_and_capacity() {
        // [1, 5] is [−1, 1] scaled by 2 and shifted by 3.
        let seg = GreenDomain::Interval { a: 1.0, b: 5.0 };
        let g = seg.green(c(3.0, 2.0)).unwrap();
        assert!((g - GreenDomain::unit_interval().green(c(0.0, 1.0)).unwrap()).abs() < 1e-15);
        assert_eq!(seg.capacity(), 1.0);
        // g(t) − log|t| → −log cap
        let far = c(1e7, 0.0);
        assert!((seg.green(far).unwrap() - far.norm().ln() + seg.capacity().ln()).abs() < 1e-6);
    }

    #[test]
    fn harmonic_off_the_set() {
        for (dom, t) in [
            (GreenDomain::unit_disk(), c(1.7, -0.4)),
            (GreenDomain::Disk { center: c(1.0, 1.0), radius: 0.5 }, c(2.0, 2.5)),
            (GreenDomain::unit_interval(), c(0.2, 0.9)),
            (GreenDomain::unit_interval(), c(-2.0, 0.1)),
        ] {
            let r = laplacian_residual(&dom, t, 1e-3).unwrap();
            assert!(r.abs() <= 1e-6, "{dom:?} at {t}: {r}");
        }
    }
}
