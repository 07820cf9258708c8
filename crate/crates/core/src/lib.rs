//! Exact Birkhoff normal forms of Hamiltonians with a non-resonant diagonal
//! quadratic part.
//!
//! The engine computes the normal form `K`, the generating function `v`
//! and the canonical transformation `(φ, ψ)` order by order, over any
//! coefficient domain implementing [`scalar::Coeff`]. Running it with
//! parameter-polynomial coefficients tracks how every coefficient depends on
//! a pencil parameter `t`.

pub mod engine;
pub mod audit;
pub mod convergence;
pub mod hamiltonian;
pub mod integrals;
pub mod scalar;
pub mod series;

pub use hamiltonian::{HamiltonianSpec, NormalizationMode, SpecError};
pub use scalar::{BigFloat, ComplexFloat, ParamPoly, Radical, Rational};
pub use series::{Exponent, GradedSeries, HomogeneousPoly};

/// Series with exact rational coefficients.
pub type RationalSeries = GradedSeries<Rational>;
/// Series over the rationals adjoined square roots.
pub type RadicalSeries = GradedSeries<Radical>;
/// Series whose coefficients are polynomials in the pencil parameter `t`.
pub type ParamSeries = GradedSeries<ParamPoly<Radical>>;
/// Series over arbitrary-precision binary floats.
pub type FloatSeries = GradedSeries<BigFloat>;
/// Series over arbitrary-precision complex floats.
pub type ComplexSeries = GradedSeries<ComplexFloat>;
/// Series over `f64`.
pub type F64Series = GradedSeries<f64>;
/// Series over `f32`.
pub type F32Series = GradedSeries<f32>;
