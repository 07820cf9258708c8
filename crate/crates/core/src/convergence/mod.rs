//! Coefficient growth of normal forms and the Bernstein-lemma machinery
//! used to propagate bounds off a set of parameters.

mod bernstein;
mod green;
mod growth;
mod scan;

pub use num_complex::Complex64;
use thiserror::Error;

use crate::audit::AuditError;
use crate::engine::EngineError;
use crate::hamiltonian::SpecError;

pub use bernstein::{bernstein_check, eval_poly, sup_norm, BernsteinVerdict, BERNSTEIN_TOLERANCE};
pub use green::{laplacian_residual, GreenDomain};
pub use growth::{growth, growth_of, growth_of_spec, max_coefficients, tail_fit, GrowthReport, TailFit, MIN_GROWTH_ORDER};
pub use scan::{
    extrapolate, family_scan, normalize_at, parse_complex, scan_to_csv, Extrapolation, ExtrapolationRow, ScanGrid, ScanRow,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvergenceError {
    #[error("truncation order {0} is too low for a tail fit (need at least {MIN_GROWTH_ORDER})")]
    OrderTooLow(u32),
    #[error("rho0 must be positive and finite, got {0}")]
    BadRho(f64),
    #[error("t = {0} lies inside the compact set")]
    InsideSet(Complex64),
    #[error("invalid Green domain {0}")]
    BadDomain(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("growth needs an exact or numeric spec, not a parameter family")]
    Parametric,
    #[error("{0}")]
    Extrapolation(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Audit(#[from] AuditError),
}
