//! Wigner-Kirkwood correction polynomials and the checks built on them.

mod forms;
mod hbar;
mod recursion;
mod residual;
mod stationary;

use thiserror::Error;

pub use crate::potential::PotentialSpec;
pub use forms::{
    apply_form, form_equivalence_check, FormId, FormOptions, OperatorFormReport,
};
pub use hbar::HbarPoly;
pub use recursion::{covariant_derivative, wk_recursion, WKSeries};
pub use residual::{ub_residual, UbResidual};
pub use stationary::{
    no_stationary_solution_check, planewave_symbol, stationary_planewave_check,
    StationaryVerdict,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WkError {
    #[error("evolution-equation residual is nonzero at order hbar^{order}")]
    ResidualNonzero { order: usize },
}
