//! Momentum representation of the Bloch equation.
//!
//! In momentum space a monomial `c x^alpha` of the potential acts as
//! `c (i hbar)^{|alpha|} d^alpha / dp'^alpha` on `delta(p' - p)`, so each
//! insertion of the potential carries `hbar^{|alpha|}`.

mod bloch;
mod report;
mod residual;

use serde::Serialize;
use thiserror::Error;

use crate::oracle::OracleError;
use crate::poly::CRational;
use crate::potential::PotentialSpec;
use crate::psint::PsintError;

pub use bloch::{
    bloch_matrix_from_spectrum, momentum_hermite_functions, MomentumBlochMatrix, MomentumGrid,
};
pub use report::{hbar_scaling_fit, MomentReport, ResidualEntry, ScalingFit};
pub use residual::{fornberg_weights, ode_residual_check, ode_residual_check_with, OdeResidual, DEFAULT_STENCIL_ACCURACY};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("the potential has no non-constant monomial")]
    ZeroPotential,
    #[error("momentum grid has {available} points per axis; the stencil needs {needed}")]
    GridTooCoarse { needed: usize, available: usize },
    #[error("invalid momentum grid: {0}")]
    BadGrid(String),
    #[error("need at least three strictly increasing positive times, got {0:?}")]
    BadTimes(Vec<f64>),
    #[error("spectral truncation tail {bound:e} at t = {t} exceeds tolerance {tolerance:e}")]
    TailTooLarge { t: f64, bound: f64, tolerance: f64 },
    #[error("grid dimension {grid} does not match spectrum dimension {spectrum}")]
    DimensionMismatch { grid: usize, spectrum: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Psint(#[from] PsintError),
}

/// One term `coeff * hbar^{hbar_power} * d^alpha / dp'^alpha`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaDerivTerm {
    #[serde(serialize_with = "serialize_crational")]
    pub coeff: CRational,
    pub hbar_power: u32,
    pub alpha: Vec<u32>,
}

fn serialize_crational<S: serde::Serializer>(c: &CRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{} {}", c.re, c.im))
}

/// The Fourier-transformed potential as derivatives of `delta(p' - p)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaDerivOperator {
    pub dim: usize,
    pub terms: Vec<DeltaDerivTerm>,
}

impl DeltaDerivOperator {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order along any single axis.
    pub fn max_axis_order(&self) -> u32 {
        self.terms.iter().flat_map(|t| t.alpha.iter().copied()).max().unwrap_or(0)
    }

    /// Numeric coefficients `coeff * hbar^{hbar_power}` with their multi-indices.
    pub fn numeric_terms(&self, hbar: f64) -> Vec<(num_complex::Complex64, &[u32])> {
        self.terms
            .iter()
            .map(|t| (t.coeff.to_complex64() * hbar.powi(t.hbar_power as i32), t.alpha.as_slice()))
            .collect()
    }
}

/// `c x^alpha -> c (i hbar)^{|alpha|} d^alpha_{p'}`; constants are dropped.
pub fn fourier_potential(potential: &PotentialSpec) -> DeltaDerivOperator {
    let terms = potential
        .monomials()
        .into_iter()
        .filter_map(|(c, alpha)| {
            let k: u32 = alpha.iter().sum();
            if k == 0 {
                return None;
            }
            let coeff = &CRational::real(c) * &CRational::i_pow(k);
            debug_assert!(!coeff.is_zero());
            Some(DeltaDerivTerm { coeff, hbar_power: k, alpha })
        })
        .collect();
    DeltaDerivOperator { dim: potential.dim(), terms }
}

/// Power of `hbar` carried by one insertion of the Fourier-transformed
/// potential: the minimal total degree of the non-constant monomials.
pub fn first_correction_order(potential: &PotentialSpec) -> Result<u32, MomentError> {
    fourier_potential(potential)
        .terms
        .iter()
        .map(|t| t.hbar_power)
        .min()
        .ok_or(MomentError::ZeroPotential)
}
