//! Numerical order counting: how the exact quantum correction to the
//! classical `Z` scales with `hbar`.

use serde::Serialize;

use crate::oracle::{converged_z_exact, default_omega, quadratic_z, BasisSpec};
use crate::potential::{PotentialFile, PotentialSpec};
use crate::psint::{thomas_fermi, SpatialDomain, TGrid};

use super::MomentError;

/// `r(hbar) = Z_exact / Z_0 - 1` at fixed `t` and its fitted power law.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingFit {
    pub t: f64,
    pub hbars: Vec<f64>,
    pub relative_corrections: Vec<f64>,
    /// Least-squares slope of `ln |r|` against `ln hbar`.
    pub exponent: f64,
    /// `log2 (r(hbar) / r(hbar / 2))` for consecutive halvings.
    pub local_exponents: Vec<f64>,
}

/// Fits the leading power of the relative quantum correction. Quadratic
/// potentials use the closed-form reference; others grow an oracle basis
/// from `start_basis` up to `max_basis`.
pub fn hbar_scaling_fit(
    potential: &PotentialSpec,
    t: f64,
    hbars: &[f64],
    start_basis: usize,
    max_basis: usize,
    tolerance: f64,
) -> Result<ScalingFit, MomentError> {
    let grid = TGrid::single(t)?;
    let mut relative_corrections = Vec::with_capacity(hbars.len());
    for &hbar in hbars {
        let z0 = thomas_fermi(potential, &grid, hbar, &SpatialDomain::full_space())?[0];
        let exact = match quadratic_z(potential, hbar, &grid) {
            Some(z) => z[0],
            None => {
                let omega = default_omega(potential, start_basis, hbar);
                let basis = BasisSpec::new(start_basis, omega, hbar)?;
                converged_z_exact(potential, basis, &grid, 20, max_basis, tolerance)?.z.values[0]
            }
        };
        relative_corrections.push(exact / z0 - 1.0);
    }
    let pts: Vec<(f64, f64)> =
        hbars.iter().zip(&relative_corrections).map(|(h, r)| (h.ln(), r.abs().ln())).collect();
    let m = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let local_exponents = pts
        .windows(2)
        .map(|w| (w[0].1 - w[1].1) / (w[0].0 - w[1].0))
        .collect();
    Ok(ScalingFit {
        t,
        hbars: hbars.to_vec(),
        relative_corrections,
        exponent: sxy / sxx,
        local_exponents,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualEntry {
    pub check: String,
    pub t: f64,
    pub residual: f64,
}

/// JSON report `{potential, first_correction_order, hbar_scaling_exponent_fit, residuals}`.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub potential: PotentialFile,
    pub first_correction_order: u32,
    pub hbar_scaling_exponent_fit: Option<f64>,
    pub residuals: Vec<ResidualEntry>,
}

impl MomentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
