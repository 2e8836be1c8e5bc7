//! Partition function order by order.
//!
//! `Z_k(t) = (2 pi hbar)^{-n} int d^n x d^n p W_k e^{-t H}` with the momentum
//! integrals done analytically and the spatial ones by closed form or
//! adaptive cubature.

mod cubature;
mod moments;
mod spatial;

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::potential::PotentialSpec;
use crate::wk::{wk_recursion, WKSeries};

pub use cubature::{integrate as cubature_integrate, CubatureFailure, CubatureResult};
pub use moments::{gaussian_norm, gaussian_p_moments, GaussianMoments};
pub use spatial::{
    check_decay, gaussian_closed_form, spatial_integral, DomainKind, SpatialDomain,
    DEFAULT_MAX_DEPTH, DEFAULT_TOLERANCE,
};

/// Relative size below which odd orders count as vanished.
pub const ODD_ORDER_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PsintError {
    #[error(
        "potential does not confine along direction {direction:?}; the classical integral diverges on full space (use --box to integrate over a finite box)"
    )]
    NonIntegrable { direction: Vec<f64> },
    #[error("quadrature depth exhausted: value {value:e}, error estimate {error:e}")]
    ToleranceNotReached { value: f64, error: f64 },
    #[error("invalid t grid: {0}")]
    BadGrid(String),
    #[error("invalid domain: {0}")]
    BadDomain(String),
    #[error("t must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),
    #[error("order {order} at t = {t} is {value:e}, expected to vanish")]
    OddOrderNonvanishing { order: usize, t: f64, value: f64 },
    #[error("order {order} has an imaginary part after momentum integration")]
    ComplexResult { order: usize },
}

/// Strictly increasing positive times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TGrid {
    values: Vec<f64>,
}

impl TGrid {
    pub fn new(values: Vec<f64>) -> Result<Self, PsintError> {
        if values.is_empty() {
            return Err(PsintError::BadGrid("empty grid".into()));
        }
        if let Some(t) = values.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(PsintError::BadGrid(format!("t = {t} is not positive")));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PsintError::BadGrid("values must be strictly increasing".into()));
        }
        Ok(TGrid { values })
    }

    pub fn single(t: f64) -> Result<Self, PsintError> {
        Self::new(vec![t])
    }

    pub fn linear(tmin: f64, tmax: f64, steps: usize) -> Result<Self, PsintError> {
        Self::spaced(tmin, tmax, steps, |a, b, s| a + (b - a) * s)
    }

    pub fn log(tmin: f64, tmax: f64, steps: usize) -> Result<Self, PsintError> {
        if tmin.is_nan() || tmin <= 0.0 {
            return Err(PsintError::BadGrid(format!("t = {tmin} is not positive")));
        }
        Self::spaced(tmin, tmax, steps, |a, b, s| a * (b / a).powf(s))
    }

    fn spaced(
        tmin: f64,
        tmax: f64,
        steps: usize,
        at: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self, PsintError> {
        match steps {
            0 => Err(PsintError::BadGrid("at least one step required".into())),
            1 if tmin == tmax => Self::new(vec![tmin]),
            1 => Err(PsintError::BadGrid("one step needs tmin == tmax".into())),
            _ => {
                let last = (steps - 1) as f64;
                let mut v: Vec<f64> = (0..steps).map(|i| at(tmin, tmax, i as f64 / last)).collect();
                v[steps - 1] = tmax;
                Self::new(v)
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `Z_k(t)` for `k = 0..=K` and the resummed `sum_k hbar^k Z_k(t)`.
#[derive(Clone, Debug, Serialize)]
pub struct ZSeries {
    #[serde(skip)]
    pub potential: PotentialSpec,
    pub hbar: f64,
    pub order: usize,
    pub grid: TGrid,
    /// `zk[k][i]` is `Z_k(t_i)`.
    pub zk: Vec<Vec<f64>>,
    pub zsum: Vec<f64>,
    pub domain: SpatialDomain,
}

impl ZSeries {
    /// Partial sum through order `k`.
    pub fn partial_sum(&self, k: usize) -> Vec<f64> {
        assert!(k <= self.order);
        (0..self.grid.len())
            .map(|i| (0..=k).map(|j| self.hbar.powi(j as i32) * self.zk[j][i]).sum())
            .collect()
    }

    /// `hbar^k Z_k / Z_0` on the grid.
    pub fn relative_correction(&self, k: usize) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.hbar.powi(k as i32) * self.zk[k][i] / self.zk[0][i])
            .collect()
    }

    /// CSV with a `#` metadata line, then `t,Z0..ZK,Zsum[,Zexact]`.
    pub fn write_csv<W: Write>(&self, mut out: W, exact: Option<&[f64]>) -> io::Result<()> {
        if let Some(e) = exact {
            assert_eq!(e.len(), self.grid.len());
        }
        writeln!(
            out,
            "# potential={} hbar={} order={} domain={}",
            self.potential.hash_hex(),
            self.hbar,
            self.order,
            self.domain.descriptor()
        )?;
        let mut cols = vec!["t".to_string()];
        cols.extend((0..=self.order).map(|k| format!("Z{k}")));
        cols.push("Zsum".into());
        if exact.is_some() {
            cols.push("Zexact".into());
        }
        writeln!(out, "{}", cols.join(","))?;
        for (i, t) in self.grid.values().iter().enumerate() {
            let mut row = vec![format!("{t:e}")];
            row.extend(self.zk.iter().map(|z| format!("{:e}", z[i])));
            row.push(format!("{:e}", self.zsum[i]));
            if let Some(e) = exact {
                row.push(format!("{:e}", e[i]));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Per-order spatial integrands after momentum integration.
fn momentum_integrated(series: &WKSeries) -> Result<Vec<GaussianMoments>, PsintError> {
    series
        .terms()
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let m = gaussian_p_moments(w);
            if !m.numerator.all_real() {
                return Err(PsintError::ComplexResult { order: k });
            }
            Ok(m)
        })
        .collect()
}

/// `Z_k(t)` on the grid for every order of `series`.
pub fn assemble_z(
    series: &WKSeries,
    hbar: f64,
    grid: &TGrid,
    domain: &SpatialDomain,
) -> Result<ZSeries, PsintError> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(PsintError::InvalidHbar(hbar));
    }
    let potential = series.potential();
    let n = potential.dim() as i32;
    let measure = (2.0 * std::f64::consts::PI * hbar).powi(-n);
    let integrands = momentum_integrated(series)?;

    let columns: Vec<Vec<f64>> = grid
        .values()
        .par_iter()
        .map(|&t| {
            integrands
                .iter()
                .map(|m| {
                    if m.numerator.is_zero() {
                        return Ok(0.0);
                    }
                    let s = spatial_integral(&m.numerator, potential, t, domain)?;
                    Ok(measure * m.prefactor(t) * s)
                })
                .collect::<Result<Vec<f64>, PsintError>>()
        })
        .collect::<Result<_, _>>()?;

    let order = series.order();
    let zk: Vec<Vec<f64>> = (0..=order).map(|k| columns.iter().map(|c| c[k]).collect()).collect();
    for k in (1..=order).step_by(2) {
        for (i, &t) in grid.values().iter().enumerate() {
            if zk[k][i].abs() > ODD_ORDER_TOLERANCE * zk[0][i].abs() {
                return Err(PsintError::OddOrderNonvanishing { order: k, t, value: zk[k][i] });
            }
        }
    }
    let zsum = (0..grid.len())
        .map(|i| (0..=order).map(|k| hbar.powi(k as i32) * zk[k][i]).sum())
        .collect();
    Ok(ZSeries {
        potential: potential.clone(),
        hbar,
        order,
        grid: grid.clone(),
        zk,
        zsum,
        domain: domain.clone(),
    })
}

/// Classical phase-space integral `(2 pi hbar)^{-n} int e^{-t H}`.
pub fn thomas_fermi(
    potential: &PotentialSpec,
    grid: &TGrid,
    hbar: f64,
    domain: &SpatialDomain,
) -> Result<Vec<f64>, PsintError> {
    Ok(assemble_z(&wk_recursion(potential, 0), hbar, grid, domain)?.zsum)
}
