//! Finite-difference residual of the diagonal momentum-space Bloch equation
//!
//! ```text
//! dA/dt (p, p) + (p^2 / 2) A(p, p) = -[V~ A](p, p')|_{p' = p}
//! ```
//!
//! where `V~` is the [`DeltaDerivOperator`](super::DeltaDerivOperator).

use num_complex::Complex64;
use serde::Serialize;

use super::{DeltaDerivOperator, MomentError, MomentumBlochMatrix};

/// Formal accuracy order of the central `p'` stencils.
pub const DEFAULT_STENCIL_ACCURACY: usize = 6;

/// Weights for the `m`-th derivative at `z` from values at `nodes`.
pub fn fornberg_weights(z: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > m, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Half-width of the central stencil for derivative order `d`.
fn half_width(d: u32, accuracy: usize) -> usize {
    if d == 0 {
        0
    } else {
        (2 * d.div_ceil(2) as usize - 1 + accuracy) / 2
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OdeResidual {
    /// Max over interior times and grid points, relative to the largest term.
    pub max_relative: f64,
    /// `(t, relative residual)` at each interior time.
    pub per_time: Vec<(f64, f64)>,
}

pub fn ode_residual_check(
    matrix: &MomentumBlochMatrix,
    operator: &DeltaDerivOperator,
) -> Result<OdeResidual, MomentError> {
    ode_residual_check_with(matrix, operator, DEFAULT_STENCIL_ACCURACY)
}

pub fn ode_residual_check_with(
    matrix: &MomentumBlochMatrix,
    operator: &DeltaDerivOperator,
    accuracy: usize,
) -> Result<OdeResidual, MomentError> {
    let times = &matrix.times;
    if times.len() < 3 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MomentError::BadTimes(times.clone()));
    }
    let grid = &matrix.grid;
    let hw = half_width(operator.max_axis_order(), accuracy);
    let count = grid.per_axis();
    if count < 2 * hw + 1 {
        return Err(MomentError::GridTooCoarse { needed: 2 * hw + 1, available: count });
    }
    let h = grid.spacing;
    let offsets: Vec<f64> = (-(hw as i64)..=hw as i64).map(|o| o as f64 * h).collect();

    // per term: coefficient and per-axis stencil weights over `offsets`
    let terms: Vec<(Complex64, Vec<Vec<f64>>)> = operator
        .numeric_terms(matrix.hbar)
        .into_iter()
        .map(|(c, alpha)| {
            let w = alpha
                .iter()
                .map(|&d| {
                    let lo = hw - half_width(d, accuracy);
                    let hi = hw + half_width(d, accuracy);
                    let local = fornberg_weights(0.0, &offsets[lo..=hi], d as usize);
                    let mut full = vec![0.0; offsets.len()];
                    full[lo..=hi].copy_from_slice(&local);
                    full
                })
                .collect();
            (c, w)
        })
        .collect();

    let interior: Vec<usize> = (0..grid.len())
        .filter(|&k| grid.unflatten(k).iter().all(|&i| i >= hw && i + hw < count))
        .collect();
    let width = 2 * hw + 1;
    let stencil_points = width.pow(grid.dim as u32);

    let mut per_time = Vec::new();
    let mut max_relative: f64 = 0.0;
    for k in 1..times.len() - 1 {
        let wt = fornberg_weights(times[k], &times[k - 1..=k + 1], 1);
        let a = &matrix.values[k];
        let mut scale: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for &pk in &interior {
            let idx = grid.unflatten(pk);
            let dt: Complex64 = (0..3).map(|j| matrix.values[k - 1 + j][(pk, pk)] * wt[j]).sum();
            let p2: f64 = grid.point(pk).iter().map(|p| p * p).sum();
            let kinetic = a[(pk, pk)] * (0.5 * p2);
            let mut potential = Complex64::new(0.0, 0.0);
            for (c, w) in &terms {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..stencil_points {
                    let mut rem = s;
                    let mut weight = 1.0;
                    let mut target = idx.clone();
                    for ax in (0..grid.dim).rev() {
                        let o = rem % width;
                        rem /= width;
                        weight *= w[ax][o];
                        target[ax] = idx[ax] + o - hw;
                    }
                    if weight != 0.0 {
                        acc += a[(pk, grid.flatten(&target))] * weight;
                    }
                }
                potential += c * acc;
            }
            let residual = (dt + kinetic + potential).norm();
            scale = scale.max(dt.norm()).max(kinetic.norm()).max(potential.norm());
            worst = worst.max(residual);
        }
        let rel = if scale > 0.0 { worst / scale } else { 0.0 };
        per_time.push((times[k], rel));
        max_relative = max_relative.max(rel);
    }
    Ok(OdeResidual { max_relative, per_time })
}
