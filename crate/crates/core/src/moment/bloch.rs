//! The momentum Bloch matrix `A(p, p'; t) = <p| e^{-t H} |p'>` built from an
//! oracle spectrum.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::oracle::Spectrum;

use super::MomentError;

/// Uniform symmetric grid `[-pmax, pmax]` on each of `dim` axes.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumGrid {
    pub dim: usize,
    pub axis: Vec<f64>,
    pub spacing: f64,
}

impl MomentumGrid {
    pub fn new(dim: usize, count: usize, pmax: f64) -> Result<Self, MomentError> {
        if count < 2 {
            return Err(MomentError::BadGrid(format!("{count} points per axis")));
        }
        if !(pmax > 0.0 && pmax.is_finite()) {
            return Err(MomentError::BadGrid(format!("pmax {pmax} not positive")));
        }
        if !(1..=3).contains(&dim) {
            return Err(MomentError::BadGrid(format!("dimension {dim}")));
        }
        let spacing = 2.0 * pmax / (count - 1) as f64;
        let axis = (0..count).map(|i| -pmax + spacing * i as f64).collect();
        Ok(MomentumGrid { dim, axis, spacing })
    }

    pub fn per_axis(&self) -> usize {
        self.axis.len()
    }

    /// Total number of grid points, `count^dim`.
    pub fn len(&self) -> usize {
        self.per_axis().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of flat point `k` (axis 0 slowest).
    pub fn unflatten(&self, mut k: usize) -> Vec<usize> {
        let m = self.per_axis();
        let mut idx = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            idx[a] = k % m;
            k /= m;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.per_axis() + i)
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.unflatten(k).into_iter().map(|i| self.axis[i]).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }
}

/// `h_m(p)` for `m < count`: the oscillator eigenfunctions of frequency
/// `omega` in the momentum representation, normalised on the real line.
/// Rows are grid points, columns are `m`.
pub fn momentum_hermite_functions(axis: &[f64], count: usize, omega: f64, hbar: f64) -> DMatrix<f64> {
    let scale = (hbar * omega).sqrt();
    let norm = (std::f64::consts::PI * hbar * omega).powf(-0.25);
    let mut h = DMatrix::zeros(axis.len(), count);
    for (i, &p) in axis.iter().enumerate() {
        let eta = p / scale;
        let mut prev = 0.0;
        let mut cur = norm * (-0.5 * eta * eta).exp();
        for m in 0..count {
            h[(i, m)] = cur;
            let mf = m as f64;
            let next = (2.0 / (mf + 1.0)).sqrt() * eta * cur - (mf / (mf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    h
}

/// `A(p_i, p_j; t)` on a momentum grid for several times.
#[derive(Clone, Debug)]
pub struct MomentumBlochMatrix {
    pub grid: MomentumGrid,
    pub hbar: f64,
    pub times: Vec<f64>,
    pub values: Vec<DMatrix<Complex64>>,
    /// `e^{-t E_max}` per time, or zero for closed-form kernels.
    pub tail_bounds: Vec<f64>,
}

impl MomentumBlochMatrix {
    /// Free kernel `delta(p - p') e^{-t p^2 / 2}` with the delta resolved on
    /// the grid as `1 / cell volume`.
    pub fn free(grid: MomentumGrid, times: &[f64], hbar: f64) -> Self {
        let n = grid.len();
        let values = times
            .iter()
            .map(|&t| {
                let mut a = DMatrix::zeros(n, n);
                for k in 0..n {
                    let p2: f64 = grid.point(k).iter().map(|p| p * p).sum();
                    a[(k, k)] = Complex64::new((-0.5 * t * p2).exp() / grid.cell_volume(), 0.0);
                }
                a
            })
            .collect();
        MomentumBlochMatrix { grid, hbar, times: times.to_vec(), values, tail_bounds: vec![0.0; times.len()] }
    }

    /// `sum_i A(p_i, p_i; t) dp^n` for time index `k`.
    pub fn trace(&self, k: usize) -> f64 {
        self.values[k].diagonal().iter().map(|z| z.re).sum::<f64>() * self.grid.cell_volume()
    }

    /// `max |A - A^dagger|` over all times.
    pub fn hermiticity_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|a| (a - a.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Diagonal entries are real (to `tol` relative) and positive at every time.
    pub fn diagonal_positive(&self, tol: f64) -> bool {
        self.values.iter().all(|a| {
            a.diagonal().iter().all(|z| z.re > 0.0 && z.im.abs() <= tol * z.re.abs().max(f64::MIN_POSITIVE))
        })
    }
}

/// Builds `A(p, p'; t) = sum_n phi_n(p) conj(phi_n(p')) e^{-t E_n}` from
/// every level of `spectrum`. Fails when `e^{-t E_max}` exceeds
/// `tail_tolerance` times the level sum.
pub fn bloch_matrix_from_spectrum(
    spectrum: &Spectrum,
    grid: &MomentumGrid,
    times: &[f64],
    tail_tolerance: f64,
) -> Result<MomentumBlochMatrix, MomentError> {
    if grid.dim != spectrum.dim {
        return Err(MomentError::DimensionMismatch { grid: grid.dim, spectrum: spectrum.dim });
    }
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(MomentError::BadTimes(times.to_vec()));
    }
    let basis = spectrum.basis;
    let m = basis.size;
    let h = momentum_hermite_functions(&grid.axis, m, basis.omega, basis.hbar);
    // (-i)^m h_m(p) per axis, then the tensor product over axes
    let axis_block = DMatrix::from_fn(grid.per_axis(), m, |i, k| {
        let phase = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
        phase * h[(i, k)]
    });
    let mut b = axis_block.clone();
    for _ in 1..grid.dim {
        b = b.kronecker(&axis_block);
    }
    // real and imaginary parts separately so every product is a real GEMM
    let phi_re = b.map(|z| z.re) * &spectrum.eigenvectors;
    let phi_im = b.map(|z| z.im) * &spectrum.eigenvectors;
    let e_max = *spectrum.eigenvalues.last().expect("non-empty spectrum");

    let per_time: Vec<Result<(DMatrix<Complex64>, f64), MomentError>> = times
        .par_iter()
        .map(|&t| {
            let weights: Vec<f64> = spectrum.eigenvalues.iter().map(|e| (-t * e).exp()).collect();
            let z: f64 = weights.iter().sum();
            let tail = (-t * e_max).exp();
            if tail > tail_tolerance * z {
                return Err(MomentError::TailTooLarge { t, bound: tail, tolerance: tail_tolerance * z });
            }
            let scaled = |m: &DMatrix<f64>| {
                let mut w = m.clone();
                for (j, wj) in weights.iter().enumerate() {
                    w.column_mut(j).scale_mut(*wj);
                }
                w
            };
            let (wr, wi) = (scaled(&phi_re), scaled(&phi_im));
            let re = &wr * phi_re.transpose() + &wi * phi_im.transpose();
            let im = &wi * phi_re.transpose() - &wr * phi_im.transpose();
            let a = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]));
            Ok((a, tail))
        })
        .collect();
    let mut values = Vec::with_capacity(times.len());
    let mut tail_bounds = Vec::with_capacity(times.len());
    for r in per_time {
        let (a, tail) = r?;
        values.push(a);
        tail_bounds.push(tail);
    }
    Ok(MomentumBlochMatrix {
        grid: grid.clone(),
        hbar: basis.hbar,
        times: times.to_vec(),
        values,
        tail_bounds,
    })
}
