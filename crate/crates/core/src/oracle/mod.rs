//! Exact reference spectra by diagonalization in a tensor harmonic-oscillator
//! basis, and the reference partition function `Z(t) = sum_n e^{-t E_n}`.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::potential::PotentialSpec;
use crate::psint::{cubature_integrate, TGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid basis: {0}")]
    BadBasis(String),
    #[error("eigensolver failed: {0}")]
    EigenFailure(String),
    #[error("no converged levels (basis too small)")]
    NoConvergedLevels,
    #[error("truncation tail {bound:e} at t = {t} exceeds tolerance {tolerance:e}; increase the basis size or t")]
    TailTooLarge { t: f64, bound: f64, tolerance: f64 },
    #[error("reference Z not converged: basis {size} changes Z by {change:e}, tolerance {tolerance:e}")]
    NotConverged { size: usize, change: f64, tolerance: f64 },
}

/// Per-axis basis size `M`, basis frequency `omega` and `hbar`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasisSpec {
    pub size: usize,
    pub omega: f64,
    pub hbar: f64,
}

impl BasisSpec {
    pub fn new(size: usize, omega: f64, hbar: f64) -> Result<Self, OracleError> {
        if size < 2 {
            return Err(OracleError::BadBasis(format!("size {size} < 2")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(OracleError::BadBasis(format!("omega {omega} not positive")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(OracleError::BadBasis(format!("hbar {hbar} not positive")));
        }
        Ok(BasisSpec { size, omega, hbar })
    }

    pub fn with_size(self, size: usize) -> Result<Self, OracleError> {
        Self::new(size, self.omega, self.hbar)
    }

    /// Dimension of the tensor basis, `M^n`.
    pub fn dimension(&self, n: usize) -> usize {
        self.size.pow(n as u32)
    }
}

/// `a + a^dagger` on `size` levels.
fn ladder_sum(size: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(size, size);
    for k in 1..size {
        let s = (k as f64).sqrt();
        m[(k - 1, k)] = s;
        m[(k, k - 1)] = s;
    }
    m
}

/// Single-axis `x^k` and `p^2` blocks, exact on the first `size` levels.
struct AxisOperators {
    x_powers: Vec<DMatrix<f64>>,
    p_squared: DMatrix<f64>,
}

impl AxisOperators {
    fn new(basis: &BasisSpec, max_power: usize) -> Self {
        let m = basis.size;
        let padded = m + max_power.max(2) + 1;
        let x = ladder_sum(padded) * (basis.hbar / (2.0 * basis.omega)).sqrt();
        let mut x_powers = vec![DMatrix::identity(m, m)];
        let mut acc = DMatrix::identity(padded, padded);
        for _ in 0..max_power {
            acc = &acc * &x;
            x_powers.push(acc.view((0, 0), (m, m)).into_owned());
        }
        // p = i sqrt(hbar omega / 2) (a^dagger - a)
        let mut d = DMatrix::zeros(padded, padded);
        for k in 1..padded {
            let s = (k as f64).sqrt();
            d[(k, k - 1)] = s;
            d[(k - 1, k)] = -s;
        }
        let p2 = (&d * &d) * (-basis.hbar * basis.omega / 2.0);
        AxisOperators { x_powers, p_squared: p2.view((0, 0), (m, m)).into_owned() }
    }
}

fn kron_all(factors: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.kronecker(f);
    }
    out
}

/// `H = -(hbar^2 / 2) laplacian + V` in the tensor basis (axis 0 slowest).
pub fn build_hamiltonian(potential: &PotentialSpec, basis: &BasisSpec) -> DMatrix<f64> {
    let n = potential.dim();
    let monomials = potential.monomials();
    let max_power = monomials.iter().flat_map(|(_, e)| e.iter().copied()).max().unwrap_or(0) as usize;
    let ops = AxisOperators::new(basis, max_power);
    let id = DMatrix::<f64>::identity(basis.size, basis.size);

    let mut pieces: Vec<(f64, Vec<&DMatrix<f64>>)> = (0..n)
        .map(|a| {
            let f: Vec<&DMatrix<f64>> =
                (0..n).map(|b| if a == b { &ops.p_squared } else { &id }).collect();
            (0.5, f)
        })
        .collect();
    for (c, e) in &monomials {
        pieces.push((c.to_f64(), e.iter().map(|&k| &ops.x_powers[k as usize]).collect()));
    }
    let terms: Vec<DMatrix<f64>> = pieces.par_iter().map(|(c, f)| kron_all(f) * *c).collect();
    let dim = basis.dimension(n);
    let mut h = DMatrix::zeros(dim, dim);
    for t in terms {
        h += t;
    }
    h
}

/// Eigenvalues (ascending), eigenvectors (columns) and per-level convergence
/// estimates `|E_i(M) - E_i(M - dM)|`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub dim: usize,
    pub basis: BasisSpec,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub convergence: Vec<f64>,
}

#[derive(Serialize)]
struct SpectrumExport<'a> {
    basis: &'a BasisSpec,
    eigenvalues: &'a [f64],
    convergence: &'a [f64],
}

impl Spectrum {
    /// Levels whose convergence estimate is within `tol * max(1, |E|)`,
    /// counted from the ground state up to the first failure.
    pub fn converged_levels(&self, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .zip(&self.convergence)
            .take_while(|(e, c)| **c <= tol * e.abs().max(1.0))
            .count()
    }

    /// JSON `{basis, eigenvalues, convergence}`; unknown convergence is `null`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpectrumExport {
            basis: &self.basis,
            eigenvalues: &self.eigenvalues,
            convergence: &self.convergence,
        })
        .expect("spectrum serializes")
    }
}

/// Full symmetric eigendecomposition. Convergence estimates are left infinite.
pub fn diagonalize(h: DMatrix<f64>, dim: usize, basis: BasisSpec) -> Result<Spectrum, OracleError> {
    if !h.is_square() {
        return Err(OracleError::EigenFailure("matrix not square".into()));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(OracleError::EigenFailure("non-finite matrix entry".into()));
    }
    let asym = (&h - h.transpose()).abs().max();
    if asym > 1e-12 * h.abs().max().max(1.0) {
        return Err(OracleError::EigenFailure(format!("matrix not symmetric ({asym:e})")));
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(OracleError::EigenFailure("non-finite eigenvalue".into()));
    }
    let cols: Vec<_> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let eigenvectors = DMatrix::from_columns(&cols);
    Ok(Spectrum {
        dim,
        basis,
        convergence: vec![f64::INFINITY; eigenvalues.len()],
        eigenvalues,
        eigenvectors,
    })
}

/// Basis-size step used for convergence estimates.
pub const DEFAULT_BASIS_STEP: usize = 20;

/// Diagonalizes at `basis.size` and at `basis.size - step` to estimate
/// per-level convergence.
pub fn solve_spectrum(
    potential: &PotentialSpec,
    basis: &BasisSpec,
    step: usize,
) -> Result<Spectrum, OracleError> {
    let n = potential.dim();
    let mut spectrum = diagonalize(build_hamiltonian(potential, basis), n, *basis)?;
    if basis.size > step + 1 && step > 0 {
        let small = basis.with_size(basis.size - step)?;
        let coarse = diagonalize(build_hamiltonian(potential, &small), n, small)?;
        for (i, c) in spectrum.convergence.iter_mut().enumerate() {
            if let Some(e) = coarse.eigenvalues.get(i) {
                *c = (e - spectrum.eigenvalues[i]).abs();
            }
        }
    }
    Ok(spectrum)
}

/// Ω minimising `Tr H` over a logarithmic scan.
///
/// `Tr H` is evaluated in closed form: `x^k` scales as `(hbar / 2 omega)^{k/2}`
/// times an Ω-independent ladder matrix and `p^2` as `hbar omega / 2`.
pub fn default_omega(potential: &PotentialSpec, size: usize, hbar: f64) -> f64 {
    let n = potential.dim();
    let monomials = potential.monomials();
    let max_power = monomials.iter().flat_map(|(_, e)| e.iter().copied()).max().unwrap_or(0) as usize;
    let unit = AxisOperators::new(&BasisSpec { size, omega: 1.0, hbar: 1.0 }, max_power);
    let x_traces: Vec<f64> = unit.x_powers.iter().map(|m| m.trace()).collect();
    let mf = size as f64;
    let kinetic = 0.5 * n as f64 * mf.powi(n as i32 - 1) * unit.p_squared.trace();
    let potential_terms: Vec<(f64, f64)> = monomials
        .iter()
        .map(|(c, e)| {
            let tr: f64 = e.iter().map(|&k| x_traces[k as usize]).product();
            (c.to_f64() * tr, e.iter().sum::<u32>() as f64)
        })
        .collect();
    let trace = |omega: f64| {
        kinetic * hbar * omega
            + potential_terms
                .iter()
                .map(|(c, k)| c * (hbar / omega).powf(k / 2.0))
                .sum::<f64>()
    };
    let (lo, hi, steps): (f64, f64, usize) = (0.05, 50.0, 241);
    let ratio = (hi / lo).ln();
    let mut best = (f64::INFINITY, 1.0);
    for i in 0..steps {
        let omega = lo * (ratio * i as f64 / (steps - 1) as f64).exp();
        let tr = trace(omega);
        if tr < best.0 {
            best = (tr, omega);
        }
    }
    best.1
}

/// Reference `Z(t)` with the estimated truncation tail at each `t`.
#[derive(Clone, Debug, Serialize)]
pub struct ZExact {
    pub values: Vec<f64>,
    pub tail_bounds: Vec<f64>,
    pub levels_used: usize,
}

/// Relative tolerance on per-level convergence for levels entering `Z`.
pub const DEFAULT_LEVEL_TOLERANCE: f64 = 1e-6;

/// Fits `E_i ~ E_0 + a (i + 1)^gamma` over the upper half of the used levels.
fn weyl_fit(levels: &[f64]) -> Option<(f64, f64)> {
    let n = levels.len();
    if n < 8 {
        return None;
    }
    let e0 = levels[0];
    let pts: Vec<(f64, f64)> = (n / 2..n)
        .filter(|&i| levels[i] - e0 > 0.0)
        .map(|i| (((i + 1) as f64).ln(), (levels[i] - e0).ln()))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let gamma = sxy / sxx;
    let a = (my - gamma * mx).exp();
    (gamma > 0.0 && a.is_finite()).then_some((a, gamma))
}

/// `sum_{m > N} e^{-t E_m}` from the Weyl-like fit, bounded by `f(N) + int_N^inf f`.
fn tail_estimate(levels: &[f64], t: f64) -> f64 {
    let n = levels.len();
    let e0 = levels[0];
    let Some((a, gamma)) = weyl_fit(levels) else {
        return f64::INFINITY;
    };
    let f = |s: f64| (-t * (e0 + a * s.powf(gamma))).exp();
    let start = n as f64 + 1.0;
    // s = start + L u / (1 - u)
    let scale = (1.0 / (t * a)).powf(1.0 / gamma).max(1.0);
    let integral = cubature_integrate(
        |u: &[f64]| {
            let one_m = 1.0 - u[0];
            f(start + scale * u[0] / one_m) * scale / (one_m * one_m)
        },
        &[0.0],
        &[1.0],
        1e-10,
        40,
    )
    .map(|r| r.value)
    .unwrap_or(f64::INFINITY);
    f(start) + integral
}

/// `Z(t) = sum_n e^{-t E_n}` over converged levels. Fails when the tail
/// estimate exceeds `tail_tolerance * Z` at any grid time.
pub fn z_exact(
    spectrum: &Spectrum,
    grid: &TGrid,
    level_tolerance: f64,
    tail_tolerance: f64,
) -> Result<ZExact, OracleError> {
    let used = spectrum.converged_levels(level_tolerance);
    if used == 0 {
        return Err(OracleError::NoConvergedLevels);
    }
    let levels = &spectrum.eigenvalues[..used];
    let mut values = Vec::with_capacity(grid.len());
    let mut tail_bounds = Vec::with_capacity(grid.len());
    for &t in grid.values() {
        let z: f64 = levels.iter().map(|e| (-t * e).exp()).sum();
        let tail = tail_estimate(levels, t);
        if tail > tail_tolerance * z {
            return Err(OracleError::TailTooLarge { t, bound: tail, tolerance: tail_tolerance * z });
        }
        values.push(z);
        tail_bounds.push(tail);
    }
    Ok(ZExact { values, tail_bounds, levels_used: used })
}

/// Reference `Z` whose basis has been grown until two consecutive sizes agree.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergedZ {
    pub z: ZExact,
    pub basis: BasisSpec,
    pub self_check: f64,
}

/// Grows the basis from `basis.size` in steps of `step` until `Z` at sizes
/// `M` and `M - step` agree to `tolerance` (relative) on the whole grid.
pub fn converged_z_exact(
    potential: &PotentialSpec,
    basis: BasisSpec,
    grid: &TGrid,
    step: usize,
    max_size: usize,
    tolerance: f64,
) -> Result<ConvergedZ, OracleError> {
    let mut size = basis.size;
    let mut last = (0, f64::INFINITY);
    while size <= max_size {
        let b = basis.with_size(size)?;
        let fine = solve_spectrum(potential, &b, step)?;
        let coarse = solve_spectrum(potential, &b.with_size(size - step)?, step)?;
        let zf = z_exact(&fine, grid, DEFAULT_LEVEL_TOLERANCE, f64::INFINITY);
        let zc = z_exact(&coarse, grid, DEFAULT_LEVEL_TOLERANCE, f64::INFINITY);
        if let (Ok(zf), Ok(zc)) = (zf, zc) {
            let change = zf
                .values
                .iter()
                .zip(&zc.values)
                .map(|(a, b)| (a - b).abs() / a.abs())
                .fold(0.0, f64::max);
            let tail_ok = zf.values.iter().zip(&zf.tail_bounds).all(|(z, tb)| *tb <= tolerance * z);
            if change <= tolerance && tail_ok {
                return Ok(ConvergedZ { z: zf, basis: b, self_check: change });
            }
            last = (size, change);
        }
        size += step;
    }
    Err(OracleError::NotConverged { size: last.0, change: last.1, tolerance })
}

/// `1 / (2 sinh(hbar omega t / 2))` for the one-dimensional oscillator.
pub fn harmonic_z(hbar_omega: f64, t: f64) -> f64 {
    0.5 / (0.5 * hbar_omega * t).sinh()
}

/// Closed-form `Z(t)` for `V = c + x^T A x / 2` with `A` positive definite:
/// a product of oscillators with `omega_a^2` the eigenvalues of `A`.
pub fn quadratic_z(potential: &PotentialSpec, hbar: f64, grid: &TGrid) -> Option<Vec<f64>> {
    let (constant, a) = potential.quadratic_form()?;
    let n = potential.dim();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &a)).eigenvalues;
    if eig.iter().any(|w2| *w2 <= 0.0) {
        return None;
    }
    let omegas: Vec<f64> = eig.iter().map(|w2| w2.sqrt()).collect();
    Some(
        grid.values()
            .iter()
            .map(|&t| (-t * constant).exp() * omegas.iter().map(|w| harmonic_z(hbar * w, t)).product::<f64>())
            .collect(),
    )
}
