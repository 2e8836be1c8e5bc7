//! Spatial integrals `int f(x, t) e^{-t V(x)} d^n x`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::poly::MultiPoly;
use crate::potential::PotentialSpec;

use super::cubature::{self, CubatureFailure};
use super::PsintError;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainKind {
    FullSpace,
    Box { half_widths: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpatialDomain {
    pub kind: DomainKind,
    pub tolerance: f64,
    pub max_depth: u32,
    /// Skip the closed-form Gaussian path even when it applies.
    #[serde(skip)]
    pub force_quadrature: bool,
}

impl SpatialDomain {
    pub fn full_space() -> Self {
        SpatialDomain {
            kind: DomainKind::FullSpace,
            tolerance: DEFAULT_TOLERANCE,
            max_depth: DEFAULT_MAX_DEPTH,
            force_quadrature: false,
        }
    }

    pub fn boxed(half_widths: Vec<f64>) -> Result<Self, PsintError> {
        if half_widths.is_empty() || half_widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(PsintError::BadDomain("box half-widths must be positive".into()));
        }
        Ok(SpatialDomain { kind: DomainKind::Box { half_widths }, ..Self::full_space() })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        assert!(tolerance > 0.0);
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn quadrature_only(mut self) -> Self {
        self.force_quadrature = true;
        self
    }

    /// Short text form used in CSV headers, e.g. `full` or `box:2,2`.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            DomainKind::FullSpace => "full".to_string(),
            DomainKind::Box { half_widths } => {
                let w: Vec<String> = half_widths.iter().map(|w| format!("{w}")).collect();
                format!("box:{}", w.join(","))
            }
        }
    }
}

/// Directions `{-1, 0, 1}^n \ {0}`.
fn ray_directions(n: usize) -> Vec<Vec<f64>> {
    let total = 3usize.pow(n as u32);
    (1..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = (k % 3) as f64 - 1.0;
                    k /= 3;
                    d
                })
                .collect::<Vec<f64>>()
        })
        .filter(|d| d.iter().any(|&v| v != 0.0))
        .collect()
}

/// Coefficients of `V(r d)` as a polynomial in `r`.
fn ray_polynomial(potential: &PotentialSpec, d: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; potential.v().total_degree() as usize + 1];
    for (c, alpha) in potential.monomials() {
        let k: u32 = alpha.iter().sum();
        let dir: f64 = alpha.iter().zip(d).map(|(&e, &di)| di.powi(e as i32)).product();
        coeffs[k as usize] += c.to_f64() * dir;
    }
    coeffs
}

/// Full-space decay pre-check: `V` must grow to `+inf` along every axis and
/// diagonal ray. This is a finite heuristic; it catches channel potentials
/// such as `x^2 y^2` whose valleys run along the axes.
pub fn check_decay(potential: &PotentialSpec) -> Result<(), PsintError> {
    for d in ray_directions(potential.dim()) {
        let coeffs = ray_polynomial(potential, &d);
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let leading = coeffs
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| c.abs() > 1e-14 * scale.max(f64::MIN_POSITIVE));
        match leading {
            Some((k, &c)) if k >= 1 && c > 0.0 => {}
            _ => return Err(PsintError::NonIntegrable { direction: d }),
        }
    }
    Ok(())
}

/// Closed form for `V = c + x^T A x / 2` with `A` positive definite.
pub fn gaussian_closed_form(f: &MultiPoly, potential: &PotentialSpec, t: f64) -> Option<f64> {
    let (constant, a) = potential.quadratic_form()?;
    let n = potential.dim();
    let a = DMatrix::from_row_slice(n, n, &a);
    let chol = (a.clone() * t).cholesky()?;
    let cov = chol.inverse();
    let det: f64 = (a * t).determinant();
    let norm = (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0) / det.sqrt() * (-t * constant).exp();

    let tv = f.space().t().0;
    let mut memo = HashMap::new();
    let mut total = 0.0;
    for (m, c) in f.terms() {
        let e = m.exponents();
        let beta: Vec<u32> = e[..n].to_vec();
        let moment = isserlis(&beta, &cov, &mut memo);
        total += c.re.to_f64() * t.powi(e[tv] as i32) * moment;
    }
    Some(total * norm)
}

/// `E[x^beta]` for a centred Gaussian with covariance `cov`.
fn isserlis(beta: &[u32], cov: &DMatrix<f64>, memo: &mut HashMap<Vec<u32>, f64>) -> f64 {
    let degree: u32 = beta.iter().sum();
    if degree == 0 {
        return 1.0;
    }
    if degree % 2 == 1 {
        return 0.0;
    }
    if let Some(&v) = memo.get(beta) {
        return v;
    }
    let i = beta.iter().position(|&b| b > 0).unwrap();
    let mut rest = beta.to_vec();
    rest[i] -= 1;
    let mut acc = 0.0;
    for j in 0..beta.len() {
        if rest[j] == 0 {
            continue;
        }
        let mut r2 = rest.clone();
        let mult = r2[j] as f64;
        r2[j] -= 1;
        acc += cov[(i, j)] * mult * isserlis(&r2, cov, memo);
    }
    memo.insert(beta.to_vec(), acc);
    acc
}

/// Radius along axis `a` where `t V` reaches one, used to scale the
/// infinite-interval map.
fn axis_scale(potential: &PotentialSpec, a: usize, t: f64) -> f64 {
    let mut d = vec![0.0; potential.dim()];
    d[a] = 1.0;
    let coeffs = ray_polynomial(potential, &d);
    let tv = |r: f64| t * coeffs.iter().enumerate().map(|(k, c)| c * r.powi(k as i32)).sum::<f64>();
    let mut hi = 1.0;
    let mut guard = 0;
    while tv(hi) < 1.0 && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if tv(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.max(1e-3)
}

/// `int f(x, t) e^{-t V(x)} d^n x` over `domain`. `f` must not depend on `p`.
pub fn spatial_integral(
    f: &MultiPoly,
    potential: &PotentialSpec,
    t: f64,
    domain: &SpatialDomain,
) -> Result<f64, PsintError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(PsintError::InvalidTime(t));
    }
    let sp = potential.space();
    assert!(f.depends_only_on(&[sp.xs(), vec![sp.t()]].concat()), "integrand depends on p");
    let n = sp.dim();

    if let DomainKind::FullSpace = domain.kind {
        check_decay(potential)?;
        if !domain.force_quadrature {
            if let Some(v) = gaussian_closed_form(f, potential, t) {
                return Ok(v);
            }
        }
    }

    let fnum = f.to_numeric();
    let vnum = potential.v().to_numeric();
    let tidx = sp.t().0;
    let integrand_at = move |x: &[f64], pt: &mut Vec<f64>| -> f64 {
        pt[..n].copy_from_slice(x);
        pt[tidx] = t;
        let tv = t * vnum.eval_re(pt);
        if tv > 745.0 {
            return 0.0;
        }
        fnum.eval_re(pt) * (-tv).exp()
    };

    let result = match &domain.kind {
        DomainKind::Box { half_widths } => {
            if half_widths.len() != n {
                return Err(PsintError::BadDomain(format!(
                    "box has {} half-widths for a {n}-dimensional potential",
                    half_widths.len()
                )));
            }
            let lo: Vec<f64> = half_widths.iter().map(|w| -w).collect();
            cubature::integrate(
                |x| integrand_at(x, &mut vec![0.0; 2 * n + 1]),
                &lo,
                half_widths,
                domain.tolerance,
                domain.max_depth,
            )
        }
        DomainKind::FullSpace => {
            let scales: Vec<f64> = (0..n).map(|a| axis_scale(potential, a, t)).collect();
            // x = L s / (1 - s^2), s in (-1, 1)
            let mapped = |s: &[f64]| {
                let mut x = vec![0.0; n];
                let mut jac = 1.0;
                for a in 0..n {
                    let one_m = 1.0 - s[a] * s[a];
                    x[a] = scales[a] * s[a] / one_m;
                    jac *= scales[a] * (1.0 + s[a] * s[a]) / (one_m * one_m);
                }
                let v = integrand_at(&x, &mut vec![0.0; 2 * n + 1]);
                if v == 0.0 { 0.0 } else { v * jac }
            };
            cubature::integrate(mapped, &vec![-1.0; n], &vec![1.0; n], domain.tolerance, domain.max_depth)
        }
    };
    match result {
        Ok(r) => Ok(r.value),
        Err(CubatureFailure::DepthExhausted { value, error }) => {
            Err(PsintError::ToleranceNotReached { value, error })
        }
        Err(CubatureFailure::NonFinite) => Err(PsintError::ToleranceNotReached {
            value: f64::NAN,
            error: f64::INFINITY,
        }),
    }
}
