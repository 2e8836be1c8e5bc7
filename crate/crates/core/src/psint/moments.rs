//! Analytic momentum integrals against the Gaussian weight `e^{-t p^2 / 2}`.

use crate::poly::{Monomial, MultiPoly, Rational};

/// Result of integrating a polynomial over momenta:
///
/// ```text
/// (2 pi / t)^{n/2} * t^{-t_denominator} * numerator(x, t)
/// ```
///
/// `numerator` no longer depends on `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMoments {
    pub numerator: MultiPoly,
    pub t_denominator: u32,
}

impl GaussianMoments {
    /// The factor multiplying `numerator` at a numeric `t`.
    pub fn prefactor(&self, t: f64) -> f64 {
        gaussian_norm(self.numerator.space().dim(), t) * t.powi(-(self.t_denominator as i32))
    }
}

/// `(k - 1)!!` for even `k`, i.e. `1 * 3 * ... * (k - 1)`.
fn odd_double_factorial(k: u32) -> i64 {
    (1..k as i64).step_by(2).product()
}

/// Replaces every `p^alpha` by its Gaussian moment: odd exponents give zero,
/// `p_i^{2m}` gives `(2m - 1)!! t^{-m}`.
pub fn gaussian_p_moments(poly: &MultiPoly) -> GaussianMoments {
    let sp = poly.space();
    let n = sp.dim();
    let t = sp.t().0;

    let mut surviving = Vec::new();
    for (m, c) in poly.terms() {
        let e = m.exponents();
        let p_exps = &e[n..2 * n];
        if p_exps.iter().any(|k| k % 2 == 1) {
            continue;
        }
        let weight: i64 = p_exps.iter().map(|&k| odd_double_factorial(k)).product();
        let half_degree: i64 = p_exps.iter().map(|&k| (k / 2) as i64).sum();
        surviving.push((e.to_vec(), c.scale(&Rational::from_integer(weight)), half_degree));
    }

    let shift = surviving
        .iter()
        .map(|(e, _, h)| h - e[t] as i64)
        .max()
        .unwrap_or(0)
        .max(0);

    let mut numerator = MultiPoly::zero(sp);
    for (mut e, c, h) in surviving {
        for k in &mut e[n..2 * n] {
            *k = 0;
        }
        e[t] = (e[t] as i64 - h + shift) as u32;
        numerator = &numerator + &MultiPoly::monomial(sp, c, Monomial::new(e));
    }
    GaussianMoments { numerator, t_denominator: shift as u32 }
}

/// `(2 pi / t)^{n/2}`.
pub fn gaussian_norm(n: usize, t: f64) -> f64 {
    (2.0 * std::f64::consts::PI / t).powf(n as f64 / 2.0)
}
