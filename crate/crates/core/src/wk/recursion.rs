//! Order-by-order construction of the correction polynomials `W_k`.
//!
//! With `W = sum_k hbar^k W_k`, each order obeys
//!
//! ```text
//! dW_k/dt = 1/2 [lap - t lap(V) + t^2 |grad V|^2 - 2t grad V . grad] W_{k-2}
//!         + i p . (grad - t grad V) W_{k-1}
//! ```
//!
//! with `W_0 = 1`, `W_k = 0` for `k < 0` and `W_k(t = 0) = 0` for `k >= 1`.

use crate::poly::{CRational, MultiPoly, Rational};
use crate::potential::PotentialSpec;

/// `W_0 .. W_K` for one potential.
#[derive(Clone, Debug)]
pub struct WKSeries {
    potential: PotentialSpec,
    terms: Vec<MultiPoly>,
}

impl WKSeries {
    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    /// The highest computed order `K`.
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[MultiPoly] {
        &self.terms
    }

    pub fn term(&self, k: usize) -> &MultiPoly {
        &self.terms[k]
    }
}

/// Cached products of the potential that the recursion reuses at every order.
pub(crate) struct Coefficients {
    /// `t * lap V`
    pub t_lap: MultiPoly,
    /// `t^2 |grad V|^2`
    pub t2_grad_sq: MultiPoly,
    /// `t * dV/dx_i`
    pub t_grad: Vec<MultiPoly>,
}

impl Coefficients {
    pub fn new(potential: &PotentialSpec) -> Self {
        let t = potential.space().t();
        Coefficients {
            t_lap: potential.laplacian().mul_var(t, 1),
            t2_grad_sq: potential.grad_squared().mul_var(t, 2),
            t_grad: potential.grads().iter().map(|g| g.mul_var(t, 1)).collect(),
        }
    }
}

/// `[lap - t lap V + t^2 |grad V|^2 - 2t grad V . grad] f`
pub(crate) fn second_order_part(pot: &PotentialSpec, c: &Coefficients, f: &MultiPoly) -> MultiPoly {
    let sp = pot.space();
    let mut out = &(&c.t2_grad_sq * f) - &(&c.t_lap * f);
    for (i, x) in sp.xs().into_iter().enumerate() {
        let df = f.diff(x);
        out = &out + &df.diff(x);
        out = &out - &(&c.t_grad[i] * &df).scale(&CRational::from_integer(2));
    }
    out
}

/// `p . (grad - t grad V) f`, without the factor `i`.
pub(crate) fn drift_part(pot: &PotentialSpec, c: &Coefficients, f: &MultiPoly) -> MultiPoly {
    let sp = pot.space();
    let mut out = MultiPoly::zero(sp);
    for (i, x) in sp.xs().into_iter().enumerate() {
        let d = &f.diff(x) - &(&c.t_grad[i] * f);
        out = &out + &d.mul_var(sp.p(i), 1);
    }
    out
}

/// Right-hand side of the order-`k` equation given the two previous orders.
pub(crate) fn recursion_rhs(
    pot: &PotentialSpec,
    c: &Coefficients,
    w_km2: Option<&MultiPoly>,
    w_km1: Option<&MultiPoly>,
) -> MultiPoly {
    let sp = pot.space();
    let mut rhs = MultiPoly::zero(sp);
    if let Some(w) = w_km2 {
        rhs = &rhs + &second_order_part(pot, c, w).scale_rational(&Rational::new(1, 2));
    }
    if let Some(w) = w_km1 {
        rhs = &rhs + &drift_part(pot, c, w).mul_i();
    }
    rhs
}

/// Computes `W_0 .. W_order`.
pub fn wk_recursion(potential: &PotentialSpec, order: usize) -> WKSeries {
    let sp = potential.space();
    let coeffs = Coefficients::new(potential);
    let mut terms = vec![MultiPoly::one(sp)];
    for k in 1..=order {
        let w_km2 = k.checked_sub(2).map(|j| &terms[j]);
        let w_km1 = Some(&terms[k - 1]);
        let rhs = recursion_rhs(potential, &coeffs, w_km2, w_km1);
        terms.push(rhs.integrate_t());
    }
    WKSeries { potential: potential.clone(), terms }
}

/// `D_i f = df/dx_i - t (dV/dx_i) f`.
pub fn covariant_derivative(potential: &PotentialSpec, f: &MultiPoly, i: usize) -> MultiPoly {
    let sp = potential.space();
    assert!(i < sp.dim(), "axis out of range");
    let shifted = potential.grad(i).mul_var(sp.t(), 1);
    &f.diff(sp.x(i)) - &(&shifted * f)
}
