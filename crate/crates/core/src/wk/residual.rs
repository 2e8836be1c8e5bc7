//! Residual of the full evolution equation with `hbar` kept symbolic:
//!
//! ```text
//! dW/dt - hbar^2/2 [lap - t lap V + t^2 |grad V|^2 - 2t grad V . grad] W
//!       - i hbar p . (grad - t grad V) W
//! ```
//!
//! evaluated on the truncated series `W = sum_{k<=K} hbar^k W_k`.

use crate::poly::{CRational, MultiPoly, Rational};

use super::hbar::HbarPoly;
use super::recursion::WKSeries;
use super::WkError;

/// Residual grouped by power of `hbar`, orders `0 ..= K + 2`.
#[derive(Clone, Debug)]
pub struct UbResidual {
    order: usize,
    by_order: Vec<MultiPoly>,
}

impl UbResidual {
    /// Residual coefficient of `hbar^k`.
    pub fn at(&self, k: usize) -> &MultiPoly {
        &self.by_order[k]
    }

    pub fn orders(&self) -> &[MultiPoly] {
        &self.by_order
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.by_order.iter().position(|r| !r.is_zero())
    }

    /// True when orders `0 ..= k` are exactly zero.
    pub fn vanishes_through(&self, k: usize) -> bool {
        self.by_order.iter().take(k + 1).all(MultiPoly::is_zero)
    }

    /// Succeeds when every order up to the series order `K` vanishes.
    pub fn check(&self) -> Result<(), WkError> {
        match self.first_nonzero() {
            Some(k) if k <= self.order => Err(WkError::ResidualNonzero { order: k }),
            _ => Ok(()),
        }
    }
}

/// Substitutes the truncated series into the full equation.
pub fn ub_residual(series: &WKSeries) -> UbResidual {
    let pot = series.potential();
    let sp = pot.space();
    let t = sp.t();
    let w = HbarPoly::from_coeffs(sp, series.terms().to_vec());

    let mut kinetic = HbarPoly::zero(sp);
    let mut drift = HbarPoly::zero(sp);
    for (i, x) in sp.xs().into_iter().enumerate() {
        let g = pot.grad(i).mul_var(t, 1);
        let dw = w.diff(x);
        kinetic = kinetic
            .add(&dw.diff(x))
            .sub(&dw.mul_poly(&g).scale(&CRational::from_integer(2)));
        let cov = dw.sub(&w.mul_poly(&g));
        drift = drift.add(&cov.mul_poly(&MultiPoly::var(sp, sp.p(i))));
    }
    let potential_terms = &pot.grad_squared().mul_var(t, 2) - &pot.laplacian().mul_var(t, 1);
    kinetic = kinetic.add(&w.mul_poly(&potential_terms));

    let rhs = kinetic
        .scale(&CRational::real(Rational::new(1, 2)))
        .shift(2)
        .add(&drift.scale(&CRational::i()).shift(1));
    let residual = w.diff(t).sub(&rhs);

    let order = series.order();
    let by_order = (0..=order + 2).map(|k| residual.coeff(k)).collect();
    UbResidual { order, by_order }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;
    use crate::wk::wk_recursion;

    #[test]
    fn free_order_zero() {
        let r = ub_residual(&wk_recursion(&PotentialSpec::zero(1), 0));
        assert!(r.orders().iter().all(MultiPoly::is_zero));
        assert!(r.check().is_ok());
    }

    #[test]
    fn harmonic_order_two_leaves_higher_orders() {
        let v = PotentialSpec::from_monomials(1, &[(Rational::one(), vec![2])]).unwrap();
        let r = ub_residual(&wk_recursion(&v, 2));
        assert!(r.vanishes_through(2));
        assert_eq!(r.first_nonzero(), Some(3));
        assert!(!r.at(4).is_zero());
        assert!(r.check().is_ok());
    }

    #[test]
    fn yang_mills_order_four() {
        let r = ub_residual(&wk_recursion(&PotentialSpec::yang_mills(Rational::one()), 4));
        assert!(r.vanishes_through(4));
    }
}
