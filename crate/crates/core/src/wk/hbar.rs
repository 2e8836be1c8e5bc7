use num_complex::Complex64;

use crate::poly::{CRational, MultiPoly, Var, VarSpace};

/// A polynomial in a formal `hbar` whose coefficients are [`MultiPoly`]s:
/// `sum_k hbar^k c_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HbarPoly {
    space: VarSpace,
    coeffs: Vec<MultiPoly>,
}

impl HbarPoly {
    pub fn zero(space: VarSpace) -> Self {
        HbarPoly { space, coeffs: Vec::new() }
    }

    /// `hbar^order * poly`.
    pub fn at_order(poly: MultiPoly, order: usize) -> Self {
        let space = poly.space();
        let mut coeffs = vec![MultiPoly::zero(space); order];
        coeffs.push(poly);
        HbarPoly { space, coeffs }.trimmed()
    }

    pub fn from_coeffs(space: VarSpace, coeffs: Vec<MultiPoly>) -> Self {
        HbarPoly { space, coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(MultiPoly::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    /// Coefficient of `hbar^k` (zero beyond the stored range).
    pub fn coeff(&self, k: usize) -> MultiPoly {
        self.coeffs.get(k).cloned().unwrap_or_else(|| MultiPoly::zero(self.space))
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    /// One past the highest order with a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn add(&self, other: &HbarPoly) -> HbarPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect();
        HbarPoly { space: self.space, coeffs }.trimmed()
    }

    pub fn sub(&self, other: &HbarPoly) -> HbarPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> HbarPoly {
        self.map(|c| -c)
    }

    pub fn scale(&self, k: &CRational) -> HbarPoly {
        self.map(|c| c.scale(k))
    }

    pub fn mul_poly(&self, p: &MultiPoly) -> HbarPoly {
        self.map(|c| c * p)
    }

    /// Multiplication by `hbar^k`.
    pub fn shift(&self, k: usize) -> HbarPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![MultiPoly::zero(self.space); k];
        coeffs.extend(self.coeffs.iter().cloned());
        HbarPoly { space: self.space, coeffs }
    }

    pub fn diff(&self, v: Var) -> HbarPoly {
        self.map(|c| c.diff(v))
    }

    fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> HbarPoly {
        HbarPoly { space: self.space, coeffs: self.coeffs.iter().map(f).collect() }.trimmed()
    }

    pub fn eval(&self, point: &[f64], hbar: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * hbar + c.eval(point);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_and_eval() {
        let sp = VarSpace::new(1);
        let x = MultiPoly::var(sp, sp.x(0));
        let h = HbarPoly::at_order(x.clone(), 1).add(&HbarPoly::at_order(MultiPoly::one(sp), 0));
        // 1 + hbar x at x = 2, hbar = 0.5
        assert_eq!(h.eval(&[2.0, 0.0, 0.0], 0.5), Complex64::new(2.0, 0.0));
        assert_eq!(h.shift(2).len(), 4);
        assert!(h.sub(&h).is_zero());
    }
}
