//! Hand-derived forms shared by the integration tests.

use wigner_kirkwood::poly::{CRational, MultiPoly, Rational, VarSpace};
use wigner_kirkwood::PotentialSpec;

pub fn constant(sp: VarSpace, re: Rational, im: Rational) -> MultiPoly {
    MultiPoly::constant(sp, CRational::new(re, im))
}

pub fn t_pow(sp: VarSpace, k: u32) -> MultiPoly {
    (0..k).fold(MultiPoly::one(sp), |acc, _| &acc * &MultiPoly::var(sp, sp.t()))
}

/// `-(i/2) t^2 (p . grad V)`, written out from the potential's gradient.
pub fn w1_by_hand(pot: &PotentialSpec) -> MultiPoly {
    let sp = pot.space();
    let p_grad: MultiPoly =
        (0..sp.dim()).map(|i| &MultiPoly::var(sp, sp.p(i)) * pot.grad(i)).sum();
    let k = constant(sp, Rational::zero(), Rational::new(-1, 2));
    &(&k * &t_pow(sp, 2)) * &p_grad
}

/// `-(t^2/4) lap V + (t^3/6)(grad V)^2 + (t^3/6) p_i p_j d_i d_j V - (t^4/8)(p . grad V)^2`.
pub fn w2_by_hand(pot: &PotentialSpec) -> MultiPoly {
    let sp = pot.space();
    let n = sp.dim();
    let real = |a, b| constant(sp, Rational::new(a, b), Rational::zero());
    let grad_sq: MultiPoly = (0..n).map(|i| pot.grad(i) * pot.grad(i)).sum();
    let hessian: MultiPoly = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            &(&MultiPoly::var(sp, sp.p(i)) * &MultiPoly::var(sp, sp.p(j)))
                * &pot.grad(i).diff(sp.x(j))
        })
        .sum();
    let p_grad: MultiPoly =
        (0..n).map(|i| &MultiPoly::var(sp, sp.p(i)) * pot.grad(i)).sum();
    let a = &(&real(-1, 4) * &t_pow(sp, 2)) * pot.laplacian();
    let b = &(&real(1, 6) * &t_pow(sp, 3)) * &grad_sq;
    let h = &(&real(1, 6) * &t_pow(sp, 3)) * &hessian;
    let d = &(&real(-1, 8) * &t_pow(sp, 4)) * &(&p_grad * &p_grad);
    a + b + h + d
}
