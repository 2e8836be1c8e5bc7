//! Stationary solutions of the drift-diffusion operator
//! `L_FP = hbar^2/2 lap + i hbar p . grad`.

use serde::Serialize;

use crate::poly::Rational;
use crate::potential::PotentialSpec;

/// `e^{-ikx} L_FP e^{ikx}` for the plane wave with `k = sign * 2 p / hbar`,
/// computed exactly from the binary values of `p` and `hbar`.
///
/// Panics on non-finite input or `hbar <= 0`.
pub fn planewave_symbol(p: &[f64], hbar: f64, sign: i64) -> Rational {
    assert!(hbar > 0.0, "hbar must be positive");
    let h = Rational::from_f64_exact(hbar).expect("finite hbar");
    let two = Rational::from_integer(2);
    let mut k_sq = Rational::zero();
    let mut p_dot_k = Rational::zero();
    for &pi in p {
        let pi = Rational::from_f64_exact(pi).expect("finite momentum");
        let ki = &(&Rational::from_integer(sign) * &(&two * &pi)) / &h;
        k_sq += &(&ki * &ki);
        p_dot_k += &(&pi * &ki);
    }
    // lap -> -k^2 ; i hbar p . grad -> i hbar (i p . k) = -hbar p . k
    let diffusion = -(&(&(&h * &h) / &two) * &k_sq);
    let drift = -(&h * &p_dot_k);
    &diffusion + &drift
}

/// Residual of `L_FP` on `e^{-2 i p . x / hbar}`; exactly zero.
pub fn stationary_planewave_check(p: &[f64], hbar: f64) -> f64 {
    planewave_symbol(p, hbar, -1).abs().to_f64()
}

#[derive(Clone, Debug, Serialize)]
pub struct StationaryVerdict {
    pub potential_vanishes: bool,
    pub samples: usize,
    /// Samples where `(grad ln u)^2 = 2V/hbar^2` fails for `u = e^{ipx/hbar}`.
    pub inconsistent_samples: usize,
}

impl StationaryVerdict {
    /// Whether the samples support "no stationary solution unless `V = 0`".
    pub fn confirms_claim(&self) -> bool {
        self.potential_vanishes || self.inconsistent_samples > 0
    }
}

/// Compares `(grad ln u)^2 = -p^2/hbar^2` with `2 V(x) / hbar^2` at phase
/// points `(x, p, ...)`.
pub fn no_stationary_solution_check(
    potential: &PotentialSpec,
    samples: &[Vec<f64>],
    hbar: f64,
) -> StationaryVerdict {
    let n = potential.dim();
    let inconsistent = samples
        .iter()
        .filter(|pt| {
            let x = &pt[..n];
            let p_sq: f64 = pt[n..2 * n].iter().map(|v| v * v).sum();
            let lhs = -p_sq / (hbar * hbar);
            let rhs = 2.0 * potential.eval_x(x) / (hbar * hbar);
            (lhs - rhs).abs() > 1e-12 * (1.0 + lhs.abs() + rhs.abs())
        })
        .count();
    StationaryVerdict {
        potential_vanishes: potential.is_zero(),
        samples: samples.len(),
        inconsistent_samples: inconsistent,
    }
}
