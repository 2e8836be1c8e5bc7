use proptest::prelude::*;
use wigner_kirkwood::moment::{
    bloch_matrix_from_spectrum, first_correction_order, fourier_potential, hbar_scaling_fit,
    momentum_hermite_functions, ode_residual_check, MomentError, MomentumBlochMatrix,
    MomentumGrid,
};
use wigner_kirkwood::oracle::{harmonic_z, solve_spectrum, BasisSpec};
use wigner_kirkwood::poly::{CRational, Rational};
use wigner_kirkwood::PotentialSpec;

#[test]
fn yang_mills_operator() {
    // (g^2/2) x^2 y^2 -> (g^2/2) hbar^4 d^2_x d^2_y
    for g_sq in [1, 2, 5] {
        let op = fourier_potential(&PotentialSpec::yang_mills(Rational::from_integer(g_sq)));
        assert_eq!(op.terms.len(), 1);
        assert_eq!(op.terms[0].coeff, CRational::real(Rational::new(g_sq, 2)));
        assert_eq!(op.terms[0].hbar_power, 4);
        assert_eq!(op.terms[0].alpha, vec![2, 2]);
    }
    assert_eq!(first_correction_order(&PotentialSpec::yang_mills(Rational::one())), Ok(4));
    assert_eq!(first_correction_order(&PotentialSpec::harmonic(Rational::one())), Ok(2));
    assert_eq!(first_correction_order(&PotentialSpec::quartic()), Ok(4));
    assert_eq!(first_correction_order(&PotentialSpec::zero(2)), Err(MomentError::ZeroPotential));
}

#[test]
fn momentum_eigenfunctions_are_normalized() {
    let grid = MomentumGrid::new(1, 128, 12.0).unwrap();
    let phi = momentum_hermite_functions(&grid.axis, 20, 1.7, 0.8);
    for n in 0..20 {
        let norm: f64 = phi.column(n).iter().map(|v| v * v).sum::<f64>() * grid.spacing;
        assert!((norm - 1.0).abs() < 1e-10, "level {n}: {norm}");
    }
}

#[test]
fn harmonic_bloch_matrix() {
    let pot = PotentialSpec::harmonic(Rational::one());
    let s = solve_spectrum(&pot, &BasisSpec::new(40, 1.0, 1.0).unwrap(), 10).unwrap();
    let grid = MomentumGrid::new(1, 64, 8.0).unwrap();
    let times = [0.5, 0.505, 0.51, 1.0, 2.0];
    let a = bloch_matrix_from_spectrum(&s, &grid, &times, 1e-8).unwrap();
    for (k, &t) in times.iter().enumerate() {
        assert!((a.trace(k) / harmonic_z(1.0, t) - 1.0).abs() < 1e-4);
    }
    assert!(a.hermiticity_defect() <= 1e-12);
    assert!(a.diagonal_positive(1e-12));
}

#[test]
fn free_kernel_satisfies_the_free_equation() {
    let grid = MomentumGrid::new(1, 41, 4.0).unwrap();
    let a = MomentumBlochMatrix::free(grid, &[1.0 - 1e-4, 1.0, 1.0 + 1e-4], 1.0);
    let op = fourier_potential(&PotentialSpec::zero(1));
    assert!(ode_residual_check(&a, &op).unwrap().max_relative < 1e-6);
}

#[test]
fn harmonic_ode_residual() {
    let pot = PotentialSpec::harmonic(Rational::one());
    let s = solve_spectrum(&pot, &BasisSpec::new(40, 1.0, 1.0).unwrap(), 10).unwrap();
    let grid = MomentumGrid::new(1, 64, 8.0).unwrap();
    let op = fourier_potential(&pot);
    for t in [0.5, 1.0, 2.0] {
        let a = bloch_matrix_from_spectrum(&s, &grid, &[t - 1e-3, t, t + 1e-3], 1e-8).unwrap();
        let r = ode_residual_check(&a, &op).unwrap();
        assert!(r.max_relative <= 1e-3, "t={t}: {}", r.max_relative);
    }
}

#[test]
fn boxed_yang_mills_ode_residual() {
    // the finite basis confines the channels; the floor comes from basis truncation
    let pot = PotentialSpec::yang_mills(Rational::one());
    let s = solve_spectrum(&pot, &BasisSpec::new(28, 1.5, 1.0).unwrap(), 0).unwrap();
    let grid = MomentumGrid::new(2, 48, 9.0).unwrap();
    let a = bloch_matrix_from_spectrum(&s, &grid, &[1.998, 2.0, 2.002], f64::INFINITY).unwrap();
    assert!(a.hermiticity_defect() <= 1e-12);
    let r = ode_residual_check(&a, &fourier_potential(&pot)).unwrap();
    assert!(r.max_relative <= 1e-2, "{}", r.max_relative);
}

#[test]
fn relative_correction_scales_as_hbar_squared() {
    let ho = hbar_scaling_fit(
        &PotentialSpec::harmonic(Rational::one()),
        1.0,
        &[0.4, 0.2, 0.1],
        40,
        40,
        1e-8,
    )
    .unwrap();
    assert!((ho.exponent - 2.0).abs() < 0.02, "{}", ho.exponent);

    let quartic =
        hbar_scaling_fit(&PotentialSpec::quartic(), 1.0, &[0.5, 0.25], 80, 300, 1e-8).unwrap();
    // r(hbar) / hbar^2 between hbar and hbar/2 approaches 1
    let ratio = quartic.relative_corrections[0] / (4.0 * quartic.relative_corrections[1]);
    assert!((ratio - 1.0).abs() < 0.15, "{ratio}");
    assert!(quartic.relative_corrections.iter().all(|r| *r < 0.0));
}

fn random_potential() -> impl Strategy<Value = PotentialSpec> {
    (1usize..=3)
        .prop_flat_map(|n| {
            let term = (1i64..5, prop::collection::vec(0u32..=2, n))
                .prop_map(|(c, half)| (Rational::from_integer(c), half.iter().map(|e| 2 * e).collect::<Vec<_>>()));
            (Just(n), prop::collection::vec(term, 1..4))
        })
        .prop_map(|(n, terms)| PotentialSpec::from_monomials(n, &terms).unwrap())
}

proptest! {
    #[test]
    fn operator_hbar_power_is_derivative_order(pot in random_potential()) {
        let op = fourier_potential(&pot);
        for t in &op.terms {
            prop_assert_eq!(t.hbar_power, t.alpha.iter().sum::<u32>());
            prop_assert!(!t.coeff.is_zero());
        }
        // independent degree count over the potential polynomial
        let sp = pot.space();
        let min_degree = pot
            .v()
            .terms()
            .map(|(m, _)| sp.xs().iter().map(|v| m.exponents()[v.0]).sum::<u32>())
            .filter(|&d| d > 0)
            .min();
        match min_degree {
            Some(d) => prop_assert_eq!(first_correction_order(&pot), Ok(d)),
            None => prop_assert_eq!(first_correction_order(&pot), Err(MomentError::ZeroPotential)),
        }
    }
}
