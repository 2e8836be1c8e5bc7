use std::f64::consts::PI;

use proptest::prelude::*;
use statrs::function::gamma::gamma;
use wigner_kirkwood::poly::{MultiPoly, Rational};
use wigner_kirkwood::psint::{
    assemble_z, gaussian_closed_form, gaussian_p_moments, spatial_integral, thomas_fermi,
    PsintError, SpatialDomain, TGrid,
};
use wigner_kirkwood::wk::wk_recursion;
use wigner_kirkwood::PotentialSpec;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn quartic_spatial_integral_is_a_gamma_function() {
    // int exp(-t x^4) dx = 2 Gamma(5/4) t^{-1/4}
    let pot = PotentialSpec::quartic();
    let one = MultiPoly::one(pot.space());
    for t in [0.3, 1.0, 2.5] {
        let got = spatial_integral(&one, &pot, t, &SpatialDomain::full_space()).unwrap();
        let want = 2.0 * gamma(1.25) * t.powf(-0.25);
        assert!(rel(got, want) < 1e-8, "t={t}: {got} vs {want}");
    }
    let at_one = spatial_integral(&one, &pot, 1.0, &SpatialDomain::full_space()).unwrap();
    assert!((at_one - 1.8128).abs() < 5e-5);
}

#[test]
fn quartic_even_moments() {
    // int x^{2m} exp(-x^4) dx = Gamma((2m+1)/4) / 2
    let pot = PotentialSpec::quartic();
    let sp = pot.space();
    let x = MultiPoly::var(sp, sp.x(0));
    let mut f = MultiPoly::one(sp);
    for m in 1..=3 {
        f = &(&f * &x) * &x;
        let got = spatial_integral(&f, &pot, 1.0, &SpatialDomain::full_space()).unwrap();
        let want = 0.5 * gamma((2 * m + 1) as f64 / 4.0);
        assert!(rel(got, want) < 1e-8, "m={m}: {got} vs {want}");
    }
}

#[test]
fn thomas_fermi_term() {
    let pot = PotentialSpec::quartic();
    let grid = TGrid::single(1.0).unwrap();
    let z0 = thomas_fermi(&pot, &grid, 1.0, &SpatialDomain::full_space()).unwrap();
    let want = (2.0 * PI).powf(-0.5) * 2.0 * gamma(1.25);
    assert!(rel(z0[0], want) < 1e-8);
    // 0.72320..., quoted to four digits as 0.7231
    assert!((z0[0] - 0.7231).abs() < 1.5e-4);

    let ho = PotentialSpec::harmonic(Rational::from_integer(4));
    let grid = TGrid::linear(0.2, 2.0, 5).unwrap();
    let z0 = thomas_fermi(&ho, &grid, 0.5, &SpatialDomain::full_space()).unwrap();
    for (t, z) in grid.values().iter().zip(z0) {
        assert!(rel(z, 1.0 / (0.5 * 2.0 * t)) < 1e-12);
    }
}

#[test]
fn free_particle_in_a_box() {
    let pot = PotentialSpec::zero(2);
    let domain = SpatialDomain::boxed(vec![1.5, 0.5]).unwrap();
    let grid = TGrid::single(0.7).unwrap();
    let z0 = thomas_fermi(&pot, &grid, 0.9, &domain).unwrap();
    let want = (2.0 * PI * 0.9f64).powi(-2) * (2.0 * PI / 0.7) * 3.0 * 1.0;
    assert!(rel(z0[0], want) < 1e-12);
}

#[test]
fn quartic_leading_term_scaling_exponent() {
    // Z0 ~ t^{-1/2 - 1/4}
    let pot = PotentialSpec::quartic();
    let grid = TGrid::log(0.1, 10.0, 5).unwrap();
    let z0 = thomas_fermi(&pot, &grid, 1.0, &SpatialDomain::full_space()).unwrap();
    let t = grid.values();
    for i in 1..t.len() {
        let slope = (z0[i] / z0[i - 1]).ln() / (t[i] / t[i - 1]).ln();
        assert!((slope + 0.75).abs() < 1e-8, "{slope}");
    }
}

#[test]
fn momentum_moments_match_quadrature() {
    // <p^{2m}> against a direct trapezoid sum
    let pot = PotentialSpec::quartic();
    let sp = pot.space();
    let p = MultiPoly::var(sp, sp.p(0));
    let t = 0.8;
    let mut f = MultiPoly::one(sp);
    for m in 0..4 {
        let g = gaussian_p_moments(&f);
        let analytic = g.prefactor(t) * g.numerator.eval(&[0.0, 0.0, t]).re;
        let h = 1e-3;
        let numeric: f64 = (-20_000..=20_000)
            .map(|i| {
                let q = i as f64 * h;
                q.powi(2 * m) * (-t * q * q / 2.0).exp() * h
            })
            .sum();
        assert!(rel(analytic, numeric) < 1e-10, "m={m}: {analytic} vs {numeric}");
        f = &(&f * &p) * &p;
    }
    let odd = gaussian_p_moments(&p);
    assert!(odd.numerator.is_zero());
}

#[test]
fn gaussian_path_agrees_with_quadrature() {
    let pot = PotentialSpec::from_monomials(
        2,
        &[(Rational::new(3, 2), vec![2, 0]), (Rational::new(1, 3), vec![0, 2])],
    )
    .unwrap();
    let sp = pot.space();
    let x0 = MultiPoly::var(sp, sp.x(0));
    let x1 = MultiPoly::var(sp, sp.x(1));
    let f = &MultiPoly::one(sp) + &(&(&x0 * &x0) * &(&x1 * &x1));
    for t in [0.4, 1.3] {
        let closed = gaussian_closed_form(&f, &pot, t).unwrap();
        let quad = spatial_integral(&f, &pot, t, &SpatialDomain::full_space().quadrature_only())
            .unwrap();
        assert!(rel(closed, quad) < 1e-8, "{closed} vs {quad}");
    }
}

#[test]
fn harmonic_orders_against_sinh_expansion() {
    // 1/(2 sinh(x/2)) = 1/x - x/24 + 7 x^3/5760 - ...
    let pot = PotentialSpec::harmonic(Rational::from_integer(9));
    let series = wk_recursion(&pot, 4);
    let grid = TGrid::linear(0.01, 0.1, 4).unwrap();
    let hbar = 0.7;
    let z = assemble_z(&series, hbar, &grid, &SpatialDomain::full_space()).unwrap();
    for (i, &t) in grid.values().iter().enumerate() {
        let x = hbar * 3.0 * t;
        assert!(rel(z.zk[0][i], 1.0 / x) < 1e-12);
        assert!(rel(hbar.powi(2) * z.zk[2][i], -x / 24.0) < 1e-10);
        assert!(rel(hbar.powi(4) * z.zk[4][i], 7.0 * x.powi(3) / 5760.0) < 1e-10);
        assert_eq!(z.zk[1][i], 0.0);
        assert_eq!(z.zk[3][i], 0.0);
    }
}

#[test]
fn channel_potential_needs_a_box() {
    let ym = PotentialSpec::yang_mills(Rational::one());
    let series = wk_recursion(&ym, 3);
    let grid = TGrid::single(1.0).unwrap();
    let err = assemble_z(&series, 1.0, &grid, &SpatialDomain::full_space()).unwrap_err();
    assert!(matches!(err, PsintError::NonIntegrable { .. }));
    assert!(err.to_string().contains("--box"));

    let boxed = SpatialDomain::boxed(vec![2.0, 2.0]).unwrap();
    let z = assemble_z(&series, 1.0, &grid, &boxed).unwrap();
    assert!(z.zk[0][0] > 0.0);
    for k in [1, 3] {
        assert!(z.zk[k][0].abs() <= 1e-10 * z.zk[0][0]);
    }
}

#[test]
fn csv_is_bit_reproducible() {
    let pot = PotentialSpec::quartic();
    let series = wk_recursion(&pot, 4);
    let grid = TGrid::log(0.1, 3.0, 6).unwrap();
    let run = || {
        let z = assemble_z(&series, 0.5, &grid, &SpatialDomain::full_space()).unwrap();
        let mut buf = Vec::new();
        z.write_csv(&mut buf, None).unwrap();
        buf
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn partition_sum_decreases_in_t(t0 in 0.2f64..2.0, step in 0.05f64..1.0) {
        let pot = PotentialSpec::quartic();
        let series = wk_recursion(&pot, 4);
        let grid = TGrid::new(vec![t0, t0 + step]).unwrap();
        let z = assemble_z(&series, 0.2, &grid, &SpatialDomain::full_space()).unwrap();
        prop_assert!(z.zsum[1] < z.zsum[0]);
        prop_assert!(z.zk[0].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn quadratic_closed_form_matches_quadrature(w in 0.3f64..3.0, t in 0.1f64..3.0) {
        let pot = PotentialSpec::harmonic(Rational::from_f64_exact(w * w).unwrap());
        let one = MultiPoly::one(pot.space());
        let closed = spatial_integral(&one, &pot, t, &SpatialDomain::full_space()).unwrap();
        let quad = spatial_integral(&one, &pot, t, &SpatialDomain::full_space().quadrature_only()).unwrap();
        prop_assert!(rel(closed, (2.0 * PI / t).sqrt() / w) < 1e-8);
        prop_assert!(rel(closed, quad) < 1e-8);
    }
}
