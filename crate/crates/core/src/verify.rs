//! Named verification suites with pass/fail checks against fixed tolerances.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::moment::{
    bloch_matrix_from_spectrum, first_correction_order, fourier_potential, ode_residual_check,
    MomentError, MomentumGrid,
};
use crate::oracle::{
    converged_z_exact, default_omega, harmonic_z, solve_spectrum, BasisSpec, OracleError,
};
use crate::poly::{MultiPoly, Rational};
use crate::potential::PotentialSpec;
use crate::psint::{assemble_z, spatial_integral, PsintError, SpatialDomain, TGrid};
use crate::sampling::{sample_hbars, sample_points, DEFAULT_SAMPLE_COUNT};
use crate::wk::{
    form_equivalence_check, no_stationary_solution_check, stationary_planewave_check,
    ub_residual, wk_recursion, FormOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyCase {
    Ho,
    Quartic,
    Ymqm,
    Forms,
    Stationary,
    Momentum,
}

impl VerifyCase {
    pub const ALL: [VerifyCase; 6] = [
        VerifyCase::Ho,
        VerifyCase::Quartic,
        VerifyCase::Ymqm,
        VerifyCase::Forms,
        VerifyCase::Stationary,
        VerifyCase::Momentum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerifyCase::Ho => "ho",
            VerifyCase::Quartic => "quartic",
            VerifyCase::Ymqm => "ymqm",
            VerifyCase::Forms => "forms",
            VerifyCase::Stationary => "stationary",
            VerifyCase::Momentum => "momentum",
        }
    }
}

impl fmt::Display for VerifyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerifyCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VerifyCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown case `{s}` (expected one of ho, quartic, ymqm, forms, stationary, momentum)"))
    }
}

/// A numerical step failed before the checks could be evaluated.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Psint(#[from] PsintError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Moment(#[from] MomentError),
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckResult { name: name.into(), value, tolerance, passed: value <= tolerance }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        CheckResult { name: name.into(), value: f64::from(u8::from(!ok)), tolerance: 0.0, passed: ok }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub case: VerifyCase,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "[{status}] {}/{}: {:e} (tolerance {:e})", self.case, c.name, c.value, c.tolerance)?;
        }
        Ok(())
    }
}

pub fn run_case(case: VerifyCase, seed: u64) -> Result<VerifyReport, VerifyError> {
    let checks = match case {
        VerifyCase::Ho => harmonic()?,
        VerifyCase::Quartic => quartic()?,
        VerifyCase::Ymqm => yang_mills()?,
        VerifyCase::Forms => forms(seed),
        VerifyCase::Stationary => stationary(seed),
        VerifyCase::Momentum => momentum()?,
    };
    Ok(VerifyReport { case, checks })
}

fn residual_checks(potential: &PotentialSpec, order: usize, label: &str) -> CheckResult {
    let series = wk_recursion(potential, order);
    CheckResult::holds(
        format!("{label}-residual-zero-through-order-{order}"),
        ub_residual(&series).vanishes_through(order),
    )
}

fn odd_order_ratio(z: &crate::psint::ZSeries) -> f64 {
    (1..=z.order)
        .step_by(2)
        .flat_map(|k| (0..z.grid.len()).map(move |i| (k, i)))
        .map(|(k, i)| (z.zk[k][i] / z.zk[0][i]).abs())
        .fold(0.0, f64::max)
}

fn harmonic() -> Result<Vec<CheckResult>, VerifyError> {
    let v = PotentialSpec::harmonic(Rational::one());
    let hbar = 1.0;
    let grid = TGrid::linear(0.01, 0.1, 10)?;
    let z = assemble_z(&wk_recursion(&v, 4), hbar, &grid, &SpatialDomain::full_space())?;
    let second = z.relative_correction(2);
    let second_err = grid
        .values()
        .iter()
        .zip(&second)
        .map(|(t, r)| (r + (hbar * t).powi(2) / 24.0).abs())
        .fold(0.0, f64::max);
    let sum_err = grid
        .values()
        .iter()
        .zip(&z.zsum)
        .map(|(&t, s)| (s / harmonic_z(hbar, t) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        residual_checks(&v, 6, "ho"),
        CheckResult::at_most("second-order-relative-correction", second_err, 1e-10),
        CheckResult::at_most("zsum-k4-vs-exact", sum_err, 1e-6),
        CheckResult::at_most("odd-orders-vanish", odd_order_ratio(&z), 1e-10),
        CheckResult::holds("first-correction-order-2", first_correction_order(&v)? == 2),
    ])
}

fn quartic() -> Result<Vec<CheckResult>, VerifyError> {
    let v = PotentialSpec::quartic();
    let mut checks = vec![residual_checks(&v, 6, "quartic")];

    let one = MultiPoly::one(v.space());
    let full = SpatialDomain::full_space();
    let z1 = spatial_integral(&one, &v, 1.0, &full)?;
    let z2 = spatial_integral(&one, &v, 2.0, &full)?;
    let exponent = (z2 / z1).log2();
    checks.push(CheckResult::at_most("spatial-scaling-exponent", (exponent + 0.25).abs(), 1e-8));

    let basis = BasisSpec::new(60, 3.0, 1.0)?;
    let s = solve_spectrum(&v, &basis, 20)?;
    checks.push(CheckResult::at_most(
        "ground-state-energy",
        (s.eigenvalues[0] - 0.667_986_259_155_777).abs(),
        1e-8,
    ));

    // error ratios between hbar and hbar/2 at t = 0.2, absolute and relative
    let grid = TGrid::single(0.2)?;
    let series = wk_recursion(&v, 2);
    let mut abs = Vec::new();
    let mut rel = Vec::new();
    for hbar in [0.5, 0.25] {
        let omega = default_omega(&v, 80, hbar);
        let exact = converged_z_exact(&v, BasisSpec::new(80, omega, hbar)?, &grid, 20, 300, 1e-8)?;
        let z = assemble_z(&series, hbar, &grid, &full)?;
        checks.push(CheckResult::at_most("odd-orders-vanish", odd_order_ratio(&z), 1e-10));
        let e = exact.z.values[0];
        let err = [(z.partial_sum(0)[0] - e).abs(), (z.partial_sum(2)[0] - e).abs()];
        abs.push(err);
        rel.push(err.map(|x| x / e));
    }
    for (j, k) in [0usize, 2].into_iter().enumerate() {
        let target = 2f64.powi(k as i32 + 2);
        for (label, errs) in [("absolute", &abs), ("relative", &rel)] {
            let ratio = errs[0][j] / errs[1][j];
            checks.push(CheckResult::at_most(
                format!("{label}-error-ratio-k{k}"),
                (ratio / target - 1.0).abs(),
                0.2,
            ));
        }
    }
    Ok(checks)
}

fn yang_mills() -> Result<Vec<CheckResult>, VerifyError> {
    let v = PotentialSpec::yang_mills(Rational::one());
    let mut checks = vec![residual_checks(&v, 4, "ymqm")];
    let one = MultiPoly::one(v.space());
    let rejected = matches!(
        spatial_integral(&one, &v, 1.0, &SpatialDomain::full_space()),
        Err(PsintError::NonIntegrable { .. })
    );
    checks.push(CheckResult::holds("full-space-rejected", rejected));
    let boxed = SpatialDomain::boxed(vec![2.0, 2.0])?;
    let z = assemble_z(&wk_recursion(&v, 3), 0.5, &TGrid::linear(0.5, 1.0, 3)?, &boxed)?;
    checks.push(CheckResult::at_most("boxed-odd-orders-vanish", odd_order_ratio(&z), 1e-10));
    checks.push(CheckResult::holds("first-correction-order-4", first_correction_order(&v)? == 4));
    let s = solve_spectrum(&v, &BasisSpec::new(16, 1.0, 1.0)?, 0)?;
    checks.push(CheckResult::holds(
        "basis-regularized-spectrum-positive",
        s.eigenvalues.iter().all(|e| *e > 0.0),
    ));
    Ok(checks)
}

fn forms(seed: u64) -> Vec<CheckResult> {
    let x_sq = PotentialSpec::from_monomials(1, &[(Rational::one(), vec![2])]).expect("valid");
    let ym = PotentialSpec::yang_mills(Rational::one());
    let mut checks = Vec::new();
    for (label, v) in [("x1^2", x_sq), ("ymqm", ym)] {
        let sp = v.space();
        let testfn = &(&MultiPoly::var(sp, sp.x(0)) * &MultiPoly::var(sp, sp.p(0)))
            + wk_recursion(&v, 2).term(2);
        let points = sample_points(sp, DEFAULT_SAMPLE_COUNT, seed);
        let hbars = sample_hbars(DEFAULT_SAMPLE_COUNT, seed);
        for total in [false, true] {
            let opts = FormOptions { fpe_total_energy: total };
            let worst = form_equivalence_check(&v, &testfn, &points, &hbars, opts)
                .iter()
                .map(|r| r.max_residual)
                .fold(0.0, f64::max);
            let gauge = if total { "total-energy" } else { "potential" };
            checks.push(CheckResult::at_most(format!("{label}-{gauge}-gauge"), worst, 1e-10));
        }
    }
    checks
}

fn stationary(seed: u64) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    for n in 1..=3 {
        let sp = crate::poly::VarSpace::new(n);
        let worst = sample_points(sp, DEFAULT_SAMPLE_COUNT, seed)
            .iter()
            .zip(sample_hbars(DEFAULT_SAMPLE_COUNT, seed))
            .map(|(pt, h)| stationary_planewave_check(&pt[n..2 * n], h))
            .fold(0.0, f64::max);
        checks.push(CheckResult { name: format!("planewave-kernel-n{n}"), value: worst, tolerance: 0.0, passed: worst == 0.0 });
    }
    let potentials = [
        ("ho", PotentialSpec::harmonic(Rational::one())),
        ("quartic", PotentialSpec::quartic()),
        ("ymqm", PotentialSpec::yang_mills(Rational::one())),
    ];
    for (label, v) in potentials {
        let samples = sample_points(v.space(), DEFAULT_SAMPLE_COUNT, seed);
        let verdict = no_stationary_solution_check(&v, &samples, 0.5);
        checks.push(CheckResult::holds(format!("no-stationary-solution-{label}"), verdict.confirms_claim()));
    }
    checks
}

fn momentum() -> Result<Vec<CheckResult>, VerifyError> {
    let v = PotentialSpec::harmonic(Rational::one());
    let s = solve_spectrum(&v, &BasisSpec::new(40, 1.0, 1.0)?, 0)?;
    let grid = MomentumGrid::new(1, 64, 8.0)?;
    let dt = 1e-3;
    let times = [1.0 - dt, 1.0, 1.0 + dt];
    let a = bloch_matrix_from_spectrum(&s, &grid, &times, 1e-8)?;
    let trace_err = (0..times.len())
        .map(|k| (a.trace(k) - harmonic_z(1.0, times[k])).abs())
        .fold(0.0, f64::max);
    let residual = ode_residual_check(&a, &fourier_potential(&v))?;
    Ok(vec![
        CheckResult::at_most("trace-vs-exact", trace_err, 1e-4),
        CheckResult::at_most("hermiticity", a.hermiticity_defect(), 1e-12),
        CheckResult::holds("diagonal-positive", a.diagonal_positive(1e-12)),
        CheckResult::at_most("ode-residual", residual.max_relative, 1e-3),
    ])
}
