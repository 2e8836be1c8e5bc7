//! Equivalent rewritings of the evolution equation for `W`.
//!
//! Every form predicts `dW/dt` for an arbitrary polynomial `W`. Forms that
//! pass through a transformed function (`W' = e^{-tV} W` and friends) carry
//! the exponential prefactor as a [`Gauged`] value, so derivatives follow the
//! product rule exactly and the prefactor cancels symbolically before any
//! number is evaluated.

use num_complex::Complex64;
use serde::Serialize;

use crate::poly::{CRational, MultiPoly, Rational, Var};
use crate::potential::PotentialSpec;

use super::hbar::HbarPoly;
use super::recursion::{covariant_derivative, drift_part, second_order_part, Coefficients};

/// The rewritings that are compared against each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormId {
    /// Expanded gradient form.
    UbEquation,
    /// `1/2 [(hbar D + i p)^2 + p^2] W` with `D = grad - t grad V`.
    Covariant,
    /// Drift-diffusion equation for `W' = e^{-tV} W` with a `-V W'` sink.
    FokkerPlanck,
    /// Continuity equation for `W'` with current `-i hbar p W' - hbar^2/2 grad W'`.
    ContinuityFlux,
    /// `e^{tH} L_FP e^{-tH} W`.
    Conjugated,
    /// `e^{tH} div J` with `J = hbar^2/2 (grad + 2i p / hbar) e^{-tH} W`.
    ConjugatedFlux,
    /// `1/2 e^{tH} (p^2 - P^2) e^{-tH} W` with `P = p - i hbar grad`.
    BlochSchrodinger,
    /// Symmetrised derivative `grad - (t/2) grad V` acting on `e^{-tV/2} W`.
    Supersymmetric,
}

impl FormId {
    pub const ALL: [FormId; 8] = [
        FormId::UbEquation,
        FormId::Covariant,
        FormId::FokkerPlanck,
        FormId::ContinuityFlux,
        FormId::Conjugated,
        FormId::ConjugatedFlux,
        FormId::BlochSchrodinger,
        FormId::Supersymmetric,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FormId::UbEquation => "ub-equation",
            FormId::Covariant => "covariant",
            FormId::FokkerPlanck => "fokker-planck",
            FormId::ContinuityFlux => "continuity-flux",
            FormId::Conjugated => "conjugated",
            FormId::ConjugatedFlux => "conjugated-flux",
            FormId::BlochSchrodinger => "bloch-schrodinger",
            FormId::Supersymmetric => "supersymmetric",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FormOptions {
    /// Gauge the drift-diffusion form with the total energy `H = p^2/2 + V`
    /// instead of `V`.
    pub fpe_total_energy: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorFormReport {
    pub form: FormId,
    /// Largest `|form - other|` over all other forms and all samples.
    pub max_residual: f64,
    pub samples: usize,
}

/// `e^{exponent} * body`.
#[derive(Clone, Debug)]
struct Gauged {
    exponent: MultiPoly,
    body: HbarPoly,
}

impl Gauged {
    fn new(exponent: MultiPoly, body: HbarPoly) -> Self {
        Gauged { exponent, body }
    }

    fn d(&self, v: Var) -> Gauged {
        let body = self.body.diff(v).add(&self.body.mul_poly(&self.exponent.diff(v)));
        Gauged::new(self.exponent.clone(), body)
    }

    fn times_exp(&self, f: &MultiPoly) -> Gauged {
        Gauged::new(&self.exponent + f, self.body.clone())
    }

    fn add(&self, other: &Gauged) -> Gauged {
        assert_eq!(self.exponent, other.exponent, "adding differently gauged terms");
        Gauged::new(self.exponent.clone(), self.body.add(&other.body))
    }

    fn map(&self, f: impl Fn(&HbarPoly) -> HbarPoly) -> Gauged {
        Gauged::new(self.exponent.clone(), f(&self.body))
    }

    fn into_plain(self) -> HbarPoly {
        assert!(self.exponent.is_zero(), "exponential prefactor did not cancel");
        self.body
    }
}

fn half() -> CRational {
    CRational::real(Rational::new(1, 2))
}

/// `L_FP g = hbar^2/2 lap g + i hbar p . grad g`
fn fokker_planck_op(pot: &PotentialSpec, g: &Gauged) -> Gauged {
    let sp = pot.space();
    let mut out = g.map(|b| HbarPoly::zero(b.space()));
    for (i, x) in sp.xs().into_iter().enumerate() {
        let dg = g.d(x);
        let second = dg.d(x).map(|b| b.scale(&half()).shift(2));
        let first = dg.map(|b| b.mul_poly(&p_var(pot, i)).scale(&CRational::i()).shift(1));
        out = out.add(&second).add(&first);
    }
    out
}

fn p_var(pot: &PotentialSpec, i: usize) -> MultiPoly {
    let sp = pot.space();
    MultiPoly::var(sp, sp.p(i))
}

fn p_squared(pot: &PotentialSpec) -> MultiPoly {
    (0..pot.dim()).map(|i| &p_var(pot, i) * &p_var(pot, i)).sum()
}

/// Classical Hamiltonian `p^2/2 + V`.
fn hamiltonian(pot: &PotentialSpec) -> MultiPoly {
    &p_squared(pot).scale(&half()) + pot.v()
}

fn times_t(pot: &PotentialSpec, f: &MultiPoly, k: &Rational) -> MultiPoly {
    f.mul_var(pot.space().t(), 1).scale_rational(k)
}

fn ub_equation(pot: &PotentialSpec, w: &MultiPoly) -> HbarPoly {
    let c = Coefficients::new(pot);
    let second = second_order_part(pot, &c, w).scale(&half());
    let first = drift_part(pot, &c, w).mul_i();
    HbarPoly::at_order(second, 2).add(&HbarPoly::at_order(first, 1))
}

fn covariant(pot: &PotentialSpec, w: &MultiPoly) -> HbarPoly {
    let sp = pot.space();
    let cov = |f: &HbarPoly, i: usize| {
        HbarPoly::from_coeffs(
            sp,
            f.coeffs().iter().map(|c| covariant_derivative(pot, c, i)).collect(),
        )
    };
    let w = HbarPoly::at_order(w.clone(), 0);
    let mut out = w.mul_poly(&p_squared(pot));
    for i in 0..sp.dim() {
        let ip = p_var(pot, i).mul_i();
        let g = cov(&w, i).shift(1).add(&w.mul_poly(&ip));
        let h = cov(&g, i).shift(1).add(&g.mul_poly(&ip));
        out = out.add(&h);
    }
    out.scale(&half())
}

/// `dW/dt = G W + e^{tG} (L_FP W' - G W')` with `W' = e^{-tG} W`.
fn fokker_planck(pot: &PotentialSpec, w: &MultiPoly, total_energy: bool) -> HbarPoly {
    let gauge = if total_energy { hamiltonian(pot) } else { pot.v().clone() };
    let exponent = times_t(pot, &gauge, &Rational::from_integer(-1));
    let wp = Gauged::new(exponent.clone(), HbarPoly::at_order(w.clone(), 0));
    let sink = wp.map(|b| b.mul_poly(&gauge).neg());
    let dwp_dt = fokker_planck_op(pot, &wp).add(&sink);
    let back = dwp_dt.times_exp(&-&exponent).into_plain();
    back.add(&HbarPoly::at_order(&gauge * w, 0))
}

fn continuity_flux(pot: &PotentialSpec, w: &MultiPoly) -> HbarPoly {
    let sp = pot.space();
    let exponent = times_t(pot, pot.v(), &Rational::from_integer(-1));
    let wp = Gauged::new(exponent.clone(), HbarPoly::at_order(w.clone(), 0));
    let mut div = wp.map(|b| HbarPoly::zero(b.space()));
    for (i, x) in sp.xs().into_iter().enumerate() {
        let advective = wp.map(|b| b.mul_poly(&p_var(pot, i)).scale(&-CRational::i()).shift(1));
        let diffusive = wp.d(x).map(|b| b.scale(&-half()).shift(2));
        let current = advective.add(&diffusive);
        div = div.add(&current.d(x));
    }
    let dwp_dt = div.map(HbarPoly::neg).add(&wp.map(|b| b.mul_poly(pot.v()).neg()));
    let back = dwp_dt.times_exp(&-&exponent).into_plain();
    back.add(&HbarPoly::at_order(pot.v() * w, 0))
}

fn energy_gauged(pot: &PotentialSpec, w: &MultiPoly) -> (MultiPoly, Gauged) {
    let exponent = times_t(pot, &hamiltonian(pot), &Rational::from_integer(-1));
    let g = Gauged::new(exponent.clone(), HbarPoly::at_order(w.clone(), 0));
    (exponent, g)
}

fn conjugated(pot: &PotentialSpec, w: &MultiPoly) -> HbarPoly {
    let (exponent, g) = energy_gauged(pot, w);
    fokker_planck_op(pot, &g).times_exp(&-&exponent).into_plain()
}

fn conjugated_flux(pot: &PotentialSpec, w: &MultiPoly) -> HbarPoly {
    let sp = pot.space();
    let (exponent, g) = energy_gauged(pot, w);
    let mut div = g.map(|b| HbarPoly::zero(b.space()));
    for (i, x) in sp.xs().into_iter().enumerate() {
        let grad_part = g.d(x).map(|b| b.scale(&half()).shift(2));
        let drift = g.map(|b| b.mul_poly(&p_var(pot, i)).scale(&CRational::i()).shift(1));
        div = div.add(&grad_part.add(&drift).d(x));
    }
    div.times_exp(&-&exponent).into_plain()
}

fn bloch_schrodinger(pot: &PotentialSpec, w: &MultiPoly) -> HbarPoly {
    let sp = pot.space();
    let (exponent, g) = energy_gauged(pot, w);
    // P_i f = p_i f - i hbar df/dx_i
    let momentum_op = |f: &Gauged, i: usize, x: Var| {
        let pf = f.map(|b| b.mul_poly(&p_var(pot, i)));
        let grad = f.d(x).map(|b| b.scale(&-CRational::i()).shift(1));
        pf.add(&grad)
    };
    let mut p_hat_sq = g.map(|b| HbarPoly::zero(b.space()));
    for (i, x) in sp.xs().into_iter().enumerate() {
        p_hat_sq = p_hat_sq.add(&momentum_op(&momentum_op(&g, i, x), i, x));
    }
    let classical = g.map(|b| b.mul_poly(&p_squared(pot)));
    let diff = classical.add(&p_hat_sq.map(HbarPoly::neg));
    diff.map(|b| b.scale(&half())).times_exp(&-&exponent).into_plain()
}

fn supersymmetric(pot: &PotentialSpec, w: &MultiPoly) -> HbarPoly {
    let sp = pot.space();
    let half_tv = times_t(pot, pot.v(), &Rational::new(1, 2));
    let neg_half_tv = -&half_tv;
    // D~_i f = e^{tV/2} d/dx_i (e^{-tV/2} f)
    let sym_d = |f: &Gauged, x: Var| f.times_exp(&neg_half_tv).d(x).times_exp(&half_tv);
    let wt = Gauged::new(neg_half_tv.clone(), HbarPoly::at_order(w.clone(), 0));
    let mut rhs = wt.map(|b| b.mul_poly(pot.v()).scale(&-half()));
    for (i, x) in sp.xs().into_iter().enumerate() {
        let d1 = sym_d(&wt, x);
        let d2 = sym_d(&d1, x).map(|b| b.scale(&half()).shift(2));
        let drift = d1.map(|b| b.mul_poly(&p_var(pot, i)).scale(&CRational::i()).shift(1));
        rhs = rhs.add(&d2).add(&drift);
    }
    let back = rhs.times_exp(&half_tv).into_plain();
    back.add(&HbarPoly::at_order(pot.v().scale(&half()) * w.clone(), 0))
}

/// Symbolic `dW/dt` predicted by one form.
pub fn apply_form(
    form: FormId,
    potential: &PotentialSpec,
    testfn: &MultiPoly,
    options: FormOptions,
) -> HbarPoly {
    match form {
        FormId::UbEquation => ub_equation(potential, testfn),
        FormId::Covariant => covariant(potential, testfn),
        FormId::FokkerPlanck => fokker_planck(potential, testfn, options.fpe_total_energy),
        FormId::ContinuityFlux => continuity_flux(potential, testfn),
        FormId::Conjugated => conjugated(potential, testfn),
        FormId::ConjugatedFlux => conjugated_flux(potential, testfn),
        FormId::BlochSchrodinger => bloch_schrodinger(potential, testfn),
        FormId::Supersymmetric => supersymmetric(potential, testfn),
    }
}

/// Evaluates every form at `points` (one `hbar` per point) and reports, per
/// form, the largest disagreement with any other form.
pub fn form_equivalence_check(
    potential: &PotentialSpec,
    testfn: &MultiPoly,
    points: &[Vec<f64>],
    hbars: &[f64],
    options: FormOptions,
) -> Vec<OperatorFormReport> {
    assert_eq!(points.len(), hbars.len(), "one hbar per sample point");
    let predictions: Vec<HbarPoly> = FormId::ALL
        .iter()
        .map(|&f| apply_form(f, potential, testfn, options))
        .collect();
    let values: Vec<Vec<Complex64>> = predictions
        .iter()
        .map(|pred| points.iter().zip(hbars).map(|(pt, &h)| pred.eval(pt, h)).collect())
        .collect();
    FormId::ALL
        .iter()
        .enumerate()
        .map(|(a, &form)| {
            let max_residual = values
                .iter()
                .flat_map(|other| {
                    other.iter().zip(&values[a]).map(|(u, v)| (u - v).norm())
                })
                .fold(0.0, f64::max);
            OperatorFormReport { form, max_residual, samples: points.len() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarSpace;
    use crate::sampling::{sample_hbars, sample_points};

    fn x_sq() -> PotentialSpec {
        PotentialSpec::from_monomials(1, &[(Rational::one(), vec![2])]).unwrap()
    }

    #[test]
    fn all_forms_agree_symbolically() {
        let pot = PotentialSpec::yang_mills(Rational::one());
        let sp = pot.space();
        let w = &(&MultiPoly::var(sp, sp.x(0)) * &MultiPoly::var(sp, sp.p(1)))
            * &MultiPoly::var(sp, sp.t());
        let reference = apply_form(FormId::UbEquation, &pot, &w, FormOptions::default());
        for form in FormId::ALL {
            for total in [false, true] {
                let opts = FormOptions { fpe_total_energy: total };
                assert_eq!(apply_form(form, &pot, &w, opts), reference, "{form:?}");
            }
        }
    }

    #[test]
    fn free_constant_has_no_evolution() {
        let pot = PotentialSpec::zero(1);
        let sp = VarSpace::new(1);
        let pts = sample_points(sp, 8, 1);
        let hs = sample_hbars(8, 1);
        for form in FormId::ALL {
            let pred = apply_form(form, &pot, &MultiPoly::one(sp), FormOptions::default());
            assert!(pred.is_zero(), "{form:?}");
        }
        let reports =
            form_equivalence_check(&pot, &MultiPoly::one(sp), &pts, &hs, FormOptions::default());
        assert!(reports.iter().all(|r| r.max_residual == 0.0));
    }

    #[test]
    fn harmonic_numeric_agreement() {
        let pot = x_sq();
        let sp = pot.space();
        let w = &MultiPoly::var(sp, sp.x(0)) * &MultiPoly::var(sp, sp.p(0));
        let pts = sample_points(sp, 64, 11);
        let hs = sample_hbars(64, 11);
        let reports = form_equivalence_check(&pot, &w, &pts, &hs, FormOptions::default());
        assert_eq!(reports.len(), 8);
        for r in reports {
            assert!(r.max_residual <= 1e-10, "{:?}", r);
        }
    }

    #[test]
    fn flux_divergence_matches_continuity() {
        // d/dt W' + div J' + V W' = 0 with dW'/dt taken from the expanded equation
        let pot = x_sq();
        let sp = pot.space();
        let w = &MultiPoly::var(sp, sp.x(0)) * &MultiPoly::var(sp, sp.t());
        let from_flux = apply_form(FormId::ContinuityFlux, &pot, &w, FormOptions::default());
        let from_ub = apply_form(FormId::UbEquation, &pot, &w, FormOptions::default());
        for (pt, h) in sample_points(sp, 16, 3).iter().zip(sample_hbars(16, 3)) {
            assert!((from_flux.eval(pt, h) - from_ub.eval(pt, h)).norm() <= 1e-10);
        }
    }
}
