//! Semiclassical Wigner-Kirkwood expansion of the quantum partition function
//! `Z(t) = Tr exp(-t H)` for even polynomial potentials.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`]: exact sparse polynomials over complex rationals in the
//!   phase-space variables `(x, p, t)`.
//! * [`wk`]: the correction polynomials `W_k`, the residual of the
//!   evolution equation they solve, and numerical checks of its equivalent
//!   operator forms.
//! * [`psint`]: phase-space integration: Gaussian momentum moments and
//!   adaptive spatial quadrature, producing `Z_k(t)`.
//! * [`moment`]: the momentum representation: the Fourier-transformed
//!   potential as a derivative-of-delta operator and the momentum-space
//!   Bloch matrix.
//! * [`oracle`]: exact spectra by harmonic-oscillator basis
//!   diagonalization, giving the reference `Z(t)`.
//! * [`verify`]: named pass/fail suites over the modules above.
//!
//! ```
//! use wigner_kirkwood::{potential, wk};
//!
//! // V = x^2 / 2 in one dimension
//! let v = potential::parse_json(r#"{"dim": 1, "terms": [{"coeff": "1/2", "exponents": [2]}]}"#)
//!     .unwrap();
//! let series = wk::wk_recursion(&v, 2);
//! assert_eq!(series.terms().len(), 3);
//! assert!(wk::ub_residual(&series).vanishes_through(2));
//! ```

pub mod moment;
pub mod oracle;
pub mod poly;
pub mod potential;
pub mod psint;
pub mod sampling;
pub mod verify;
pub mod wk;

pub use poly::{CRational, MultiPoly, Rational, Var, VarSpace};
pub use potential::PotentialSpec;
