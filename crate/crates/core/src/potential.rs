//! Even polynomial potentials `V(x)` and their JSON file format.
//!
//! ```json
//! {"dim": 2, "terms": [{"coeff": "1/2", "exponents": [2, 2]}]}
//! ```
//!
//! Coefficients may be JSON numbers or strings; decimal numbers are read
//! exactly from their literal text (`0.1` is `1/10`), strings may also be
//! fractions.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::poly::{CRational, MultiPoly, PolyError, Rational, Var, VarSpace};

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("potential must depend on x only (found a p or t dependence)")]
    NotSpatial,
    #[error("potential must be even under x -> -x")]
    NotEven,
    #[error("potential coefficients must be real")]
    ComplexCoefficient,
    #[error("declared homogeneity degree {declared} but found a monomial of degree {found}")]
    NotHomogeneous { declared: u32, found: u32 },
    #[error("homogeneity degree must be a positive even integer, got {0}")]
    BadHomogeneity(u32),
    #[error("term {index}: expected {expected} exponents, found {found}")]
    ExponentLength { index: usize, expected: usize, found: usize },
    #[error("dimension must be between 1 and 3, got {0}")]
    BadDimension(usize),
    #[error("potential file line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("term {index}: {source}")]
    Coefficient { index: usize, source: PolyError },
}

/// An even polynomial potential with its gradient and Laplacian.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    space: VarSpace,
    v: MultiPoly,
    grad: Vec<MultiPoly>,
    laplacian: MultiPoly,
    homogeneity: Option<u32>,
}

impl PotentialSpec {
    /// Validates `v` and precomputes its derivatives. `homogeneity` is the
    /// declared degree `2N` of a homogeneous potential, if any.
    pub fn new(v: MultiPoly, homogeneity: Option<u32>) -> Result<Self, PotentialError> {
        let space = v.space();
        if !v.depends_only_on(&space.xs()) {
            return Err(PotentialError::NotSpatial);
        }
        if !v.all_real() {
            return Err(PotentialError::ComplexCoefficient);
        }
        let (_, odd) = v.parity_filter(&space.xs());
        if !odd.is_zero() {
            return Err(PotentialError::NotEven);
        }
        if let Some(deg) = homogeneity {
            if deg == 0 || deg % 2 == 1 {
                return Err(PotentialError::BadHomogeneity(deg));
            }
            if let Some((m, _)) = v.terms().find(|(m, _)| m.degree() != deg) {
                return Err(PotentialError::NotHomogeneous { declared: deg, found: m.degree() });
            }
        }
        let grad: Vec<MultiPoly> = space.xs().into_iter().map(|x| v.diff(x)).collect();
        let laplacian = space
            .xs()
            .into_iter()
            .zip(&grad)
            .map(|(x, g)| g.diff(x))
            .sum();
        Ok(PotentialSpec { space, v, grad, laplacian, homogeneity })
    }

    /// Builds `sum_j c_j x^{alpha_j}` in `n` dimensions.
    pub fn from_monomials(
        n: usize,
        terms: &[(Rational, Vec<u32>)],
    ) -> Result<Self, PotentialError> {
        if !(1..=3).contains(&n) {
            return Err(PotentialError::BadDimension(n));
        }
        let space = VarSpace::new(n);
        let mut poly_terms = Vec::with_capacity(terms.len());
        for (index, (c, alpha)) in terms.iter().enumerate() {
            if alpha.len() != n {
                return Err(PotentialError::ExponentLength {
                    index,
                    expected: n,
                    found: alpha.len(),
                });
            }
            let mut e = vec![0; space.var_count()];
            e[..n].copy_from_slice(alpha);
            poly_terms.push((CRational::real(c.clone()), e));
        }
        Self::new(MultiPoly::from_terms(space, poly_terms), None)
    }

    /// `omega_sq * x^2 / 2` in one dimension.
    pub fn harmonic(omega_sq: Rational) -> Self {
        Self::from_monomials(1, &[(omega_sq / Rational::from_integer(2), vec![2])])
            .and_then(|p| p.with_homogeneity(2))
            .expect("harmonic potential is valid")
    }

    /// `x^4` in one dimension.
    pub fn quartic() -> Self {
        Self::from_monomials(1, &[(Rational::one(), vec![4])])
            .and_then(|p| p.with_homogeneity(4))
            .expect("quartic potential is valid")
    }

    /// The Yang-Mills quantum mechanics potential `g^2 x^2 y^2 / 2`.
    pub fn yang_mills(g_sq: Rational) -> Self {
        Self::from_monomials(2, &[(g_sq / Rational::from_integer(2), vec![2, 2])])
            .and_then(|p| p.with_homogeneity(4))
            .expect("Yang-Mills potential is valid")
    }

    pub fn zero(n: usize) -> Self {
        Self::new(MultiPoly::zero(VarSpace::new(n)), None).expect("zero potential is valid")
    }

    pub fn with_homogeneity(self, degree: u32) -> Result<Self, PotentialError> {
        Self::new(self.v, Some(degree))
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn v(&self) -> &MultiPoly {
        &self.v
    }

    /// `dV/dx_i`.
    pub fn grad(&self, i: usize) -> &MultiPoly {
        &self.grad[i]
    }

    pub fn grads(&self) -> &[MultiPoly] {
        &self.grad
    }

    pub fn laplacian(&self) -> &MultiPoly {
        &self.laplacian
    }

    /// `|grad V|^2`.
    pub fn grad_squared(&self) -> MultiPoly {
        self.grad.iter().map(|g| g * g).sum()
    }

    pub fn homogeneity(&self) -> Option<u32> {
        self.homogeneity
    }

    /// The common total degree of all monomials, if there is one.
    pub fn detect_homogeneity(&self) -> Option<u32> {
        let mut degrees = self.v.terms().map(|(m, _)| m.degree());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    /// `V(x)` at a spatial point of length `n`.
    pub fn eval_x(&self, x: &[f64]) -> f64 {
        self.v.eval(&self.phase_point(x)).re
    }

    fn phase_point(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        let mut pt = vec![0.0; self.space.var_count()];
        pt[..x.len()].copy_from_slice(x);
        pt
    }

    /// Monomials `(coefficient, spatial exponents)` with exact coefficients.
    pub fn monomials(&self) -> Vec<(Rational, Vec<u32>)> {
        let n = self.dim();
        self.v
            .terms()
            .map(|(m, c)| (c.re.clone(), m.exponents()[..n].to_vec()))
            .collect()
    }

    /// Splits `V = c + x^T A x / 2` when `V` has total degree at most two.
    /// Returns the constant and the symmetric matrix `A` (row-major).
    pub fn quadratic_form(&self) -> Option<(f64, Vec<f64>)> {
        let n = self.dim();
        if self.v.total_degree() > 2 {
            return None;
        }
        let mut constant = 0.0;
        let mut a = vec![0.0; n * n];
        for (m, c) in self.v.terms() {
            let e = &m.exponents()[..n];
            let c = c.re.to_f64();
            match m.degree() {
                0 => constant = c,
                2 => {
                    let idx: Vec<usize> = (0..n).filter(|&i| e[i] > 0).collect();
                    if idx.len() == 1 {
                        a[idx[0] * n + idx[0]] = 2.0 * c;
                    } else {
                        a[idx[0] * n + idx[1]] = c;
                        a[idx[1] * n + idx[0]] = c;
                    }
                }
                _ => return None,
            }
        }
        Some((constant, a))
    }

    /// Short stable fingerprint of the exact polynomial.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.dim().to_le_bytes());
        h.update(self.v.to_canonical_string().as_bytes());
        let digest = h.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_file(&self) -> PotentialFile {
        PotentialFile {
            dim: self.dim(),
            terms: self
                .monomials()
                .into_iter()
                .map(|(c, exponents)| PotentialTerm {
                    coeff: serde_json::Value::String(c.to_string()),
                    exponents,
                })
                .collect(),
        }
    }

    /// True when every monomial has even degree in each variable separately.
    pub fn is_axis_even(&self) -> bool {
        self.v.monomials().all(|m| m.exponents().iter().all(|e| e % 2 == 0))
    }

    /// `x` variables as [`Var`]s.
    pub fn xs(&self) -> Vec<Var> {
        self.space.xs()
    }
}

/// On-disk representation of a potential.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialFile {
    pub dim: usize,
    pub terms: Vec<PotentialTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialTerm {
    pub coeff: serde_json::Value,
    pub exponents: Vec<u32>,
}

impl PotentialFile {
    pub fn into_potential(self) -> Result<PotentialSpec, PotentialError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (index, term) in self.terms.into_iter().enumerate() {
            let text = match &term.coeff {
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let c: Rational = text
                .parse()
                .map_err(|source| PotentialError::Coefficient { index, source })?;
            terms.push((c, term.exponents));
        }
        PotentialSpec::from_monomials(self.dim, &terms)
    }
}

pub fn parse_json(text: &str) -> Result<PotentialSpec, PotentialError> {
    let file: PotentialFile = serde_json::from_str(text).map_err(|e| PotentialError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_potential()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_yang_mills() {
        let v = PotentialSpec::yang_mills(Rational::one());
        let sp = v.space();
        let x = MultiPoly::var(sp, sp.x(0));
        let y = MultiPoly::var(sp, sp.x(1));
        // dV/dx = x y^2, laplacian = x^2 + y^2
        assert_eq!(v.grad(0), &(&(&x * &y) * &y));
        assert_eq!(v.laplacian(), &(&(&x * &x) + &(&y * &y)));
        assert_eq!(v.homogeneity(), Some(4));
    }

    #[test]
    fn rejects_odd_and_momentum_dependence() {
        let sp = VarSpace::new(1);
        let odd = MultiPoly::var(sp, sp.x(0));
        assert!(matches!(PotentialSpec::new(odd, None), Err(PotentialError::NotEven)));
        let pdep = MultiPoly::var(sp, sp.p(0));
        let pdep = &pdep * &pdep;
        assert!(matches!(PotentialSpec::new(pdep, None), Err(PotentialError::NotSpatial)));
    }

    #[test]
    fn homogeneity_is_checked() {
        let v = PotentialSpec::from_monomials(
            1,
            &[(Rational::one(), vec![2]), (Rational::one(), vec![4])],
        )
        .unwrap();
        assert_eq!(v.detect_homogeneity(), None);
        assert!(matches!(
            v.with_homogeneity(4),
            Err(PotentialError::NotHomogeneous { declared: 4, found: 2 })
        ));
        assert!(matches!(
            PotentialSpec::quartic().with_homogeneity(3),
            Err(PotentialError::BadHomogeneity(3))
        ));
    }

    #[test]
    fn json_round_trip_keeps_exact_coefficients() {
        let v = parse_json(r#"{"dim": 2, "terms": [{"coeff": "1/3", "exponents": [2, 2]},
                                                   {"coeff": 0.1, "exponents": [0, 2]}]}"#)
        .unwrap();
        let text = serde_json::to_string(&v.to_file()).unwrap();
        let back = parse_json(&text).unwrap();
        assert_eq!(back, v);
        assert!(v.monomials().contains(&(Rational::new(1, 10), vec![0, 2])));
    }

    #[test]
    fn json_errors_report_position() {
        let err = parse_json("{\n  \"dim\": 1,\n  \"terms\": [oops]\n}").unwrap_err();
        match err {
            PotentialError::Json { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_json(r#"{"dim": 1, "terms": [{"coeff": 1, "exponents": [2, 2]}]}"#)
            .unwrap_err();
        assert!(matches!(err, PotentialError::ExponentLength { .. }));
    }

    #[test]
    fn quadratic_form_extraction() {
        let v = PotentialSpec::harmonic(Rational::from_integer(9));
        let (c, a) = v.quadratic_form().unwrap();
        assert_eq!(c, 0.0);
        assert_eq!(a, vec![9.0]);
        assert!(PotentialSpec::quartic().quadratic_form().is_none());
    }

    #[test]
    fn hash_is_stable() {
        let a = PotentialSpec::quartic().hash_hex();
        assert_eq!(a, PotentialSpec::quartic().hash_hex());
        assert_ne!(a, PotentialSpec::harmonic(Rational::one()).hash_hex());
        assert_eq!(a.len(), 16);
    }
}
