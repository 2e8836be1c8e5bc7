//! Exact sparse multivariate polynomials in phase-space variables.
//!
//! Every polynomial lives in a [`VarSpace`] with the fixed variable order
//! `(x_1..x_n, p_1..p_n, t)`. Coefficients are [`CRational`]s, so symbolic
//! identities can be checked for exact zero. Floating point only enters in
//! [`MultiPoly::eval`] and [`NumericPoly`].

mod rational;
mod serialize;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub use rational::{CRational, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable space mismatch: n = {left} vs n = {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Phase-space dimension bookkeeping: `2n + 1` variables ordered `x, p, t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarSpace {
    n: usize,
}

/// Index of one variable inside a [`VarSpace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub usize);

impl VarSpace {
    /// Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "spatial dimension must be positive");
        VarSpace { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn var_count(&self) -> usize {
        2 * self.n + 1
    }

    pub fn x(&self, i: usize) -> Var {
        assert!(i < self.n);
        Var(i)
    }

    pub fn p(&self, i: usize) -> Var {
        assert!(i < self.n);
        Var(self.n + i)
    }

    pub fn t(&self) -> Var {
        Var(2 * self.n)
    }

    pub fn xs(&self) -> Vec<Var> {
        (0..self.n).map(Var).collect()
    }

    pub fn ps(&self) -> Vec<Var> {
        (self.n..2 * self.n).map(Var).collect()
    }

    /// Human-readable variable name (`x1`, `p2`, `t`).
    pub fn name(&self, v: Var) -> String {
        if v.0 < self.n {
            format!("x{}", v.0 + 1)
        } else if v.0 < 2 * self.n {
            format!("p{}", v.0 - self.n + 1)
        } else {
            "t".to_string()
        }
    }
}

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic with the earlier variable dominating.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(space: VarSpace) -> Self {
        Monomial(vec![0; space.var_count()])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn degree_in(&self, vars: &[Var]) -> u32 {
        vars.iter().map(|v| self.0[v.0]).sum()
    }

    fn product(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with complex-rational coefficients. Zero coefficients
/// are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    space: VarSpace,
    terms: BTreeMap<Monomial, CRational>,
}

impl MultiPoly {
    pub fn zero(space: VarSpace) -> Self {
        MultiPoly { space, terms: BTreeMap::new() }
    }

    pub fn constant(space: VarSpace, c: CRational) -> Self {
        Self::monomial(space, c, Monomial::one(space))
    }

    pub fn one(space: VarSpace) -> Self {
        Self::constant(space, CRational::one())
    }

    /// The polynomial consisting of the single variable `v`.
    pub fn var(space: VarSpace, v: Var) -> Self {
        let mut e = vec![0; space.var_count()];
        e[v.0] = 1;
        Self::monomial(space, CRational::one(), Monomial(e))
    }

    pub fn monomial(space: VarSpace, c: CRational, m: Monomial) -> Self {
        assert_eq!(m.0.len(), space.var_count(), "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { space, terms }
    }

    /// Builds from `(coefficient, exponents)` pairs, merging duplicates.
    pub fn from_terms<I>(space: VarSpace, terms: I) -> Self
    where
        I: IntoIterator<Item = (CRational, Vec<u32>)>,
    {
        let mut p = MultiPoly::zero(space);
        for (c, e) in terms {
            assert_eq!(e.len(), space.var_count(), "exponent vector length");
            p.add_term(Monomial(e), &c);
        }
        p
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> CRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: &CRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn check_space(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(PolyError::DimensionMismatch { left: self.space.n, right: other.space.n })
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_space(other)?;
        let mut acc: std::collections::HashMap<Monomial, CRational> =
            std::collections::HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                acc.entry(ma.product(mb))
                    .and_modify(|e| *e += &c)
                    .or_insert(c);
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(MultiPoly { space: self.space, terms })
    }

    pub fn scale(&self, k: &CRational) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero(self.space);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c * k))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        MultiPoly { space: self.space, terms }
    }

    pub fn scale_rational(&self, k: &Rational) -> MultiPoly {
        self.scale(&CRational::real(k.clone()))
    }

    /// Multiplication by the imaginary unit.
    pub fn mul_i(&self) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.mul_i())).collect();
        MultiPoly { space: self.space, terms }
    }

    /// Multiplication by `v^k`.
    pub fn mul_var(&self, v: Var, k: u32) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e[v.0] += k;
                (Monomial(e), c.clone())
            })
            .collect();
        MultiPoly { space: self.space, terms }
    }

    /// Exact partial derivative with respect to `v`.
    pub fn diff(&self, v: Var) -> MultiPoly {
        assert!(v.0 < self.space.var_count(), "variable index out of range");
        let mut out = MultiPoly::zero(self.space);
        for (m, c) in &self.terms {
            let k = m.0[v.0];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[v.0] -= 1;
            out.add_term(Monomial(e), &c.scale(&Rational::from_integer(k as i64)));
        }
        out
    }

    /// Antiderivative in `t` with zero integration constant.
    pub fn integrate_t(&self) -> MultiPoly {
        let t = self.space.t().0;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e[t] += 1;
                let k = e[t] as i64;
                (Monomial(e), c.scale(&Rational::new(1, k)))
            })
            .collect();
        MultiPoly { space: self.space, terms }
    }

    /// Splits into parts that are even and odd in the total degree over `vars`.
    pub fn parity_filter(&self, vars: &[Var]) -> (MultiPoly, MultiPoly) {
        let mut even = MultiPoly::zero(self.space);
        let mut odd = MultiPoly::zero(self.space);
        for (m, c) in &self.terms {
            let target = if m.degree_in(vars) % 2 == 0 { &mut even } else { &mut odd };
            target.terms.insert(m.clone(), c.clone());
        }
        (even, odd)
    }

    /// True when no monomial involves a variable outside `vars`.
    pub fn depends_only_on(&self, vars: &[Var]) -> bool {
        self.terms.keys().all(|m| {
            m.0.iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || vars.contains(&Var(i)))
        })
    }

    /// Maximum exponent of `v` over all terms (0 for the zero polynomial).
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.0[v.0]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn all_real(&self) -> bool {
        self.terms.values().all(CRational::is_real)
    }

    pub fn all_imaginary(&self) -> bool {
        self.terms.values().all(CRational::is_imaginary)
    }

    /// Substitutes `v -> -v`.
    pub fn reflect(&self, vars: &[Var]) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.degree_in(vars) % 2 == 1 {
                    (m.clone(), -c)
                } else {
                    (m.clone(), c.clone())
                }
            })
            .collect();
        MultiPoly { space: self.space, terms }
    }

    /// Re-embeds the polynomial in `target`, mapping `x_i, p_i` onto the same
    /// axis and `t` onto `t`. Fails if a used axis does not exist in `target`.
    pub fn embed(&self, target: VarSpace) -> Result<MultiPoly, PolyError> {
        let n = self.space.n;
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.var_count()];
            for i in 0..n {
                if m.0[i] > 0 || m.0[n + i] > 0 {
                    if i >= target.n {
                        return Err(PolyError::DimensionMismatch { left: n, right: target.n });
                    }
                    e[i] = m.0[i];
                    e[target.n + i] = m.0[n + i];
                }
            }
            e[2 * target.n] = m.0[2 * n];
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    pub fn to_numeric(&self) -> NumericPoly {
        NumericPoly {
            vars: self.space.var_count(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.0.clone(), c.to_complex64()))
                .collect(),
        }
    }

    /// Evaluates at a point of length `2n + 1`.
    pub fn eval(&self, point: &[f64]) -> Complex64 {
        self.to_numeric().eval(point)
    }
}

impl fmt::Display for MultiPoly {
    /// Readable infix form, highest-degree terms first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = self.space.name(Var(i));
                    if e == 1 { name } else { format!("{name}^{e}") }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

// Operator sugar. These panic on a space mismatch; use the `try_*` methods
// when the operands come from user input.

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("polynomial add")
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("polynomial sub")
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("polynomial mul")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&CRational::from_integer(-1))
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for MultiPoly {
    /// Panics on an empty iterator, which has no variable space.
    fn sum<I: Iterator<Item = MultiPoly>>(mut iter: I) -> Self {
        let first = iter.next().expect("sum of an empty polynomial iterator");
        iter.fold(first, |acc, p| &acc + &p)
    }
}

/// Floating-point snapshot of a [`MultiPoly`] for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct NumericPoly {
    vars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl NumericPoly {
    pub fn eval(&self, point: &[f64]) -> Complex64 {
        assert_eq!(point.len(), self.vars, "evaluation point length");
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = e
                    .iter()
                    .zip(point)
                    .filter(|(&k, _)| k > 0)
                    .map(|(&k, &x)| x.powi(k as i32))
                    .product();
                c * mono
            })
            .sum()
    }

    /// Real part of [`NumericPoly::eval`].
    pub fn eval_re(&self, point: &[f64]) -> f64 {
        self.eval(point).re
    }
}
