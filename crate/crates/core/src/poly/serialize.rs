//! Canonical line-oriented text form.
//!
//! One term per line, ascending graded-lex order:
//!
//! ```text
//! re_num/re_den im_num/im_den e_1 e_2 ... e_{2n+1}
//! ```
//!
//! The zero polynomial serializes to the empty string.

use std::fmt::Write;

use super::{CRational, Monomial, MultiPoly, PolyError, Rational, VarSpace};

impl MultiPoly {
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for (m, c) in self.terms() {
            write!(out, "{} {}", c.re, c.im).unwrap();
            for e in m.exponents() {
                write!(out, " {e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses the canonical form. Blank lines and `#` comments are skipped;
    /// terms may appear in any order and repeated monomials are merged.
    pub fn parse_canonical(space: VarSpace, text: &str) -> Result<MultiPoly, PolyError> {
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| PolyError::Parse { line: idx + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 + space.var_count() {
                return Err(err(format!(
                    "expected {} fields, found {}",
                    2 + space.var_count(),
                    fields.len()
                )));
            }
            let re: Rational = fields[0].parse().map_err(|e: PolyError| err(e.to_string()))?;
            let im: Rational = fields[1].parse().map_err(|e: PolyError| err(e.to_string()))?;
            let exps = fields[2..]
                .iter()
                .map(|f| f.parse::<u32>().map_err(|_| err(format!("bad exponent `{f}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            terms.push((CRational::new(re, im), exps));
        }
        Ok(MultiPoly::from_terms(space, terms))
    }

    /// Canonical form of the monomial list only, used for hashing.
    pub(crate) fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms().map(|(m, _)| m)
    }
}
