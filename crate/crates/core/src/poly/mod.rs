//! Sparse integer polynomials, the difference polynomials of lifted
//! symbols, their matrix recurrence, and certified evaluation.

mod algebraic;
mod eval;
mod matrix;
mod qpoly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use algebraic::{parse_rational, AlgebraicInput, ComplexRational};
pub use eval::{eval_certified, eval_number, Enclosure, EvalStatus};
pub use matrix::{det_poly, det_poly_with_cover, PolyMatrix};
pub(crate) use matrix::bareiss as matrix_bareiss;
pub use qpoly::{build_mn, q_direct, q_recurrence, Q_DIRECT_BUDGET};

/// A polynomial with integer coefficients stored as exponent -> coefficient.
/// Zero coefficients are never stored, so derived equality is canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    terms: BTreeMap<u64, BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    pub fn x_pow(e: u64) -> Self {
        Self::monomial(BigInt::one(), e)
    }

    pub fn monomial(c: BigInt, e: u64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// Dense constructor: `coeffs[i]` is the coefficient of `x^i`.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        Self::from_dense(coeffs.iter().map(|&c| BigInt::from(c)))
    }

    pub fn from_dense<I: IntoIterator<Item = BigInt>>(coeffs: I) -> Self {
        let mut p = Self::zero();
        for (i, c) in coeffs.into_iter().enumerate() {
            p.add_term(i as u64, c);
        }
        p
    }

    pub fn add_term(&mut self, e: u64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<u64> {
        self.terms.keys().next().copied()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: u64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<(u64, &BigInt)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u64, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// `(c, e)` when the polynomial is the single term `c x^e`.
    pub fn as_monomial(&self) -> Option<(&BigInt, u64)> {
        match self.terms.len() {
            1 => self.terms.iter().next().map(|(e, c)| (c, *e)),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.as_monomial().is_some()
    }

    /// Multiplies by `c x^e`.
    pub fn mul_term(&self, c: &BigInt, e: u64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        IntPolynomial { terms: self.terms.iter().map(|(k, v)| (k + e, v * c)).collect() }
    }

    pub fn shift(&self, e: u64) -> Self {
        IntPolynomial { terms: self.terms.iter().map(|(k, v)| (k + e, v.clone())).collect() }
    }

    /// Dense coefficient vector, `None` when the degree is too large to
    /// store densely.
    pub fn to_dense(&self, max_len: usize) -> Option<Vec<BigInt>> {
        let deg = self.degree().unwrap_or(0);
        if deg as u128 >= max_len as u128 {
            return None;
        }
        let mut v = vec![BigInt::zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            v[*e as usize] = c.clone();
        }
        if self.is_zero() {
            v.clear();
        }
        Some(v)
    }

    /// The polynomial `x^{deg} p(1/x)`, degree measured from the top term.
    pub fn reversed(&self) -> Self {
        let Some(top) = self.degree() else { return Self::zero() };
        IntPolynomial { terms: self.terms.iter().map(|(e, c)| (top - e, c.clone())).collect() }
    }

    /// Exact division, `None` if `d` does not divide `self` in `Z[x]`.
    pub fn div_exact(&self, d: &IntPolynomial) -> Option<IntPolynomial> {
        let (dd, dc) = d.leading()?;
        let mut rem = self.clone();
        let mut q = IntPolynomial::zero();
        while let Some((re, rc)) = rem.leading() {
            if re < dd {
                return None;
            }
            let (qc, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            let qe = re - dd;
            rem = &rem - &d.mul_term(&qc, qe);
            q.add_term(qe, qc);
        }
        Some(q)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        self.terms.iter().map(|(e, c)| c * num_traits::pow(x.clone(), *e as usize)).sum()
    }

    pub fn to_file(&self) -> PolyFile {
        PolyFile { terms: self.terms.iter().map(|(e, c)| (*e, c.to_string())).collect() }
    }

    pub fn from_file(file: &PolyFile) -> Result<Self> {
        let mut p = Self::zero();
        let mut last = None;
        for (e, c) in &file.terms {
            if last.is_some_and(|l| l >= *e) {
                return Err(Error::Parse("polynomial terms must have increasing exponents".into()));
            }
            last = Some(*e);
            let c: BigInt = c.parse().map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?;
            if c.is_zero() {
                return Err(Error::Parse("zero coefficients are not stored".into()));
            }
            p.add_term(*e, c);
        }
        Ok(p)
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut out = IntPolynomial::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let show_coeff = !mag.is_one() || *e == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}

/// JSON form `{"terms": [[exp, "coeff"], …]}` with decimal coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyFile {
    pub terms: Vec<(u64, String)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_canonical_form() {
        let p = IntPolynomial::from_coeffs(&[-2, 1, -1, 2]);
        assert_eq!(p.to_string(), "-2 + x - x^2 + 2x^3");
        assert_eq!((&p - &p), IntPolynomial::zero());
        assert_eq!(IntPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn exact_division() {
        let a = IntPolynomial::from_coeffs(&[-1, 1]);
        let b = IntPolynomial::from_coeffs(&[1, 1, 1]);
        let prod = &a * &b;
        assert_eq!(prod, IntPolynomial::from_coeffs(&[-1, 0, 0, 1]));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(prod.div_exact(&IntPolynomial::from_coeffs(&[1, 2])), None);
        let sparse = &IntPolynomial::x_pow(1000) * &a;
        assert_eq!(sparse.div_exact(&a), Some(IntPolynomial::x_pow(1000)));
    }

    #[test]
    fn reversal_and_monomials() {
        let p = IntPolynomial::from_coeffs(&[0, 0, 3, 0, 5]);
        assert_eq!(p.reversed(), IntPolynomial::from_coeffs(&[5, 0, 3]));
        assert_eq!(IntPolynomial::x_pow(7).as_monomial(), Some((&BigInt::one(), 7)));
        assert!(!p.is_monomial());
    }

    #[test]
    fn json_round_trip() {
        let p = IntPolynomial::from_coeffs(&[-2, 1, 0, 12345678901234]);
        let s = serde_json::to_string(&p.to_file()).unwrap();
        assert_eq!(s, r#"{"terms":[[0,"-2"],[1,"1"],[3,"12345678901234"]]}"#);
        let back: PolyFile = serde_json::from_str(&s).unwrap();
        assert_eq!(IntPolynomial::from_file(&back).unwrap(), p);
    }
}
