//! Dense univariate helpers over `Z[x]` used by root isolation and the
//! spectral analysis. Coefficient vectors are in increasing degree order
//! and carry no trailing zeros.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
}

pub fn eval_rational(p: &[BigInt], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
}

/// Divides out the content and makes the leading coefficient positive.
pub fn primitive_part(p: &[BigInt]) -> Vec<BigInt> {
    let p = trim(p.to_vec());
    let Some(lead) = p.last() else { return p };
    let g = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let g = if lead.is_negative() { -g } else { g };
    p.into_iter().map(|c| c / &g).collect()
}

fn to_rat(p: &[BigInt]) -> Vec<BigRational> {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let lead = r.last().expect("non-empty").clone();
        if lead.is_zero() {
            r.pop();
            continue;
        }
        let q = lead / lb;
        let shift = r.len() - 1 - db;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &q * c;
        }
        r.pop();
    }
    while r.last().is_some_and(Zero::is_zero) {
        r.pop();
    }
    r
}

/// Greatest common divisor over `Q[x]`, returned as a primitive integer polynomial.
pub fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = to_rat(&trim(a.to_vec()));
    let mut y = to_rat(&trim(b.to_vec()));
    while !y.is_empty() {
        let r = rat_rem(&x, &y);
        x = y;
        y = r;
    }
    if x.is_empty() {
        return Vec::new();
    }
    let lcm = x.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = x.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    primitive_part(&ints)
}

/// Exact quotient in `Z[x]`, or `None` when `d` does not divide `p`.
pub fn div_exact(p: &[BigInt], d: &[BigInt]) -> Option<Vec<BigInt>> {
    let p = trim(p.to_vec());
    let d = trim(d.to_vec());
    let dd = d.len().checked_sub(1)?;
    if p.is_empty() {
        return Some(Vec::new());
    }
    if p.len() < d.len() {
        return None;
    }
    let mut r = p;
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + dd].div_rem(&d[dd]);
        if !rem.is_zero() {
            return None;
        }
        for (i, di) in d.iter().enumerate() {
            r[k + i] -= &c * di;
        }
        q[k] = c;
    }
    r.iter().all(Zero::is_zero).then(|| trim(q))
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// `p / gcd(p, p')`, made primitive.
pub fn squarefree_part(p: &[BigInt]) -> Vec<BigInt> {
    let p = primitive_part(p);
    if degree(&p).unwrap_or(0) == 0 {
        return p;
    }
    let g = gcd(&p, &derivative(&p));
    primitive_part(&div_exact(&p, &g).expect("gcd divides its argument"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn squarefree_strips_repeated_factors() {
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        let p = v(&[2, -3, 0, 1]);
        assert_eq!(squarefree_part(&p), v(&[-2, 1, 1]));
        assert_eq!(squarefree_part(&v(&[-1, -1, 1])), v(&[-1, -1, 1]));
    }

    #[test]
    fn gcd_and_division() {
        let a = mul(&v(&[-1, 1]), &v(&[1, 0, 1]));
        let b = mul(&v(&[-1, 1]), &v(&[3, 2]));
        assert_eq!(gcd(&a, &b), v(&[-1, 1]));
        assert_eq!(div_exact(&a, &v(&[1, 0, 1])), Some(v(&[-1, 1])));
        assert_eq!(div_exact(&a, &v(&[1, 1])), None);
    }
}
