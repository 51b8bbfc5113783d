//! Factorization of a monic squarefree integer polynomial from a certified
//! root isolation: a subset of roots closed under conjugation yields a
//! rational factor exactly when the product of `(x - z_i)` has integer
//! coefficients, which is tested by enclosing the product and confirming
//! the unique integer candidate by exact division.

use num_bigint::BigInt;

use super::dense;
use super::dyadic::Dyadic;
use super::interval::{CInterval, Interval};
use super::roots::RootDisk;

const MAX_UNITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub coeffs: Vec<BigInt>,
    /// Indices into the disk list of the roots of this factor.
    pub roots: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOutcome {
    Irreducibles(Vec<Factor>),
    NeedPrecision,
    TooLarge,
}

enum Candidate {
    Int(Vec<BigInt>),
    NotInteger,
    Ambiguous,
}

fn product_candidate(disks: &[RootDisk], roots: &[usize], p: u64) -> Candidate {
    let mut coeffs = vec![CInterval::real(Interval::point(Dyadic::one()))];
    for &r in roots {
        let z = disks[r].rect();
        let mut next = vec![CInterval::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c, p);
            next[i] = next[i].sub(&c.mul(&z, p), p);
        }
        coeffs = next;
    }
    let mut out = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        if !c.im.contains_zero() {
            return Candidate::NotInteger;
        }
        let lo = c.re.lo.ceil();
        let hi = c.re.hi.floor();
        if lo > hi {
            return Candidate::NotInteger;
        }
        if lo != hi {
            return Candidate::Ambiguous;
        }
        out.push(lo);
    }
    Candidate::Int(out)
}

fn units_of(disks: &[RootDisk]) -> Option<Vec<Vec<usize>>> {
    let mut units = Vec::new();
    for (i, d) in disks.iter().enumerate() {
        if d.is_real() {
            units.push(vec![i]);
        } else if d.im.signum() > 0 {
            let partner = disks.iter().position(|e| e.re == d.re && e.im == -&d.im)?;
            units.push(vec![i, partner]);
        }
    }
    let covered: usize = units.iter().map(Vec::len).sum();
    (covered == disks.len()).then_some(units)
}

fn subsets_of_degree(units: &[Vec<usize>], want: usize) -> Vec<Vec<usize>> {
    fn go(units: &[Vec<usize>], start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for u in start..units.len() {
            let size = units[u].len();
            if size <= left {
                cur.push(u);
                go(units, u + 1, left - size, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(units, 0, want, &mut Vec::new(), &mut out);
    out
}

pub fn factor_monic(f: &[BigInt], disks: &[RootDisk], p: u64) -> FactorOutcome {
    let Some(mut units) = units_of(disks) else { return FactorOutcome::NeedPrecision };
    if units.len() > MAX_UNITS {
        return FactorOutcome::TooLarge;
    }
    let mut g = dense::trim(f.to_vec());
    let mut found = Vec::new();
    loop {
        let deg = dense::degree(&g).unwrap_or(0);
        let remaining: Vec<usize> = units.iter().flatten().copied().collect();
        if deg <= 1 {
            found.push(Factor { coeffs: g, roots: remaining });
            break;
        }
        let mut hit = None;
        'sizes: for d in 1..=deg / 2 {
            for subset in subsets_of_degree(&units, d) {
                let roots: Vec<usize> = subset.iter().flat_map(|&u| units[u].iter().copied()).collect();
                match product_candidate(disks, &roots, p) {
                    Candidate::Ambiguous => return FactorOutcome::NeedPrecision,
                    Candidate::NotInteger => {}
                    Candidate::Int(h) => {
                        if let Some(q) = dense::div_exact(&g, &h) {
                            hit = Some((subset, roots, h, q));
                            break 'sizes;
                        }
                    }
                }
            }
        }
        match hit {
            None => {
                found.push(Factor { coeffs: g, roots: remaining });
                break;
            }
            Some((subset, roots, h, q)) => {
                found.push(Factor { coeffs: h, roots });
                units = units
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, u)| u)
                    .collect();
                g = q;
            }
        }
    }
    FactorOutcome::Irreducibles(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::roots::isolate_at;

    fn v(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn factor(p: &[BigInt]) -> Vec<Vec<BigInt>> {
        let disks = isolate_at(p, 128).unwrap();
        match factor_monic(p, &disks, 128) {
            FactorOutcome::Irreducibles(fs) => {
                let mut c: Vec<_> = fs.into_iter().map(|f| f.coeffs).collect();
                c.sort();
                c
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn splits_products_of_known_factors() {
        let p = dense::mul(&v(&[-2, 0, 1]), &v(&[1, 1, 1]));
        let mut want = vec![v(&[-2, 0, 1]), v(&[1, 1, 1])];
        want.sort();
        assert_eq!(factor(&p), want);
        assert_eq!(factor(&v(&[0, -2, 1])).len(), 2);
    }

    #[test]
    fn keeps_irreducibles_whole() {
        assert_eq!(factor(&v(&[-1, -1, -1, 1])), vec![v(&[-1, -1, -1, 1])]);
        // x^4 + 1 has no real roots and no rational factor.
        assert_eq!(factor(&v(&[1, 0, 0, 0, 1])), vec![v(&[1, 0, 0, 0, 1])]);
    }
}
