use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{IntPolynomial, PolyMatrix};
use crate::error::{Error, Result};
use crate::pairs::{lifted_lengths, LiftedMorphism};

/// Largest number of lifted symbols [`q_direct`] will materialize.
pub const Q_DIRECT_BUDGET: usize = 1 << 22;

/// `sum_k (top_k - bottom_k) x^k` over the realization of `phi~^n(sym)`.
pub fn q_direct(lift: &LiftedMorphism, sym: usize, n: usize) -> Result<IntPolynomial> {
    if sym >= lift.len() {
        return Err(Error::Precondition(format!("unknown symbol {sym}")));
    }
    let word = lift.apply_n(&[sym], n, Q_DIRECT_BUDGET)?;
    let (top, bottom) = lift.realize(&word);
    let mut q = IntPolynomial::zero();
    for (k, (t, b)) in top.iter().zip(bottom.iter()).enumerate() {
        if t != b {
            q.add_term(k as u64, BigInt::from(t.0 as i64 - b.0 as i64));
        }
    }
    Ok(q)
}

/// `M_n` on the mismatch symbols: entry `(i, j)` collects `x^{f}` for every
/// occurrence of `j` in the image of `i`, where `f` is the top length of the
/// level-`n` expansion of everything before that occurrence.
pub fn build_mn(lift: &LiftedMorphism, n: usize) -> Result<PolyMatrix> {
    let ids = lift.mismatch_ids();
    let pos: Vec<Option<usize>> = (0..lift.len()).map(|s| ids.iter().position(|&t| t == s)).collect();
    let lens = lifted_lengths(lift, n)
        .iter()
        .map(|l| l.to_u64().ok_or_else(|| Error::Budget(format!("level {n} lengths exceed u64"))))
        .collect::<Result<Vec<_>>>()?;
    let rows = ids
        .iter()
        .map(|&i| {
            let mut row = vec![IntPolynomial::zero(); ids.len()];
            let mut offset = 0u64;
            for &d in lift.image(i) {
                if let Some(j) = pos[d] {
                    row[j].add_term(offset, BigInt::from(1));
                }
                offset += lens[d];
            }
            row
        })
        .collect();
    PolyMatrix::new(ids, rows)
}

/// `Q_n` on the mismatch symbols, by `n` products with `M_0, ..., M_{n-1}`.
pub fn q_recurrence(lift: &LiftedMorphism, n: usize) -> Result<Vec<IntPolynomial>> {
    let mut q = lift.mismatch_ids().into_iter().map(|i| q_direct(lift, i, 0)).collect::<Result<Vec<_>>>()?;
    for level in 0..n {
        q = build_mn(lift, level)?.mul_vec(&q);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kbonacci::{canonical_cycle_cover, determinant_check, incidence_graph, lifted_kbonacci, KbSymbol};
    use crate::pairs::lifted_lengths;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    fn trib() -> crate::kbonacci::KbSystem {
        lifted_kbonacci(3).unwrap()
    }

    #[test]
    fn tribonacci_base_polynomials() {
        let sys = trib();
        let a6 = sys.id_of(KbSymbol::Triple(-1, 1, 2)).unwrap();
        let a0 = sys.id_of(KbSymbol::Triple(-1, 0, 1)).unwrap();
        assert_eq!(q_direct(&sys.lift, a6, 0).unwrap(), IntPolynomial::from_coeffs(&[-2, 1, -1, 2]));
        assert_eq!(q_direct(&sys.lift, a0, 0).unwrap(), IntPolynomial::from_coeffs(&[-1, 1]));
        assert_eq!(q_direct(&sys.lift, a6, 1).unwrap(), IntPolynomial::from_coeffs(&[0, 1, -1, 2, -2, 1, -1]));
    }

    #[test]
    fn recurrence_matches_expansion() {
        for (k, depth) in [(2, 6), (3, 8), (4, 5), (5, 5)] {
            let sys = lifted_kbonacci(k).unwrap();
            let ids = sys.lift.mismatch_ids();
            for n in 0..=depth {
                let rec = q_recurrence(&sys.lift, n).unwrap();
                let lens = lifted_lengths(&sys.lift, n);
                for (q, &i) in rec.iter().zip(&ids) {
                    assert_eq!(*q, q_direct(&sys.lift, i, n).unwrap(), "k={k} n={n} sym={i}");
                    assert!(q.degree().is_none_or(|d| BigInt::from(d) < BigInt::from(lens[i].clone())));
                }
            }
        }
    }

    #[test]
    fn mn_support_lies_in_the_graph() {
        let sys = trib();
        let g = incidence_graph(&sys);
        let m = build_mn(&sys.lift, 3).unwrap();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                if !m.get(i, j).is_zero() {
                    let (si, sj) = (sys.symbols[m.labels[i]], sys.symbols[m.labels[j]]);
                    assert!(g.has_edge(g.index_of(si).unwrap(), g.index_of(sj).unwrap()));
                }
            }
        }
        let a6 = sys.id_of(KbSymbol::Triple(-1, 1, 2)).unwrap();
        let a1 = sys.id_of(KbSymbol::Triple(1, 0, -1)).unwrap();
        let a3 = sys.id_of(KbSymbol::Triple(2, 0, -1)).unwrap();
        let r = m.labels.iter().position(|&l| l == a6).unwrap();
        let nonzero: Vec<usize> = (0..m.dim()).filter(|&j| !m.get(r, j).is_zero()).map(|j| m.labels[j]).collect();
        let mut want = vec![a1, a3];
        want.sort();
        assert_eq!(nonzero, want);
        let c1 = m.labels.iter().position(|&l| l == a1).unwrap();
        assert_eq!(m.get(r, c1).term_count(), 2);
    }

    #[test]
    fn determinants_are_monomials() {
        for k in 2..=5 {
            let sys = lifted_kbonacci(k).unwrap();
            let g = incidence_graph(&sys);
            let cover = canonical_cycle_cover(&g).unwrap();
            for n in 0..=4 {
                let check = determinant_check(&sys, &g, &cover, n).unwrap();
                assert!(check.holds(), "k={k} n={n}");
                assert_eq!(check.elimination_agrees.is_some(), build_mn(&sys.lift, n).unwrap().dim() <= 16);
            }
        }
    }

    #[test]
    fn tribonacci_determinant_is_negative_monomial() {
        let sys = lifted_kbonacci(3).unwrap();
        let g = incidence_graph(&sys);
        let cover = canonical_cycle_cover(&g).unwrap();
        let labels = sys.paper_labels().unwrap();
        let id = |name: &str| labels.iter().position(|l| l == name).unwrap();
        for n in 0..=6 {
            let ell = lifted_lengths(&sys.lift, n);
            let e = |name: &str| ell[id(name)].to_u64().unwrap();
            let expected = IntPolynomial::monomial(BigInt::from(-1), e("a0") + e("a1") + 8 * e("a8"));
            let check = determinant_check(&sys, &g, &cover, n).unwrap();
            assert_eq!(check.det, expected, "n={n}");
            assert_eq!(check.elimination_agrees, Some(true));
        }
    }
}
