use std::fmt;

use num_traits::One;

use super::IntPolynomial;
use crate::error::{Error, Result};
use crate::kbonacci::permanent::permanent;

/// Largest dimension handled by general elimination in [`det_poly`].
pub const DET_DIMENSION_LIMIT: usize = 16;

/// Square matrix of polynomials; `labels[i]` names the symbol of row and column `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    pub labels: Vec<usize>,
    pub rows: Vec<Vec<IntPolynomial>>,
}

impl PolyMatrix {
    pub fn new(labels: Vec<usize>, rows: Vec<Vec<IntPolynomial>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition(format!("matrix is not {n} x {n}")));
        }
        Ok(PolyMatrix { labels, rows })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &IntPolynomial {
        &self.rows[i][j]
    }

    pub fn mul_vec(&self, v: &[IntPolynomial]) -> Vec<IntPolynomial> {
        self.rows
            .iter()
            .map(|row| {
                row.iter().zip(v).filter(|(m, _)| !m.is_zero()).fold(IntPolynomial::zero(), |acc, (m, x)| &acc + &(m * x))
            })
            .collect()
    }

    /// 0/1 pattern of non-zero entries.
    pub fn support(&self) -> Vec<Vec<bool>> {
        self.rows.iter().map(|r| r.iter().map(|p| !p.is_zero()).collect()).collect()
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            write!(f, "{:>4} |", self.labels[i])?;
            for p in row {
                write!(f, " {p} |")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Fraction-free Bareiss elimination over `Z[x]`, no size limit.
pub(crate) fn bareiss(mut a: Vec<Vec<IntPolynomial>>) -> IntPolynomial {
    let n = a.len();
    if n == 0 {
        return IntPolynomial::one();
    }
    let mut negate = false;
    let mut prev = IntPolynomial::one();
    for k in 0..n - 1 {
        let pivot = (k..n).filter(|&r| !a[r][k].is_zero()).min_by_key(|&r| a[r][k].term_count());
        let Some(p) = pivot else { return IntPolynomial::zero() };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss quotients are exact");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate { -&det } else { det }
}

/// Exact determinant by fraction-free elimination, dimension at most 16.
pub fn det_poly(m: &PolyMatrix) -> Result<IntPolynomial> {
    if m.dim() > DET_DIMENSION_LIMIT {
        return Err(Error::Budget(format!(
            "general determinant limited to dimension {DET_DIMENSION_LIMIT}, got {}; supply a cycle cover",
            m.dim()
        )));
    }
    Ok(bareiss(m.rows.clone()))
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Determinant through a cycle cover: when the support of `m` admits exactly
/// one permutation, `det = sign(s) * prod_i m[i][s(i)]`. Both facts are
/// checked here; `selector[i]` is the column chosen for row `i`.
pub fn det_poly_with_cover(m: &PolyMatrix, selector: &[usize]) -> Result<IntPolynomial> {
    let n = m.dim();
    let mut hit = vec![false; n];
    if selector.len() != n || selector.iter().any(|&j| j >= n || std::mem::replace(&mut hit[j], true)) {
        return Err(Error::Precondition("selector is not a permutation of the matrix indices".into()));
    }
    if let Some(i) = (0..n).find(|&i| m.rows[i][selector[i]].is_zero()) {
        return Err(Error::Precondition(format!("selected entry ({i}, {}) is zero", selector[i])));
    }
    let covers = permanent(&m.support())?;
    if !covers.is_one() {
        return Err(Error::Precondition(format!("support has {covers} cycle covers, not exactly one")));
    }
    let product = (0..n).fold(IntPolynomial::one(), |acc, i| &acc * &m.rows[i][selector[i]]);
    Ok(if permutation_sign(selector) < 0 { -&product } else { product })
}


#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[i64]) -> IntPolynomial {
        IntPolynomial::from_coeffs(v)
    }

    #[test]
    fn one_by_one_and_small_cases() {
        let m = PolyMatrix::new(vec![0], vec![vec![IntPolynomial::x_pow(2)]]).unwrap();
        assert_eq!(det_poly(&m).unwrap(), IntPolynomial::x_pow(2));
        // [[x, 1], [1, x]] -> x^2 - 1
        let m = PolyMatrix::new(vec![0, 1], vec![vec![c(&[0, 1]), c(&[1])], vec![c(&[1]), c(&[0, 1])]]).unwrap();
        assert_eq!(det_poly(&m).unwrap(), c(&[-1, 0, 1]));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion_on_integers() {
        let rows = [[2, -1, 0, 3], [1, 4, -2, 0], [0, 5, 1, -1], [3, 0, 2, 2]];
        let m: Vec<Vec<IntPolynomial>> = rows.iter().map(|r| r.iter().map(|&v| c(&[v])).collect()).collect();
        fn cof(a: &[Vec<i64>]) -> i64 {
            if a.len() == 1 {
                return a[0][0];
            }
            (0..a.len())
                .map(|j| {
                    let minor: Vec<Vec<i64>> =
                        a[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect()).collect();
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * a[0][j] * cof(&minor)
                })
                .sum()
        }
        let ints: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        assert_eq!(bareiss(m), c(&[cof(&ints)]));
    }

    #[test]
    fn cover_shortcut_signs() {
        // A 2-cycle: [[0, x], [x^3, 0]] has det -x^4.
        let m = PolyMatrix::new(
            vec![0, 1],
            vec![vec![IntPolynomial::zero(), IntPolynomial::x_pow(1)], vec![IntPolynomial::x_pow(3), IntPolynomial::zero()]],
        )
        .unwrap();
        let d = det_poly_with_cover(&m, &[1, 0]).unwrap();
        assert_eq!(d, -&IntPolynomial::x_pow(4));
        assert_eq!(d, det_poly(&m).unwrap());
        assert!(det_poly_with_cover(&m, &[0, 1]).is_err());
    }
}
