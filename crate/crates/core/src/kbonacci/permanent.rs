//! Counting perfect matchings of a 0/1 matrix, i.e. cycle covers of the
//! digraph it is the adjacency matrix of.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

const MAX_DIM: usize = 128;
const RYSER_DIM: usize = 20;
/// Work units: one per expansion call plus `2^m` per Ryser evaluation of size `m`.
const WORK_BUDGET: u64 = 1 << 26;

/// Permanent of a square 0/1 matrix. Rows or columns with a single entry are
/// forced first; what remains goes to Ryser's formula when small, otherwise
/// to expansion along the sparsest row under a call budget.
pub fn permanent(a: &[Vec<bool>]) -> Result<BigInt> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition("permanent needs a square matrix".into()));
    }
    if n > MAX_DIM {
        return Err(Error::Budget(format!("permanent of a {n}x{n} matrix exceeds the {MAX_DIM} limit")));
    }
    permanent_with_budget(a, WORK_BUDGET)
}

pub(crate) fn permanent_with_budget(a: &[Vec<bool>], budget: u64) -> Result<BigInt> {
    let mut work = Work { used: 0, budget };
    let rows: Vec<usize> = (0..a.len()).collect();
    perm_rec(a, rows.clone(), rows, &mut work)
}

struct Work {
    used: u64,
    budget: u64,
}

impl Work {
    fn spend(&mut self, units: u64) -> Result<()> {
        self.used += units;
        if self.used > self.budget {
            return Err(Error::Budget(format!("permanent needs more than {} work units", self.budget)));
        }
        Ok(())
    }
}

fn perm_rec(a: &[Vec<bool>], mut rows: Vec<usize>, mut cols: Vec<usize>, work: &mut Work) -> Result<BigInt> {
    work.spend(1)?;
    // Forced entries: a line with one entry fixes that entry.
    loop {
        if rows.is_empty() {
            return Ok(BigInt::one());
        }
        let mut changed = false;
        for ri in 0..rows.len() {
            let hits: Vec<usize> = (0..cols.len()).filter(|&ci| a[rows[ri]][cols[ci]]).collect();
            match hits.len() {
                0 => return Ok(BigInt::zero()),
                1 => {
                    rows.remove(ri);
                    cols.remove(hits[0]);
                    changed = true;
                    break;
                }
                _ => {}
            }
        }
        if changed {
            continue;
        }
        for ci in 0..cols.len() {
            let hits: Vec<usize> = (0..rows.len()).filter(|&ri| a[rows[ri]][cols[ci]]).collect();
            match hits.len() {
                0 => return Ok(BigInt::zero()),
                1 => {
                    rows.remove(hits[0]);
                    cols.remove(ci);
                    changed = true;
                    break;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    if rows.len() <= RYSER_DIM {
        work.spend(1 << rows.len())?;
        let sub: Vec<Vec<bool>> = rows.iter().map(|&r| cols.iter().map(|&c| a[r][c]).collect()).collect();
        return Ok(permanent_ryser(&sub));
    }
    let (ri, _) = rows
        .iter()
        .enumerate()
        .map(|(i, &r)| (i, cols.iter().filter(|&&c| a[r][c]).count()))
        .min_by_key(|&(_, cnt)| cnt)
        .expect("rows is non-empty");
    let r = rows.remove(ri);
    let mut total = BigInt::zero();
    for ci in 0..cols.len() {
        if a[r][cols[ci]] {
            let mut sub_cols = cols.clone();
            sub_cols.remove(ci);
            total += perm_rec(a, rows.clone(), sub_cols, work)?;
        }
    }
    Ok(total)
}

/// Ryser's inclusion-exclusion formula with Gray-code updates. Panics above
/// twenty rows, where the intermediate sums would leave `i128`.
pub fn permanent_ryser(a: &[Vec<bool>]) -> BigInt {
    let n = a.len();
    assert!(n <= RYSER_DIM, "ryser is limited to {RYSER_DIM} rows");
    if n == 0 {
        return BigInt::one();
    }
    let mut sums = vec![0i64; n];
    let mut total: i128 = 0;
    for step in 1u64..(1 << n) {
        let bit = step.trailing_zeros() as usize;
        let next = step ^ (step >> 1);
        let adding = next & (1 << bit) != 0;
        for (s, row) in sums.iter_mut().zip(a) {
            if row[bit] {
                *s += if adding { 1 } else { -1 };
            }
        }
        let prod = sums.iter().try_fold(1i128, |acc, &s| if s == 0 { None } else { Some(acc * s as i128) });
        if let Some(p) = prod {
            let sign = if (n as u32 - next.count_ones()).is_multiple_of(2) { 1 } else { -1 };
            total += sign * p;
        }
    }
    BigInt::from(total)
}

/// Sum over all permutations; only for tests and tiny inputs.
pub fn permanent_brute(a: &[Vec<bool>]) -> BigInt {
    fn go(a: &[Vec<bool>], row: usize, used: &mut Vec<bool>) -> u64 {
        if row == a.len() {
            return 1;
        }
        let mut c = 0;
        for j in 0..a.len() {
            if a[row][j] && !used[j] {
                used[j] = true;
                c += go(a, row + 1, used);
                used[j] = false;
            }
        }
        c
    }
    BigInt::from(go(a, 0, &mut vec![false; a.len()]))
}
