use std::collections::HashSet;

use super::{split_balanced, BalancedPair, LiftedMorphism};
use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::stream::WordStream;
use crate::word::{occurrences, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedScan {
    /// One pair `(x y, y x)` per distinct return word `y`, in order of discovery.
    pub pairs: Vec<BalancedPair>,
    pub return_words: Vec<Word>,
    /// No new return word appeared in the final fifth of the scanned prefix.
    pub stable: bool,
    pub occurrences: usize,
}

fn check_prefix(stream: &WordStream, x: &Word) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Precondition("the prefix x must be non-empty".into()));
    }
    if stream.prefix(x.len())? != *x {
        return Err(Error::Precondition(format!("{x} is not a prefix of the fixed point")));
    }
    Ok(())
}

fn first_letter(x: &Word) -> Result<Letter> {
    x.first().copied().ok_or_else(|| Error::Precondition("the prefix x must be non-empty".into()))
}

/// For consecutive occurrences `p < q` of `x`, the pair
/// `(u[p..q], u[p+|x|..q+|x|])`; this is `(x y, y x)` when the occurrences
/// do not overlap.
fn pair_between(u: &[Letter], x_len: usize, p: usize, q: usize) -> Result<BalancedPair> {
    BalancedPair::new(Word::from(&u[p..q]), Word::from(&u[p + x_len..q + x_len]))
}

/// Scans `u[..horizon]` for consecutive occurrences of `x` and collects one
/// balanced pair per distinct return word.
pub fn seed_return_pairs(m: &Morphism, x: &Word, horizon: usize, budget: usize) -> Result<SeedScan> {
    let stream = WordStream::new(m.clone(), first_letter(x)?)?;
    check_prefix(&stream, x)?;
    let u = stream.prefix(horizon)?;
    let occ = occurrences(&u, x, usize::MAX)?;
    if occ.len() < 2 {
        return Err(Error::Budget(format!("{x} does not return within the first {horizon} letters")));
    }
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    let mut return_words = Vec::new();
    let mut last_new = 0;
    for win in occ.windows(2) {
        let (p, q) = (win[0], win[1]);
        if q + x.len() > u.len() {
            break;
        }
        let pair = pair_between(&u, x.len(), p, q)?;
        if seen.insert(pair.clone()) {
            if pairs.len() == budget {
                return Err(Error::Budget(format!("more than {budget} distinct return words")));
            }
            let y = if q >= p + x.len() { Word::from(&u[p + x.len()..q]) } else { Word::empty() };
            return_words.push(y);
            pairs.push(pair);
            last_new = q;
        }
    }
    let stable = (last_new as u128) * 5 < (horizon as u128) * 4;
    Ok(SeedScan { pairs, return_words, stable, occurrences: occ.len() })
}

/// A prefix of the coded word `w` over the lifted alphabet, with
/// `pi_1(w) = u[..realized]` and `pi_2(w) = u[|x|..realized + |x|]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPrefix {
    pub symbols: Vec<usize>,
    pub realized: usize,
    pub shift: Word,
}

/// Codes the first `n_letters` of the fixed point by cutting it at the
/// occurrences of `x` and decomposing each return pair over the lift.
pub fn code_fixed_point(lift: &LiftedMorphism, x: &Word, n_letters: usize) -> Result<CodedPrefix> {
    let stream = WordStream::new(lift.base().clone(), first_letter(x)?)?;
    check_prefix(&stream, x)?;
    let u = stream.prefix(n_letters + x.len())?;
    let occ = occurrences(&u, x, usize::MAX)?;
    let mut symbols = Vec::new();
    let mut realized = 0;
    for win in occ.windows(2) {
        let (p, q) = (win[0], win[1]);
        if p >= n_letters {
            break;
        }
        let pair = pair_between(&u, x.len(), p, q)?;
        for part in split_balanced(pair.top(), pair.bottom()) {
            let id = lift
                .id_of(&part)
                .ok_or_else(|| Error::Precondition(format!("factor {part} at position {p} is not in the lifted alphabet")))?;
            symbols.push(id);
        }
        realized = q;
    }
    if symbols.is_empty() {
        return Err(Error::Budget(format!("{x} does not return within the first {n_letters} letters")));
    }
    Ok(CodedPrefix { symbols, realized, shift: x.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse_digits(s).unwrap()
    }

    #[test]
    fn tribonacci_return_words() {
        let scan = seed_return_pairs(&Morphism::tribonacci(), &w("0"), 100, 64).unwrap();
        let mut ys: Vec<String> = scan.return_words.iter().map(|y| y.to_string()).collect();
        ys.sort();
        assert_eq!(ys, vec!["", "1", "2"]);
        assert!(scan.pairs.contains(&BalancedPair::new(w("01"), w("10")).unwrap()));
        assert!(scan.pairs.contains(&BalancedPair::new(w("02"), w("20")).unwrap()));
        assert!(scan.pairs.contains(&BalancedPair::new(w("0"), w("0")).unwrap()));
        assert!(scan.stable);
    }

    #[test]
    fn fibonacci_return_words() {
        let scan = seed_return_pairs(&Morphism::fibonacci(), &w("0"), 100, 64).unwrap();
        assert_eq!(scan.pairs, vec![BalancedPair::new(w("01"), w("10")).unwrap(), BalancedPair::new(w("0"), w("0")).unwrap()]);
    }

    #[test]
    fn scan_errors() {
        let fib = Morphism::fibonacci();
        assert!(matches!(seed_return_pairs(&fib, &w("1"), 100, 8), Err(Error::Precondition(_))));
        let whole = crate::stream::fixed_point_prefix(&fib, Letter(0), 12).unwrap();
        assert!(matches!(seed_return_pairs(&fib, &whole, 12, 8), Err(Error::Budget(_))));
        assert!(matches!(seed_return_pairs(&fib, &w("0"), 100, 1), Err(Error::Budget(_))));
    }

    #[test]
    fn longer_prefixes_give_overlapping_returns() {
        // "010" returns to itself with overlap inside the Fibonacci word.
        let scan = seed_return_pairs(&Morphism::fibonacci(), &w("010"), 400, 64).unwrap();
        for p in &scan.pairs {
            assert_eq!(p.top().len(), p.bottom().len());
        }
        assert!(!scan.pairs.is_empty());
    }
}
