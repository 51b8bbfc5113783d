use std::collections::{HashMap, VecDeque};

use super::{lift_image, split_balanced, BalancedPair, LiftedMorphism};
use crate::error::Result;
use crate::morphism::Morphism;

pub const DEFAULT_MAX_SYMBOLS: usize = 4096;
pub const DEFAULT_MAX_ROUNDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureStatus {
    Closed,
    BudgetExceeded,
}

#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub status: ClosureStatus,
    pub lifted: Option<LiftedMorphism>,
    pub seed_pairs: Vec<BalancedPair>,
    /// Symbols discovered so far, in id order; complete when closed.
    pub discovered: Vec<BalancedPair>,
    /// Breadth-first rounds processed.
    pub iterations_used: usize,
}

/// Closes the irreducible factors of `seeds` under lift-and-decompose.
/// Symbols are numbered in order of first discovery, processing the queue
/// first in, first out.
pub fn balanced_pair_closure(
    m: &Morphism,
    seeds: &[BalancedPair],
    max_symbols: usize,
    max_rounds: usize,
) -> Result<ClosureResult> {
    let mut ids: HashMap<BalancedPair, usize> = HashMap::new();
    let mut symbols: Vec<BalancedPair> = Vec::new();
    let mut images: Vec<Vec<usize>> = Vec::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();

    let over_budget = |symbols: Vec<BalancedPair>, rounds: usize| ClosureResult {
        status: ClosureStatus::BudgetExceeded,
        lifted: None,
        seed_pairs: seeds.to_vec(),
        discovered: symbols,
        iterations_used: rounds,
    };

    for seed in seeds {
        seed.top().check_alphabet(m.alphabet_size())?;
        seed.bottom().check_alphabet(m.alphabet_size())?;
        for part in split_balanced(seed.top(), seed.bottom()) {
            if !ids.contains_key(&part) {
                if symbols.len() == max_symbols {
                    return Ok(over_budget(symbols, 0));
                }
                ids.insert(part.clone(), symbols.len());
                queue.push_back((symbols.len(), 0));
                symbols.push(part);
            }
        }
    }

    let mut rounds = 0;
    while let Some((id, depth)) = queue.pop_front() {
        if depth >= max_rounds {
            return Ok(over_budget(symbols, rounds));
        }
        rounds = rounds.max(depth + 1);
        let mut image = Vec::new();
        for part in lift_image(m, &symbols[id])? {
            let pid = match ids.get(&part) {
                Some(&pid) => pid,
                None => {
                    if symbols.len() == max_symbols {
                        return Ok(over_budget(symbols, rounds));
                    }
                    let pid = symbols.len();
                    ids.insert(part.clone(), pid);
                    queue.push_back((pid, depth + 1));
                    symbols.push(part);
                    pid
                }
            };
            image.push(pid);
        }
        if images.len() <= id {
            images.resize(id + 1, Vec::new());
        }
        images[id] = image;
    }

    let lifted = LiftedMorphism::new(m.clone(), symbols.clone(), images)?;
    Ok(ClosureResult {
        status: ClosureStatus::Closed,
        lifted: Some(lifted),
        seed_pairs: seeds.to_vec(),
        discovered: symbols,
        iterations_used: rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{coincidence_condition, seed_return_pairs};
    use crate::word::Word;

    fn bp(t: &str, b: &str) -> BalancedPair {
        BalancedPair::new(Word::parse_digits(t).unwrap(), Word::parse_digits(b).unwrap()).unwrap()
    }

    #[test]
    fn fibonacci_closes_on_four_symbols() {
        let fib = Morphism::fibonacci();
        let seeds = seed_return_pairs(&fib, &Word::parse_digits("0").unwrap(), 200, 64).unwrap().pairs;
        let res = balanced_pair_closure(&fib, &seeds, DEFAULT_MAX_SYMBOLS, DEFAULT_MAX_ROUNDS).unwrap();
        assert_eq!(res.status, ClosureStatus::Closed);
        let mut got = res.discovered.clone();
        got.sort();
        let mut want = vec![bp("01", "10"), bp("10", "01"), bp("0", "0"), bp("1", "1")];
        want.sort();
        assert_eq!(got, want);
        assert!(coincidence_condition(res.lifted.as_ref().unwrap()).satisfied);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let trib = Morphism::tribonacci();
        let seeds = vec![bp("01", "10"), bp("02", "20"), bp("0", "0")];
        let res = balanced_pair_closure(&trib, &seeds, 1, DEFAULT_MAX_ROUNDS).unwrap();
        assert_eq!(res.status, ClosureStatus::BudgetExceeded);
        assert!(res.lifted.is_none());
        let res = balanced_pair_closure(&trib, &seeds, DEFAULT_MAX_SYMBOLS, 1).unwrap();
        assert_eq!(res.status, ClosureStatus::BudgetExceeded);
    }

    #[test]
    fn numbering_is_deterministic() {
        let trib = Morphism::tribonacci();
        let seeds = vec![bp("01", "10"), bp("02", "20"), bp("0", "0")];
        let a = balanced_pair_closure(&trib, &seeds, 4096, 64).unwrap();
        let b = balanced_pair_closure(&trib, &seeds, 4096, 64).unwrap();
        assert_eq!(a.discovered, b.discovered);
        assert_eq!(a.lifted, b.lifted);
    }

    #[test]
    fn trapped_mismatch_fails_coincidence() {
        // 0 -> 01, 1 -> 10 lifts (01,10) to (0110,1001) = (01,10)(10,01) and back,
        // so no coincidence is ever produced.
        let tm = Morphism::from_digit_images(&["01", "10"]).unwrap();
        let res = balanced_pair_closure(&tm, &[bp("01", "10")], 64, 64).unwrap();
        let report = coincidence_condition(res.lifted.as_ref().unwrap());
        assert!(!report.satisfied);
        assert!(report.horizons.iter().all(Option::is_none));
    }
}
