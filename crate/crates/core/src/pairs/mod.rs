//! Balanced pairs, their irreducible decomposition, and the lifted
//! morphism obtained by closing a seed set under `phi`.

mod closure;
mod lifted;
mod seeds;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::word::{abelianization, Letter, Word};

pub use closure::{balanced_pair_closure, ClosureResult, ClosureStatus, DEFAULT_MAX_ROUNDS, DEFAULT_MAX_SYMBOLS};
pub use lifted::{
    coincidence_condition, lifted_lengths, mismatch_density, CoincidenceReport, LengthTable, LiftFile, LiftedMorphism,
    PairKind, PairSymbol, SymbolFile,
};
pub use seeds::{code_fixed_point, seed_return_pairs, CodedPrefix, SeedScan};

/// Two words of equal length with the same letter counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BalancedPair {
    top: Word,
    bottom: Word,
}

fn alphabet_bound(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().chain(b).map(|l| l.index() + 1).max().unwrap_or(0)
}

impl BalancedPair {
    pub fn new(top: Word, bottom: Word) -> Result<Self> {
        if top.is_empty() || bottom.is_empty() {
            return Err(Error::Precondition("balanced pairs have non-empty components".into()));
        }
        let k = alphabet_bound(&top, &bottom);
        let (at, ab) = (abelianization(&top, k)?, abelianization(&bottom, k)?);
        if at != ab {
            return Err(Error::Imbalance { top: at, bottom: ab });
        }
        Ok(BalancedPair { top, bottom })
    }

    pub fn coincidence(a: Letter) -> Self {
        BalancedPair { top: Word(vec![a]), bottom: Word(vec![a]) }
    }

    pub fn top(&self) -> &Word {
        &self.top
    }

    pub fn bottom(&self) -> &Word {
        &self.bottom
    }

    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    pub fn is_coincidence(&self) -> bool {
        self.top.len() == 1 && self.top == self.bottom
    }

    /// Positions where the two rows differ.
    pub fn mismatch_offsets(&self) -> impl Iterator<Item = usize> + '_ {
        self.top.iter().zip(self.bottom.iter()).enumerate().filter(|(_, (a, b))| a != b).map(|(i, _)| i)
    }
}

impl fmt::Display for BalancedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};{}]", self.top, self.bottom)
    }
}

/// Builds a balanced pair, reporting the differing abelian vectors otherwise.
pub fn make_balanced_pair(top: Word, bottom: Word) -> Result<BalancedPair> {
    BalancedPair::new(top, bottom)
}

/// Splits `(top, bottom)` at every prefix length where the two prefixes have
/// equal letter counts. Inputs must have equal length and equal counts.
pub(crate) fn split_balanced(top: &[Letter], bottom: &[Letter]) -> Vec<BalancedPair> {
    debug_assert_eq!(top.len(), bottom.len());
    let k = alphabet_bound(top, bottom);
    let mut diff = vec![0i64; k];
    let mut nonzero = 0usize;
    let bump = |slot: &mut i64, delta: i64, nonzero: &mut usize| {
        let was = *slot != 0;
        *slot += delta;
        match (was, *slot != 0) {
            (false, true) => *nonzero += 1,
            (true, false) => *nonzero -= 1,
            _ => {}
        }
    };
    let mut out = Vec::new();
    let mut start = 0;
    for i in 0..top.len() {
        bump(&mut diff[top[i].index()], 1, &mut nonzero);
        bump(&mut diff[bottom[i].index()], -1, &mut nonzero);
        if nonzero == 0 {
            out.push(BalancedPair { top: Word::from(&top[start..=i]), bottom: Word::from(&bottom[start..=i]) });
            start = i + 1;
        }
    }
    debug_assert_eq!(start, top.len(), "input was not balanced");
    out
}

/// The unique finest factorization of `p` into irreducible balanced pairs.
pub fn decompose_irreducible(p: &BalancedPair) -> Vec<BalancedPair> {
    split_balanced(&p.top, &p.bottom)
}

/// Irreducible factors of `(phi(top), phi(bottom))`.
pub fn lift_image(m: &Morphism, p: &BalancedPair) -> Result<Vec<BalancedPair>> {
    let top = m.apply(&p.top)?;
    let bottom = m.apply(&p.bottom)?;
    Ok(split_balanced(&top, &bottom))
}
