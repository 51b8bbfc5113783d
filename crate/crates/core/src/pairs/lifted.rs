use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::BalancedPair;
use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    Coincidence,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSymbol {
    pub id: usize,
    pub pair: BalancedPair,
    pub kind: PairKind,
}

impl PairSymbol {
    pub fn is_mismatch(&self) -> bool {
        self.kind == PairKind::Mismatch
    }
}

/// The morphism induced by `phi` on a closed alphabet of irreducible
/// balanced pairs.
#[derive(Debug, Clone)]
pub struct LiftedMorphism {
    base: Morphism,
    symbols: Vec<PairSymbol>,
    images: Vec<Vec<usize>>,
    index: HashMap<BalancedPair, usize>,
}

impl PartialEq for LiftedMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.symbols == other.symbols && self.images == other.images
    }
}

impl LiftedMorphism {
    /// Assembles a lift from its parts and checks every structural invariant:
    /// irreducible symbols, images that realize `phi` of each pair, and
    /// coincidences mapping to coincidences.
    pub fn new(base: Morphism, pairs: Vec<BalancedPair>, images: Vec<Vec<usize>>) -> Result<Self> {
        if pairs.len() != images.len() {
            return Err(Error::Precondition(format!("{} symbols but {} images", pairs.len(), images.len())));
        }
        let mut index = HashMap::new();
        let mut symbols = Vec::with_capacity(pairs.len());
        for (id, pair) in pairs.into_iter().enumerate() {
            pair.top().check_alphabet(base.alphabet_size())?;
            pair.bottom().check_alphabet(base.alphabet_size())?;
            if super::decompose_irreducible(&pair).len() != 1 {
                return Err(Error::Precondition(format!("symbol {id} = {pair} is not irreducible")));
            }
            if index.insert(pair.clone(), id).is_some() {
                return Err(Error::Precondition(format!("symbol {pair} listed twice")));
            }
            let kind = if pair.is_coincidence() { PairKind::Coincidence } else { PairKind::Mismatch };
            symbols.push(PairSymbol { id, pair, kind });
        }
        let lift = LiftedMorphism { base, symbols, images, index };
        lift.validate()?;
        Ok(lift)
    }

    fn validate(&self) -> Result<()> {
        for (id, img) in self.images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::Precondition(format!("image of symbol {id} is empty")));
            }
            if let Some(&bad) = img.iter().find(|&&s| s >= self.symbols.len()) {
                return Err(Error::Precondition(format!("image of symbol {id} mentions unknown symbol {bad}")));
            }
            let (t, b) = self.realize(img);
            let p = &self.symbols[id].pair;
            if t != self.base.apply(p.top())? || b != self.base.apply(p.bottom())? {
                return Err(Error::Precondition(format!("image of symbol {id} does not realize phi({p})")));
            }
            if !self.symbols[id].is_mismatch() && img.iter().any(|&s| self.symbols[s].is_mismatch()) {
                return Err(Error::Precondition(format!("coincidence {id} maps onto a mismatch")));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Morphism {
        &self.base
    }

    pub fn symbols(&self) -> &[PairSymbol] {
        &self.symbols
    }

    pub fn symbol(&self, id: usize) -> &PairSymbol {
        &self.symbols[id]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    pub fn image(&self, id: usize) -> &[usize] {
        &self.images[id]
    }

    pub fn id_of(&self, p: &BalancedPair) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn mismatch_ids(&self) -> Vec<usize> {
        self.symbols.iter().filter(|s| s.is_mismatch()).map(|s| s.id).collect()
    }

    /// Componentwise concatenation of the pairs named by `ids`.
    pub fn realize(&self, ids: &[usize]) -> (Word, Word) {
        let mut t = Word::empty();
        let mut b = Word::empty();
        for &id in ids {
            t.extend_from(self.symbols[id].pair.top());
            b.extend_from(self.symbols[id].pair.bottom());
        }
        (t, b)
    }

    pub fn apply(&self, ids: &[usize]) -> Vec<usize> {
        ids.iter().flat_map(|&id| self.images[id].iter().copied()).collect()
    }

    /// `phi~^n(ids)`, refusing to grow past `budget` symbols.
    pub fn apply_n(&self, ids: &[usize], n: usize, budget: usize) -> Result<Vec<usize>> {
        let mut cur = ids.to_vec();
        for _ in 0..n {
            cur = self.apply(&cur);
            if cur.len() > budget {
                return Err(Error::Budget(format!("expansion exceeds {budget} symbols")));
            }
        }
        Ok(cur)
    }

    /// Same system with the images of two symbols exchanged; used to check
    /// that consistency tests notice a damaged table.
    /// The symbol bijection onto `other` that preserves realizations, when it
    /// also carries every image onto the corresponding image.
    pub fn isomorphism_to(&self, other: &LiftedMorphism) -> Option<Vec<usize>> {
        if self.len() != other.len() || self.base != other.base {
            return None;
        }
        let map = self.symbols.iter().map(|s| other.id_of(&s.pair)).collect::<Option<Vec<_>>>()?;
        let agrees = (0..self.len()).all(|i| {
            let mapped: Vec<usize> = self.images[i].iter().map(|&d| map[d]).collect();
            mapped == other.images[map[i]]
        });
        agrees.then_some(map)
    }

    pub fn with_swapped_images(&self, a: usize, b: usize) -> LiftedMorphism {
        let mut out = self.clone();
        out.images.swap(a, b);
        out
    }

    pub fn to_file(&self) -> LiftFile {
        LiftFile {
            symbols: self
                .symbols
                .iter()
                .map(|s| SymbolFile {
                    id: s.id,
                    top: s.pair.top().indices(),
                    bottom: s.pair.bottom().indices(),
                    kind: match s.kind {
                        PairKind::Coincidence => "C".into(),
                        PairKind::Mismatch => "M".into(),
                    },
                })
                .collect(),
            images: self.images.clone(),
        }
    }

    pub fn from_file(file: &LiftFile, base: Morphism) -> Result<Self> {
        let mut pairs = Vec::with_capacity(file.symbols.len());
        for (pos, s) in file.symbols.iter().enumerate() {
            if s.id != pos {
                return Err(Error::Parse(format!("symbol ids must be 0, 1, …; found {} at position {pos}", s.id)));
            }
            let pair = BalancedPair::new(Word::from_indices(s.top.iter().copied()), Word::from_indices(s.bottom.iter().copied()))?;
            let want = if pair.is_coincidence() { "C" } else { "M" };
            if s.kind != want {
                return Err(Error::Parse(format!("symbol {pos} has kind {:?}, expected {want}", s.kind)));
            }
            pairs.push(pair);
        }
        LiftedMorphism::new(base, pairs, file.images.clone())
    }
}

impl fmt::Display for LiftedMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            let tag = if s.is_mismatch() { 'M' } else { 'C' };
            let img: Vec<String> = self.images[s.id].iter().map(|i| format!("g{i}")).collect();
            writeln!(f, "g{:<3} {tag} {:<24} -> {}", s.id, s.pair.to_string(), img.join(" "))?;
        }
        Ok(())
    }
}

/// JSON form `{"symbols": [{"id", "top", "bottom", "kind"}], "images": [[ids]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftFile {
    pub symbols: Vec<SymbolFile>,
    pub images: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolFile {
    pub id: usize,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    pub kind: String,
}

/// Per-level data for every symbol, in machine integers: the top length
/// `|pi_1(phi~^n(g))|`, the length lying inside mismatch symbols, and the
/// offsets of the first and last mismatching column.
#[derive(Debug, Clone)]
pub struct LengthTable {
    pub lengths: Vec<Vec<u64>>,
    pub mismatch_weight: Vec<Vec<u64>>,
    pub first_mismatch: Vec<Vec<Option<u64>>>,
    pub last_mismatch: Vec<Vec<Option<u64>>>,
}

impl LengthTable {
    pub fn new(lift: &LiftedMorphism, max_level: usize) -> Result<Self> {
        let overflow = || Error::Budget(format!("symbol lengths overflow u64 below level {max_level}"));
        let syms = lift.symbols();
        let mut lengths = vec![syms.iter().map(|s| s.pair.len() as u64).collect::<Vec<_>>()];
        let mut weight = vec![syms.iter().map(|s| if s.is_mismatch() { s.pair.len() as u64 } else { 0 }).collect::<Vec<_>>()];
        let mut first = vec![syms.iter().map(|s| s.pair.mismatch_offsets().next().map(|o| o as u64)).collect::<Vec<_>>()];
        let mut last = vec![syms.iter().map(|s| s.pair.mismatch_offsets().last().map(|o| o as u64)).collect::<Vec<_>>()];
        for lvl in 0..max_level {
            let (l, w, f, la) = (&lengths[lvl], &weight[lvl], &first[lvl], &last[lvl]);
            let mut nl = Vec::with_capacity(syms.len());
            let mut nw = Vec::with_capacity(syms.len());
            let mut nf = Vec::with_capacity(syms.len());
            let mut nla = Vec::with_capacity(syms.len());
            for img in lift.images() {
                let mut offset = 0u64;
                let mut wt = 0u64;
                let mut fst = None;
                let mut lst = None;
                for &d in img {
                    if fst.is_none() {
                        fst = f[d].map(|o| offset + o);
                    }
                    if let Some(o) = la[d] {
                        lst = Some(offset + o);
                    }
                    wt = wt.checked_add(w[d]).ok_or_else(overflow)?;
                    offset = offset.checked_add(l[d]).ok_or_else(overflow)?;
                }
                nl.push(offset);
                nw.push(wt);
                nf.push(fst);
                nla.push(lst);
            }
            lengths.push(nl);
            weight.push(nw);
            first.push(nf);
            last.push(nla);
        }
        Ok(LengthTable { lengths, mismatch_weight: weight, first_mismatch: first, last_mismatch: last })
    }

    pub fn levels(&self) -> usize {
        self.lengths.len()
    }
}

/// `|pi_1(phi~^n(g))|` for every symbol, as exact integers.
pub fn lifted_lengths(lift: &LiftedMorphism, n: usize) -> Vec<BigUint> {
    let mut cur: Vec<BigUint> = lift.symbols().iter().map(|s| BigUint::from(s.pair.len())).collect();
    for _ in 0..n {
        cur = lift.images().iter().map(|img| img.iter().map(|&d| &cur[d]).sum()).collect();
    }
    cur
}

fn mismatch_weights(lift: &LiftedMorphism, n: usize) -> Vec<BigUint> {
    let mut cur: Vec<BigUint> = lift
        .symbols()
        .iter()
        .map(|s| if s.is_mismatch() { BigUint::from(s.pair.len()) } else { BigUint::zero() })
        .collect();
    for _ in 0..n {
        cur = lift.images().iter().map(|img| img.iter().map(|&d| &cur[d]).sum()).collect();
    }
    cur
}

/// Fraction of the top row of `phi~^{n0}(w)` covered by mismatch symbols.
pub fn mismatch_density(lift: &LiftedMorphism, w_prefix: &[usize], n0: usize) -> Result<BigRational> {
    if w_prefix.is_empty() {
        return Err(Error::Precondition("mismatch density needs a non-empty word".into()));
    }
    if let Some(&bad) = w_prefix.iter().find(|&&s| s >= lift.len()) {
        return Err(Error::Precondition(format!("unknown symbol {bad}")));
    }
    let lens = lifted_lengths(lift, n0);
    let wts = mismatch_weights(lift, n0);
    let total: BigUint = w_prefix.iter().map(|&s| &lens[s]).sum();
    let bad: BigUint = w_prefix.iter().map(|&s| &wts[s]).sum();
    Ok(BigRational::new(BigInt::from(bad), BigInt::from(total)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoincidenceReport {
    pub satisfied: bool,
    /// Least `k` such that `phi~^k(g)` contains a coincidence; `None` when never.
    pub horizons: Vec<Option<usize>>,
    /// Mismatch density of `phi~^n` applied to all mismatch symbols, for `n = 0..=|Gamma|`.
    pub density_curve: Vec<BigRational>,
}

/// Least-fixpoint reachability of coincidences, at most `|Gamma|` rounds.
pub fn coincidence_condition(lift: &LiftedMorphism) -> CoincidenceReport {
    let n = lift.len();
    let mut horizons: Vec<Option<usize>> =
        lift.symbols().iter().map(|s| if s.is_mismatch() { None } else { Some(0) }).collect();
    for round in 1..=n {
        let marked: Vec<bool> = horizons.iter().map(Option::is_some).collect();
        let mut changed = false;
        for (id, h) in horizons.iter_mut().enumerate() {
            if h.is_none() && lift.image(id).iter().any(|&d| marked[d]) {
                *h = Some(round);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mismatches = lift.mismatch_ids();
    let density_curve = if mismatches.is_empty() {
        Vec::new()
    } else {
        (0..=n).map(|k| mismatch_density(lift, &mismatches, k).expect("valid ids")).collect()
    };
    CoincidenceReport { satisfied: horizons.iter().all(Option::is_some), horizons, density_curve }
}
