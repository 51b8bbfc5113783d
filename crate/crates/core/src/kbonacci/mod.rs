//! The explicit balanced-pair system of the k-bonacci morphism: symbols
//! built from iterated palindromic closures, the lifted morphism given by
//! a closed-form case table, and its incidence graph.

mod graph;
pub mod permanent;

use std::fmt;

use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::pairs::{lift_image, BalancedPair, LiftedMorphism};
use crate::poly::{build_mn, det_poly, det_poly_with_cover, IntPolynomial, PolyMatrix};
use crate::word::{Letter, Word};

pub use graph::{
    alternating_cycle, canonical_cycle_cover, count_cycle_covers, cycle_template_holds, incidence_graph, CycleCover,
    IncidenceGraph,
};

/// A symbol of the k-bonacci pair alphabet. Triples use `-1` for the
/// empty closure and are strictly monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KbSymbol {
    Diag(i32),
    Triple(i32, i32, i32),
}

impl KbSymbol {
    fn admissible(self, k: usize) -> bool {
        let ok = |v: i32| (-1..k as i32).contains(&v);
        match self {
            KbSymbol::Diag(a) => (0..k as i32).contains(&a),
            KbSymbol::Triple(a, b, c) => ok(a) && ok(b) && ok(c) && ((a > b && b > c) || (a < b && b < c)),
        }
    }
}

impl fmt::Display for KbSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KbSymbol::Diag(a) => write!(f, "[{a}]"),
            KbSymbol::Triple(a, b, c) => write!(f, "[{a},{b},{c}]"),
        }
    }
}

/// `pal(-1) = ε`, `pal(a) = pal(a-1) a pal(a-1)`.
pub fn pal(a: i32, k: usize) -> Result<Word> {
    if a < -1 || a >= k as i32 {
        return Err(Error::Domain(format!("pal({a}) needs -1 <= a < {k}")));
    }
    let mut w = Word::empty();
    for letter in 0..=a {
        let prev = w.clone();
        w.push(Letter(letter as u16));
        w.extend_from(&prev);
    }
    Ok(w)
}

fn strip_prefix(w: &Word, p: &Word, what: &str) -> Result<Word> {
    w.strip_prefix(&p[..]).map(Word::from).ok_or_else(|| Error::Internal(format!("{p} is not a prefix of {w} in {what}")))
}

fn strip_suffix(w: &Word, s: &Word, what: &str) -> Result<Word> {
    w.strip_suffix(&s[..]).map(Word::from).ok_or_else(|| Error::Internal(format!("{s} is not a suffix of {w} in {what}")))
}

/// The balanced pair named by a symbol, with the free-group cancellations
/// carried out literally and checked.
pub fn realize(sym: KbSymbol, k: usize) -> Result<BalancedPair> {
    if !sym.admissible(k) {
        return Err(Error::Domain(format!("{sym} is not a symbol for k = {k}")));
    }
    let what = sym.to_string();
    match sym {
        KbSymbol::Diag(a) => Ok(BalancedPair::coincidence(Letter(a as u16))),
        KbSymbol::Triple(a, b, c) if a > b => {
            let la = Word(vec![Letter(a as u16)]);
            let (pb, pc) = (pal(b, k)?, pal(c, k)?);
            let top = strip_suffix(&la.concat(&pb), &pc, &what)?;
            let bottom = strip_prefix(&pb, &pc, &what)?.concat(&la);
            BalancedPair::new(top, bottom)
        }
        KbSymbol::Triple(a, b, c) => {
            let lc = Word(vec![Letter(c as u16)]);
            let (pa, pb) = (pal(a, k)?, pal(b, k)?);
            let top = strip_prefix(&pb, &pa, &what)?.concat(&lc);
            let bottom = strip_suffix(&lc.concat(&pb), &pa, &what)?;
            BalancedPair::new(top, bottom)
        }
    }
}

/// The `Gamma*`-valued closure `pal(a, b)`.
pub fn pal_pair(a: i32, b: i32, k: usize) -> Result<Vec<KbSymbol>> {
    if a < 0 || b < 0 || a >= k as i32 || b >= k as i32 {
        return Err(Error::Domain(format!("pal({a},{b}) needs letters below {k}")));
    }
    Ok(pal_pair_inner(a, b))
}

fn pal_pair_inner(a: i32, b: i32) -> Vec<KbSymbol> {
    use std::cmp::Ordering::*;
    let (inner, mid) = match a.cmp(&b) {
        Equal => return Vec::new(),
        Greater => (pal_pair_inner(a - 1, b), KbSymbol::Triple(a, b, -1)),
        Less => (pal_pair_inner(a, b - 1), KbSymbol::Triple(-1, a, b)),
    };
    let mut out = inner.clone();
    out.push(mid);
    out.extend(inner);
    out
}

/// Every symbol for `k`: the diagonal ones by letter, then the triples in
/// lexicographic order.
pub fn kb_symbols(k: usize) -> Vec<KbSymbol> {
    let k = k as i32;
    let mut out: Vec<KbSymbol> = (0..k).map(KbSymbol::Diag).collect();
    let mut triples = Vec::new();
    for a in -1..k {
        for b in -1..k {
            for c in -1..k {
                if (a > b && b > c) || (a < b && b < c) {
                    triples.push(KbSymbol::Triple(a, b, c));
                }
            }
        }
    }
    triples.sort();
    out.extend(triples);
    out
}

/// Image of a symbol under the lifted k-bonacci morphism, by the case table.
pub fn kb_image(sym: KbSymbol, k: usize) -> Vec<KbSymbol> {
    let top = k as i32 - 1;
    let mut out = vec![KbSymbol::Diag(0)];
    match sym {
        KbSymbol::Diag(a) if a < top => out.push(KbSymbol::Diag(a + 1)),
        KbSymbol::Diag(_) => {}
        KbSymbol::Triple(a, b, c) if a > b && a < top => out.push(KbSymbol::Triple(a + 1, b + 1, c + 1)),
        KbSymbol::Triple(_, b, c) if sym_is_decreasing(sym) => out.extend(pal_pair_inner(c + 1, b + 1)),
        KbSymbol::Triple(a, b, c) if c < top => out.push(KbSymbol::Triple(a + 1, b + 1, c + 1)),
        KbSymbol::Triple(a, b, _) => out.extend(pal_pair_inner(b + 1, a + 1)),
    }
    out
}

fn sym_is_decreasing(sym: KbSymbol) -> bool {
    matches!(sym, KbSymbol::Triple(a, b, _) if a > b)
}

/// The k-bonacci system with both views of each symbol.
#[derive(Debug, Clone)]
pub struct KbSystem {
    pub k: usize,
    pub symbols: Vec<KbSymbol>,
    pub lift: LiftedMorphism,
}

impl KbSystem {
    pub fn id_of(&self, sym: KbSymbol) -> Option<usize> {
        self.symbols.iter().position(|&s| s == sym)
    }

    /// Names `a0 … a10` used for the eleven-tile k = 3 system, indexed by our ids.
    pub fn paper_labels(&self) -> Option<Vec<String>> {
        if self.k != 3 {
            return None;
        }
        let order = [
            KbSymbol::Triple(-1, 0, 1),
            KbSymbol::Triple(1, 0, -1),
            KbSymbol::Triple(-1, 0, 2),
            KbSymbol::Triple(2, 0, -1),
            KbSymbol::Triple(0, 1, 2),
            KbSymbol::Triple(2, 1, 0),
            KbSymbol::Triple(-1, 1, 2),
            KbSymbol::Triple(2, 1, -1),
            KbSymbol::Diag(0),
            KbSymbol::Diag(1),
            KbSymbol::Diag(2),
        ];
        let mut labels = vec![String::new(); self.symbols.len()];
        for (i, sym) in order.iter().enumerate() {
            labels[self.id_of(*sym)?] = format!("a{i}");
        }
        Some(labels)
    }
}

/// Builds the lifted k-bonacci morphism from the case table.
pub fn lifted_kbonacci(k: usize) -> Result<KbSystem> {
    let base = Morphism::kbonacci(k)?;
    let symbols = kb_symbols(k);
    let pairs = symbols.iter().map(|&s| realize(s, k)).collect::<Result<Vec<_>>>()?;
    let images = symbols
        .iter()
        .map(|&s| {
            kb_image(s, k)
                .into_iter()
                .map(|t| {
                    symbols
                        .iter()
                        .position(|&u| u == t)
                        .ok_or_else(|| Error::Internal(format!("image symbol {t} is outside the alphabet")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let lift = LiftedMorphism::new(base, pairs, images)?;
    Ok(KbSystem { k, symbols, lift })
}

/// The canonical cycle cover read as a column choice for each row of `m`,
/// whose rows are labelled by symbol ids of `sys`.
pub fn cover_selector(sys: &KbSystem, g: &IncidenceGraph, cover: &CycleCover, m: &PolyMatrix) -> Option<Vec<usize>> {
    m.labels
        .iter()
        .map(|&l| {
            let v = g.index_of(sys.symbols[l])?;
            let t = sys.id_of(g.vertices[cover.succ[v]])?;
            m.labels.iter().position(|&x| x == t)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminantCheck {
    pub n: usize,
    pub det: IntPolynomial,
    /// Sum of the degrees of the entries picked by the cover.
    pub cover_degree: u64,
    /// Agreement with plain elimination; `None` above the elimination limit.
    pub elimination_agrees: Option<bool>,
}

impl DeterminantCheck {
    pub fn holds(&self) -> bool {
        self.det.as_monomial().is_some_and(|(_, e)| e == self.cover_degree) && self.elimination_agrees != Some(false)
    }
}

/// `det M_n` through the canonical cycle cover, checked against elimination
/// when the dimension allows.
pub fn determinant_check(sys: &KbSystem, g: &IncidenceGraph, cover: &CycleCover, n: usize) -> Result<DeterminantCheck> {
    let m = build_mn(&sys.lift, n)?;
    let sel = cover_selector(sys, g, cover, &m)
        .ok_or_else(|| Error::Internal("cycle cover does not match the matrix labels".into()))?;
    let det = det_poly_with_cover(&m, &sel)?;
    let cover_degree = sel.iter().enumerate().filter_map(|(i, &j)| m.get(i, j).degree()).sum();
    let elimination_agrees = match det_poly(&m) {
        Ok(d) => Some(d == det),
        Err(e) if e.is_budget() => None,
        Err(e) => return Err(e),
    };
    Ok(DeterminantCheck { n, det, cover_degree, elimination_agrees })
}

/// Compares every image of `lift` with a direct lift-and-decompose of its pair.
pub fn crosscheck_table(lift: &LiftedMorphism) -> bool {
    lift.symbols().iter().all(|s| match lift_image(lift.base(), &s.pair) {
        Ok(parts) => {
            let img = lift.image(s.id);
            parts.len() == img.len() && parts.iter().zip(img).all(|(p, &id)| lift.symbol(id).pair == *p)
        }
        Err(_) => false,
    })
}

/// The case table against direct computation, for one `k`.
pub fn crosscheck_lift(k: usize) -> Result<bool> {
    let base = Morphism::kbonacci(k)?;
    for sym in kb_symbols(k) {
        let direct = lift_image(&base, &realize(sym, k)?)?;
        let table = kb_image(sym, k).into_iter().map(|t| realize(t, k)).collect::<Result<Vec<_>>>()?;
        if direct != table {
            return Ok(false);
        }
    }
    Ok(true)
}
