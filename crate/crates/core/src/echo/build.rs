use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{CertificateEntry, EchoingCertificate, IntInterval, Ratio};
use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::pairs::{
    balanced_pair_closure, code_fixed_point, coincidence_condition, lifted_lengths, mismatch_density, seed_return_pairs,
    ClosureStatus, CodedPrefix, LengthTable, LiftedMorphism, SeedScan, DEFAULT_MAX_ROUNDS, DEFAULT_MAX_SYMBOLS,
};
use crate::word::Word;

const MAX_N0: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Each interval spans a whole run of mismatch blocks.
    Block,
    /// Each interval is trimmed to the first and last disagreeing column.
    #[default]
    Tight,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Block => "block",
            Mode::Tight => "tight",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub epsilon: BigRational,
    pub n_max: usize,
    pub horizon: u64,
    pub mode: Mode,
    /// Keep emitting past the horizon until each entry has this many intervals.
    pub min_intervals: usize,
    pub n0_override: Option<usize>,
    /// The word `x` with `pi_2 = sigma^{|x|}(pi_1)`; derived from the coding when absent.
    pub shift: Option<Word>,
}

impl BuildOptions {
    pub fn new(epsilon: BigRational, n_max: usize, horizon: u64) -> Self {
        BuildOptions { epsilon, n_max, horizon, mode: Mode::Tight, min_intervals: 0, n0_override: None, shift: None }
    }
}

/// Smallest `l` such that the bottom row of `w` is the top row shifted by `l`.
fn derive_shift(lift: &LiftedMorphism, w: &[usize]) -> Result<Word> {
    let (top, bottom) = lift.realize(w);
    (1..top.len())
        .find(|&l| top[l..] == bottom[..top.len() - l])
        .map(|l| Word::from(&top[..l]))
        .ok_or_else(|| Error::Precondition("the coded word does not realize a shift of its top row".into()))
}

/// Largest ratio between the level-`n` lengths of two symbols, plus 10%.
fn growth_constant(lift: &LiftedMorphism, n: usize) -> BigRational {
    let lens = lifted_lengths(lift, n);
    let max = lens.iter().max().cloned().unwrap_or_else(BigUint::zero);
    let min = lens.iter().min().cloned().unwrap_or_else(BigUint::zero);
    BigRational::new(BigInt::from(max) * 11, BigInt::from(min) * 10)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Item {
    Mismatch(usize),
    /// `phi~^m(sym)` for a coincidence `sym`: all coincidences.
    Coincidences { sym: usize, m: usize },
}

/// `phi~^{n0}(w)` produced left to right by depth-first expansion, with
/// coincidence subtrees kept folded. Items are cached so that every level
/// reuses the same walk.
struct Expansion<'a> {
    lift: &'a LiftedMorphism,
    w: &'a [usize],
    n0: usize,
    next_root: usize,
    stack: Vec<(usize, usize)>,
    items: Vec<Item>,
}

impl<'a> Expansion<'a> {
    fn new(lift: &'a LiftedMorphism, w: &'a [usize], n0: usize) -> Self {
        Expansion { lift, w, n0, next_root: 0, stack: Vec::new(), items: Vec::new() }
    }

    fn item(&mut self, k: usize) -> Option<Item> {
        while self.items.len() <= k {
            let item = self.produce()?;
            self.items.push(item);
        }
        Some(self.items[k])
    }

    fn produce(&mut self) -> Option<Item> {
        loop {
            let (sym, depth) = match self.stack.pop() {
                Some(top) => top,
                None => {
                    let root = *self.w.get(self.next_root)?;
                    self.next_root += 1;
                    (root, 0)
                }
            };
            if !self.lift.symbol(sym).is_mismatch() {
                return Some(Item::Coincidences { sym, m: self.n0 - depth });
            }
            if depth == self.n0 {
                return Some(Item::Mismatch(sym));
            }
            self.stack.extend(self.lift.image(sym).iter().rev().map(|&d| (d, depth + 1)));
        }
    }
}

struct Run {
    start: u64,
    first: u64,
    last: u64,
    end: u64,
    symbols: Vec<usize>,
}

/// Intervals of one level. Returns `(r, intervals, blocks)`.
fn level_entry(
    exp: &mut Expansion<'_>,
    table: &LengthTable,
    n: usize,
    opts: &BuildOptions,
) -> Result<(u64, Vec<IntInterval>, Vec<Vec<usize>>)> {
    let len = |item: Item| match item {
        Item::Mismatch(s) => table.lengths[n][s],
        Item::Coincidences { sym, m } => table.lengths[n + m][sym],
    };
    let too_short = |available: u64| Error::PrefixTooShort { level: n, needed: opts.horizon, available };

    let mut k = 0;
    // a leading run of mismatches is absorbed into r
    let mut r = 0u64;
    while let Some(item @ Item::Mismatch(_)) = exp.item(k) {
        r += len(item);
        k += 1;
    }
    let mut pos = 0u64;
    let mut intervals = Vec::new();
    let mut blocks = Vec::new();
    let mut run: Option<Run> = None;
    loop {
        let Some(item) = exp.item(k) else {
            let open_below = run.as_ref().is_some_and(|r| r.start < opts.horizon);
            if open_below || pos < opts.horizon || intervals.len() < opts.min_intervals {
                return Err(too_short(pos));
            }
            break;
        };
        k += 1;
        match item {
            Item::Mismatch(s) => {
                let (f, l) = match (table.first_mismatch[n][s], table.last_mismatch[n][s]) {
                    (Some(f), Some(l)) => (f, l),
                    _ => return Err(Error::Internal(format!("mismatch symbol {s} has no mismatching column"))),
                };
                let cur = run.get_or_insert_with(|| Run { start: pos, first: pos + f, last: 0, end: 0, symbols: Vec::new() });
                cur.last = pos + l;
                cur.symbols.push(s);
                pos += len(item);
                cur.end = pos;
            }
            Item::Coincidences { .. } => {
                if let Some(done) = run.take() {
                    intervals.push(match opts.mode {
                        Mode::Block => IntInterval::new(done.start, done.end - 1),
                        Mode::Tight => IntInterval::new(done.first, done.last),
                    });
                    blocks.push(done.symbols);
                }
                pos = pos.checked_add(len(item)).ok_or_else(|| Error::Budget("positions overflow u64".into()))?;
                if pos >= opts.horizon && intervals.len() >= opts.min_intervals {
                    break;
                }
            }
        }
    }
    Ok((r, intervals, blocks))
}

/// Builds an echoing certificate from a coded prefix `w_prefix` of the
/// lifted fixed point, for levels `0..=n_max`.
pub fn build_certificate(lift: &LiftedMorphism, w_prefix: &[usize], opts: &BuildOptions) -> Result<EchoingCertificate> {
    if !coincidence_condition(lift).satisfied {
        return Err(Error::Precondition("the lifted morphism does not satisfy the coincidence condition".into()));
    }
    if w_prefix.is_empty() {
        return Err(Error::Precondition("the coded prefix is empty".into()));
    }
    if opts.epsilon <= BigRational::zero() {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let x = match &opts.shift {
        Some(x) if !x.is_empty() => x.clone(),
        Some(_) => return Err(Error::Precondition("the shift word must be non-empty".into())),
        None => derive_shift(lift, w_prefix)?,
    };
    let c0 = growth_constant(lift, opts.n_max);
    let target = &opts.epsilon / &c0;
    let n0 = match opts.n0_override {
        Some(n0) => n0,
        None => (0..=MAX_N0)
            .find(|&n0| mismatch_density(lift, w_prefix, n0).is_ok_and(|d| d <= target))
            .ok_or_else(|| Error::Budget(format!("mismatch density stays above {target} up to n0 = {MAX_N0}")))?,
    };
    let table = LengthTable::new(lift, opts.n_max + n0)?;
    let base: &Morphism = lift.base();
    let mut exp = Expansion::new(lift, w_prefix, n0);
    let mut entries = Vec::with_capacity(opts.n_max + 1);
    for n in 0..=opts.n_max {
        let t = base
            .word_length_after(&x, n + n0)
            .ok_or_else(|| Error::Budget(format!("|phi^{}(x)| overflows u64", n + n0)))?;
        let (r, intervals, blocks) = level_entry(&mut exp, &table, n, opts)?;
        let s = r.checked_add(t).ok_or_else(|| Error::Budget("s_n overflows u64".into()))?;
        entries.push(CertificateEntry { n, r, s, intervals, block_symbols: Some(blocks) });
    }
    let provenance = format!(
        "{} intervals of the level-{n0} expansion of a {}-symbol coded prefix; shift word {x}; c0 = {:.4}",
        opts.mode,
        w_prefix.len(),
        c0.to_f64().unwrap_or(f64::NAN)
    );
    Ok(EchoingCertificate { epsilon: Ratio(opts.epsilon.clone()), n0, entries, provenance })
}

/// Everything produced on the way from a morphism to a certificate.
#[derive(Debug, Clone)]
pub struct CertifiedRun {
    pub seeds: SeedScan,
    pub lift: LiftedMorphism,
    pub coded: CodedPrefix,
    pub certificate: EchoingCertificate,
}

pub const SEED_HORIZON: usize = 20_000;
pub const SEED_BUDGET: usize = 256;
const FIRST_CODED_LENGTH: usize = 1 << 10;
const MAX_CODED_LENGTH: usize = 1 << 24;

/// Seeds, closes, codes and certifies the fixed point of `m` starting with
/// `x`. The coded prefix is doubled until every level reaches the horizon.
pub fn certify_fixed_point(m: &Morphism, x: &Word, opts: &BuildOptions) -> Result<CertifiedRun> {
    let seeds = seed_return_pairs(m, x, SEED_HORIZON, SEED_BUDGET)?;
    let closure = balanced_pair_closure(m, &seeds.pairs, DEFAULT_MAX_SYMBOLS, DEFAULT_MAX_ROUNDS)?;
    let lift = match (closure.status, closure.lifted) {
        (ClosureStatus::Closed, Some(lift)) => lift,
        _ => return Err(Error::Budget(format!("balanced-pair closure did not close ({} symbols found)", closure.discovered.len()))),
    };
    let opts = BuildOptions { shift: Some(x.clone()), ..opts.clone() };
    let mut letters = FIRST_CODED_LENGTH;
    loop {
        let coded = code_fixed_point(&lift, x, letters)?;
        match build_certificate(&lift, &coded.symbols, &opts) {
            Ok(certificate) => return Ok(CertifiedRun { seeds, lift, coded, certificate }),
            Err(Error::PrefixTooShort { .. }) if letters < MAX_CODED_LENGTH => letters *= 2,
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::echo::mismatch_positions;
    use crate::kbonacci::lifted_kbonacci;
    use crate::stream::WordStream;
    use crate::word::Letter;

    fn eps() -> BigRational {
        BigRational::new(1.into(), 10.into())
    }

    fn run(m: Morphism, n_max: usize, horizon: u64, mode: Mode) -> CertifiedRun {
        let opts = BuildOptions { mode, ..BuildOptions::new(eps(), n_max, horizon) };
        certify_fixed_point(&m, &Word::parse_digits("0").unwrap(), &opts).unwrap()
    }

    #[test]
    fn tribonacci_shape() {
        let r = run(Morphism::tribonacci(), 6, 20_000, Mode::Tight);
        let cert = &r.certificate;
        let trib = Morphism::tribonacci();
        for e in &cert.entries {
            assert_eq!(e.r, 0);
            assert_eq!(e.s, trib.word_length_after(&[Letter(0)], e.n + cert.n0).unwrap());
            assert!(e.structural_issue().is_none(), "{:?}", e.structural_issue());
        }
        assert!(cert.structural_issues().is_empty());
    }

    #[test]
    fn covering_and_tight_inside_block() {
        for m in [Morphism::fibonacci(), Morphism::tribonacci()] {
            let horizon = 30_000;
            let tight = run(m.clone(), 5, horizon, Mode::Tight).certificate;
            let block = run(m.clone(), 5, horizon, Mode::Block).certificate;
            let u = WordStream::new(m.clone(), Letter(0)).unwrap();
            for (t, b) in tight.entries.iter().zip(&block.entries) {
                assert_eq!((t.r, t.s), (b.r, b.s));
                let mis = mismatch_positions(&u, t.r, t.s, horizon).unwrap();
                for &p in &mis {
                    assert!(t.intervals.iter().any(|i| i.contains(p)), "n={} p={p}", t.n);
                }
                for i in &t.intervals {
                    if i.hi < horizon {
                        assert!(mis.binary_search(&i.lo).is_ok() && mis.binary_search(&i.hi).is_ok());
                    }
                }
                for (ti, bi) in t.intervals.iter().zip(&b.intervals) {
                    assert!(bi.lo <= ti.lo && ti.hi <= bi.hi);
                }
            }
        }
    }

    #[test]
    fn fibonacci_doubletons() {
        let cert = run(Morphism::fibonacci(), 3, 5_000, Mode::Tight).certificate;
        assert!(cert.entries[0].intervals.iter().all(|i| i.len() == 2));
    }

    #[test]
    fn first_disagreement_is_not_before_first_interval() {
        let m = Morphism::tribonacci();
        let cert = run(m.clone(), 4, 10_000, Mode::Tight).certificate;
        let u = WordStream::new(m, Letter(0)).unwrap();
        for e in &cert.entries {
            let first = mismatch_positions(&u, e.r, e.s, 10_000).unwrap().first().copied();
            if let (Some(p), Some(i)) = (first, e.intervals.first()) {
                assert!(p >= i.lo);
            }
        }
    }

    #[test]
    fn left_hand_case_shifts_the_intervals() {
        // coded word starting at a mismatch, expanded with n0 = 0
        let m = Morphism::fibonacci();
        let lift = run(m.clone(), 2, 2_000, Mode::Tight).lift;
        let coded = code_fixed_point(&lift, &Word::parse_digits("0").unwrap(), 4000).unwrap();
        assert!(lift.symbol(coded.symbols[0]).is_mismatch());
        let opts = BuildOptions { n0_override: Some(0), ..BuildOptions::new(eps(), 3, 500) };
        let cert = build_certificate(&lift, &coded.symbols, &opts).unwrap();
        let u = WordStream::new(m, Letter(0)).unwrap();
        for e in &cert.entries {
            assert!(e.r > 0);
            for p in mismatch_positions(&u, e.r, e.s, 500).unwrap() {
                assert!(e.intervals.iter().any(|i| i.contains(p)));
            }
        }
    }

    #[test]
    fn density_falls_with_n0() {
        let m = Morphism::tribonacci();
        let lift = run(m.clone(), 2, 2_000, Mode::Tight).lift;
        let coded = code_fixed_point(&lift, &Word::parse_digits("0").unwrap(), 1 << 14).unwrap();
        let mut last = None;
        for n0 in 4..=10 {
            let opts = BuildOptions { n0_override: Some(n0), ..BuildOptions::new(eps(), 0, 5_000) };
            let cert = build_certificate(&lift, &coded.symbols, &opts).unwrap();
            let iv = &cert.entries[0].intervals;
            let clipped: Vec<_> = iv.iter().copied().filter(|i| i.hi < 5_000).collect();
            let d = crate::echo::density(&clipped, clipped.len().min(3)).unwrap();
            if let Some(prev) = last {
                assert!(d <= prev, "n0={n0}");
            }
            last = Some(d);
        }
    }

    #[test]
    fn preconditions() {
        let tm = Morphism::from_digit_images(&["01", "10"]).unwrap();
        let opts = BuildOptions::new(eps(), 2, 100);
        assert!(certify_fixed_point(&tm, &Word::parse_digits("0").unwrap(), &opts).is_err());
        let sys = lifted_kbonacci(3).unwrap();
        assert!(build_certificate(&sys.lift, &[], &opts).is_err());
    }
}
