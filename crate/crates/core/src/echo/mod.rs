//! Echoing certificates: shifts `r_n < s_n` with interval families covering
//! the mismatches of `u` against itself, built from a lifted morphism and
//! checked directly against the word.

mod build;
mod probe;
mod verify;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::stream::WordStream;

pub use build::{build_certificate, certify_fixed_point, BuildOptions, CertifiedRun, Mode, SEED_BUDGET, SEED_HORIZON};
pub use probe::{nonvanishing_probe, probe_polynomial, ProbeTable};
pub use verify::{verify_certificate, EntryReport, Thresholds, Verdicts, VerificationReport};

/// A rational that travels through JSON as `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(pub BigRational);

impl Ratio {
    pub fn new(n: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Ratio(BigRational::new(n.into(), d.into()))
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::poly::parse_rational(s).map(Ratio)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The closed integer interval `[lo, hi]`, serialized as a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(u64, u64)", into = "(u64, u64)")]
pub struct IntInterval {
    pub lo: u64,
    pub hi: u64,
}

impl IntInterval {
    pub fn new(lo: u64, hi: u64) -> Self {
        debug_assert!(lo <= hi);
        IntInterval { lo, hi }
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: u64) -> bool {
        self.lo <= i && i <= self.hi
    }

    /// Distance to a later interval.
    pub fn gap_to(&self, next: &IntInterval) -> u64 {
        next.lo.saturating_sub(self.hi)
    }
}

impl From<(u64, u64)> for IntInterval {
    fn from((lo, hi): (u64, u64)) -> Self {
        IntInterval { lo, hi }
    }
}

impl From<IntInterval> for (u64, u64) {
    fn from(i: IntInterval) -> Self {
        (i.lo, i.hi)
    }
}

impl fmt::Display for IntInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub n: usize,
    pub r: u64,
    pub s: u64,
    pub intervals: Vec<IntInterval>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "blocks")]
    pub block_symbols: Option<Vec<Vec<usize>>>,
}

impl CertificateEntry {
    /// Problems with the shape of the entry, if any.
    pub fn structural_issue(&self) -> Option<String> {
        if self.r >= self.s {
            return Some(format!("n = {}: r = {} is not below s = {}", self.n, self.r, self.s));
        }
        if let Some(first) = self.intervals.first() {
            if first.lo == 0 {
                return Some(format!("n = {}: position 0 is reserved", self.n));
            }
        }
        if let Some(bad) = self.intervals.iter().find(|i| i.lo > i.hi) {
            return Some(format!("n = {}: interval {bad} is reversed", self.n));
        }
        if let Some(w) = self.intervals.windows(2).find(|w| w[0].hi >= w[1].lo) {
            return Some(format!("n = {}: intervals {} and {} are not increasing", self.n, w[0], w[1]));
        }
        if let Some(b) = &self.block_symbols {
            if b.len() != self.intervals.len() {
                return Some(format!("n = {}: {} blocks for {} intervals", self.n, b.len(), self.intervals.len()));
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EchoingCertificate {
    pub epsilon: Ratio,
    pub n0: usize,
    pub entries: Vec<CertificateEntry>,
    pub provenance: String,
}

impl EchoingCertificate {
    pub fn structural_issues(&self) -> Vec<String> {
        let mut out: Vec<String> = self.entries.iter().filter_map(CertificateEntry::structural_issue).collect();
        if let Some(w) = self.entries.windows(2).find(|w| w[0].s >= w[1].s) {
            out.push(format!("s is not increasing between n = {} and n = {}", w[0].n, w[1].n));
        }
        if self.epsilon.0 <= BigRational::from(BigInt::from(0)) {
            out.push("epsilon must be positive".into());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("certificate: {e}")))
    }
}

const CHUNK: usize = 1 << 16;

/// All `i < horizon` with `u[i + s] != u[i + r]`.
pub fn mismatch_positions(u: &WordStream, r: u64, s: u64, horizon: u64) -> Result<Vec<u64>> {
    if r >= s {
        return Err(Error::Precondition(format!("need r < s, got r = {r}, s = {s}")));
    }
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut start = 0u64;
    while start < horizon {
        let len = (horizon - start).min(CHUNK as u64) as usize;
        let a = u.factor(r + start, len)?;
        let b = u.factor(s + start, len)?;
        out.extend(a.iter().zip(&b).enumerate().filter(|(_, (x, y))| x != y).map(|(i, _)| start + i as u64));
        start += len as u64;
    }
    Ok(out)
}

/// Maximal runs of positions whose consecutive distance is at most
/// `gap_threshold`, as intervals.
pub fn group_intervals(positions: &[u64], gap_threshold: u64) -> Result<Vec<IntInterval>> {
    if gap_threshold == 0 {
        return Err(Error::Precondition("gap threshold must be at least 1".into()));
    }
    let mut out: Vec<IntInterval> = Vec::new();
    for &p in positions {
        match out.last_mut() {
            Some(last) if p - last.hi <= gap_threshold => last.hi = p,
            _ => out.push(IntInterval::new(p, p)),
        }
    }
    Ok(out)
}

/// `(|I_1| + ... + |I_delta|) / hi(I_delta)`.
pub fn density(intervals: &[IntInterval], delta: usize) -> Result<BigRational> {
    if delta == 0 {
        return Err(Error::Precondition("delta must be at least 1".into()));
    }
    if intervals.len() < delta {
        return Err(Error::InsufficientData {
            entry: 0,
            reason: format!("density at delta = {delta} needs {delta} intervals, found {}", intervals.len()),
        });
    }
    let covered: u64 = intervals[..delta].iter().map(IntInterval::len).sum();
    let hi = intervals[delta - 1].hi;
    if hi == 0 {
        return Err(Error::Domain("density is undefined for an interval ending at 0".into()));
    }
    Ok(BigRational::new(covered.into(), hi.into()))
}

fn glyph(l: crate::word::Letter) -> char {
    char::from_digit(l.0 as u32, 36).unwrap_or('?')
}

/// `sigma^r(u)` above `sigma^s(u)` with `^` under every disagreement.
pub fn render_alignment(u: &WordStream, r: u64, s: u64, width: usize) -> Result<String> {
    let a = u.factor(r, width)?;
    let b = u.factor(s, width)?;
    let top: String = a.iter().copied().map(glyph).collect();
    let bottom: String = b.iter().copied().map(glyph).collect();
    let marks: String = a.iter().zip(&b).map(|(x, y)| if x != y { '^' } else { ' ' }).collect();
    Ok(format!("{top}\n{bottom}\n{}\n", marks.trim_end()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::Morphism;
    use crate::word::Letter;

    fn fib() -> WordStream {
        WordStream::new(Morphism::fibonacci(), Letter(0)).unwrap()
    }

    fn iv(v: &[(u64, u64)]) -> Vec<IntInterval> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn fibonacci_mismatches() {
        assert_eq!(mismatch_positions(&fib(), 0, 5, 31).unwrap(), vec![6, 7, 19, 20, 27, 28]);
        assert!(mismatch_positions(&fib(), 5, 5, 31).is_err());
    }

    #[test]
    fn periodic_word_has_no_mismatch() {
        // 0 -> 01, 1 -> 01 has fixed point (01)^omega
        let u = WordStream::new(Morphism::from_digit_images(&["01", "01"]).unwrap(), Letter(0)).unwrap();
        assert!(mismatch_positions(&u, 0, 2, 1000).unwrap().is_empty());
    }

    #[test]
    fn grouping_and_density() {
        assert_eq!(group_intervals(&[6, 7, 19, 20], 3).unwrap(), iv(&[(6, 7), (19, 20)]));
        assert!(group_intervals(&[], 4).unwrap().is_empty());
        assert_eq!(group_intervals(&[3, 5, 9], 2).unwrap(), iv(&[(3, 5), (9, 9)]));
        assert!(group_intervals(&[1], 0).is_err());
        let d = density(&iv(&[(6, 7), (19, 20), (27, 28)]), 3).unwrap();
        assert_eq!(d, BigRational::new(3.into(), 14.into()));
        assert_eq!(density(&iv(&[(1, 1)]), 1).unwrap(), BigRational::from(BigInt::from(1)));
        assert_eq!(density(&iv(&[(10, 19)]), 1).unwrap(), BigRational::new(10.into(), 19.into()));
        assert!(matches!(density(&iv(&[(10, 19)]), 2), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn alignment() {
        let text = render_alignment(&fib(), 0, 5, 8).unwrap();
        assert_eq!(text, "01001010\n01001001\n      ^^\n");
        assert_eq!(render_alignment(&fib(), 3, 3, 5).unwrap().lines().nth(2), Some(""));
        assert_eq!(render_alignment(&fib(), 0, 5, 0).unwrap(), "\n\n\n");
    }

    #[test]
    fn certificate_json_shape() {
        let cert = EchoingCertificate {
            epsilon: Ratio::new(1, 10),
            n0: 7,
            entries: vec![CertificateEntry { n: 0, r: 0, s: 21, intervals: iv(&[(6, 7)]), block_symbols: None }],
            provenance: "test".into(),
        };
        let json = serde_json::to_string(&cert).unwrap();
        assert_eq!(
            json,
            r#"{"epsilon":"1/10","n0":7,"entries":[{"n":0,"r":0,"s":21,"intervals":[[6,7]]}],"provenance":"test"}"#
        );
        assert_eq!(EchoingCertificate::from_json(&json).unwrap(), cert);
        assert!(cert.structural_issues().is_empty());
        let mut bad = cert.clone();
        bad.entries[0].intervals.push((5, 9).into());
        assert_eq!(bad.structural_issues().len(), 1);
    }
}
