use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::{density, mismatch_positions, CertificateEntry, EchoingCertificate, IntInterval, Ratio};
use crate::error::{Error, Result};
use crate::stream::WordStream;

/// Finite stand-ins for the asymptotic conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    pub delta_min: usize,
    pub gap_floor: Ratio,
    pub gap_ceiling: Ratio,
    /// Also enforce `gap_ceiling` on the largest gap.
    pub strong: bool,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { delta_min: 1, gap_floor: Ratio::new(1, 8), gap_ceiling: Ratio::new(4, 1), strong: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub n: usize,
    pub r: u64,
    pub s: u64,
    /// Some interval lies wholly below the horizon.
    pub observed: bool,
    pub covering_ok: bool,
    pub first_uncovered: Option<u64>,
    pub mismatches: usize,
    pub intervals_in_horizon: usize,
    pub density_max: Option<Ratio>,
    #[serde(skip)]
    pub density_curve: Vec<Ratio>,
    pub density_ok: bool,
    pub gap_ratio_min: Option<Ratio>,
    pub gap_ratio_max: Option<Ratio>,
    pub shift_ratio: Ratio,
    pub gaps_ok: bool,
    pub ceiling_ok: Option<bool>,
    pub structure: Option<String>,
}

impl EntryReport {
    pub fn passed(&self) -> bool {
        self.structure.is_none() && self.covering_ok && self.density_ok && self.gaps_ok && self.ceiling_ok != Some(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub structure: bool,
    pub covering: bool,
    pub density: bool,
    pub expanding_gaps: bool,
    pub gap_ceiling: Option<bool>,
}

impl Verdicts {
    pub fn passed(&self) -> bool {
        self.structure && self.covering && self.density && self.expanding_gaps && self.gap_ceiling != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub horizon: u64,
    pub epsilon: Ratio,
    pub thresholds: Thresholds,
    pub entries: Vec<EntryReport>,
    pub issues: Vec<String>,
    pub verdicts: Verdicts,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdicts.passed()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn covered(intervals: &[IntInterval], p: u64) -> bool {
    let k = intervals.partition_point(|i| i.hi < p);
    intervals.get(k).is_some_and(|i| i.lo <= p)
}

fn check_entry(
    u: &WordStream,
    e: &CertificateEntry,
    eps: &BigRational,
    horizon: u64,
    th: &Thresholds,
) -> Result<EntryReport> {
    let structure = e.structural_issue();
    let s = BigInt::from(e.s);
    let shift_ratio = BigRational::new(BigInt::from(e.s.saturating_sub(e.r)), s.clone());
    let mut report = EntryReport {
        n: e.n,
        r: e.r,
        s: e.s,
        observed: false,
        covering_ok: false,
        first_uncovered: None,
        mismatches: 0,
        intervals_in_horizon: 0,
        density_max: None,
        density_curve: Vec::new(),
        density_ok: false,
        gap_ratio_min: None,
        gap_ratio_max: None,
        shift_ratio: Ratio(shift_ratio.clone()),
        gaps_ok: false,
        ceiling_ok: None,
        structure: structure.clone(),
    };
    if structure.is_some() {
        return Ok(report);
    }
    let mis = mismatch_positions(u, e.r, e.s, horizon)?;
    report.mismatches = mis.len();
    report.first_uncovered = mis.iter().copied().find(|&p| !covered(&e.intervals, p));
    report.covering_ok = report.first_uncovered.is_none();

    let clipped: Vec<IntInterval> = e.intervals.iter().copied().filter(|i| i.hi < horizon).collect();
    report.intervals_in_horizon = clipped.len();
    report.observed = !clipped.is_empty();
    let floor = &th.gap_floor.0;
    let shift_ok = shift_ratio >= *floor;
    if !report.observed {
        report.density_ok = true;
        report.gaps_ok = shift_ok;
        report.ceiling_ok = th.strong.then_some(true);
        return Ok(report);
    }
    report.density_curve = (th.delta_min.max(1)..=clipped.len())
        .map(|d| density(&clipped, d).map(Ratio))
        .collect::<Result<Vec<_>>>()?;
    report.density_max = report.density_curve.iter().max().cloned();
    report.density_ok = report.density_curve.iter().all(|d| d.0 <= *eps);

    let gaps = std::iter::once(clipped[0].lo).chain(clipped.windows(2).map(|w| w[0].gap_to(&w[1])));
    let ratios: Vec<BigRational> = gaps.map(|g| BigRational::new(BigInt::from(g), s.clone())).collect();
    let min = ratios.iter().min().cloned().expect("at least one gap");
    let max = ratios.iter().max().cloned().expect("at least one gap");
    report.gaps_ok = shift_ok && min >= *floor;
    report.ceiling_ok = th.strong.then(|| max <= th.gap_ceiling.0);
    report.gap_ratio_min = Some(Ratio(min));
    report.gap_ratio_max = Some(Ratio(max));
    Ok(report)
}

/// Checks every entry of `cert` against `u` on `[0, horizon)`: covering of
/// all mismatches, density of the intervals lying below the horizon, and
/// the gap conditions relative to `s_n`.
pub fn verify_certificate(
    u: &WordStream,
    cert: &EchoingCertificate,
    horizon: u64,
    th: &Thresholds,
) -> Result<VerificationReport> {
    let eps = cert.epsilon.0.clone();
    let entries = cert
        .entries
        .par_iter()
        .map(|e| check_entry(u, e, &eps, horizon, th))
        .collect::<Result<Vec<_>>>()?;
    let issues = cert.structural_issues();
    if issues.is_empty() && !entries.is_empty() && entries.iter().all(|e| !e.observed) {
        return Err(Error::InsufficientData {
            entry: entries[0].n,
            reason: format!("no interval lies below the horizon {horizon}"),
        });
    }
    let s_increasing = cert.entries.windows(2).all(|w| w[0].s < w[1].s);
    let verdicts = Verdicts {
        structure: issues.is_empty(),
        covering: entries.iter().all(|e| e.covering_ok),
        density: entries.iter().all(|e| e.density_ok),
        expanding_gaps: s_increasing && entries.iter().all(|e| e.gaps_ok),
        gap_ceiling: th.strong.then(|| entries.iter().all(|e| e.ceiling_ok != Some(false))),
    };
    Ok(VerificationReport { horizon, epsilon: cert.epsilon.clone(), thresholds: th.clone(), entries, issues, verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::echo::{certify_fixed_point, BuildOptions};
    use crate::morphism::Morphism;
    use crate::word::{Letter, Word};

    fn fib_cert(horizon: u64) -> (WordStream, EchoingCertificate) {
        let opts = BuildOptions::new(BigRational::new(1.into(), 10.into()), 8, horizon);
        let run = certify_fixed_point(&Morphism::fibonacci(), &Word::parse_digits("0").unwrap(), &opts).unwrap();
        (WordStream::new(Morphism::fibonacci(), Letter(0)).unwrap(), run.certificate)
    }

    #[test]
    fn fibonacci_passes() {
        let (u, cert) = fib_cert(20_000);
        let rep = verify_certificate(&u, &cert, 20_000, &Thresholds::default()).unwrap();
        assert!(rep.passed(), "{:#?}", rep.verdicts);
    }

    #[test]
    fn mutations_fail() {
        let (u, cert) = fib_cert(20_000);
        let th = Thresholds::default();
        let mut dropped = cert.clone();
        dropped.entries[2].intervals.remove(0);
        let rep = verify_certificate(&u, &dropped, 20_000, &th).unwrap();
        assert!(!rep.verdicts.covering);

        let mut near = cert.clone();
        for e in &mut near.entries {
            e.s = e.r + 1;
        }
        let rep = verify_certificate(&u, &near, 20_000, &th).unwrap();
        assert!(!rep.passed());
        assert!(!rep.verdicts.expanding_gaps || !rep.verdicts.covering || !rep.verdicts.structure);

        let mut shrunk = cert.clone();
        shrunk.entries[3].s -= 1;
        assert!(!verify_certificate(&u, &shrunk, 20_000, &th).unwrap().passed());
    }

    #[test]
    fn unobserved_entries() {
        let (u, cert) = fib_cert(20_000);
        let err = verify_certificate(&u, &cert, 1, &Thresholds::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { .. }));
    }

    #[test]
    fn deterministic_reports() {
        let (u, cert) = fib_cert(5_000);
        let a = verify_certificate(&u, &cert, 5_000, &Thresholds::default()).unwrap().to_json();
        let b = verify_certificate(&u, &cert, 5_000, &Thresholds::default()).unwrap().to_json();
        assert_eq!(a, b);
    }
}
