use std::ops::RangeInclusive;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{EchoingCertificate, IntInterval};
use crate::error::Result;
use crate::poly::{eval_certified, AlgebraicInput, EvalStatus, IntPolynomial};
use crate::stream::WordStream;

/// `sum_{i in I} (u[i + s] - u[i + r]) x^i`.
pub fn probe_polynomial(u: &WordStream, r: u64, s: u64, interval: IntInterval) -> Result<IntPolynomial> {
    let len = interval.len() as usize;
    let hi = u.factor(s + interval.lo, len)?;
    let lo = u.factor(r + interval.lo, len)?;
    let mut p = IntPolynomial::zero();
    for (k, (a, b)) in hi.iter().zip(&lo).enumerate() {
        if a != b {
            p.add_term(interval.lo + k as u64, BigInt::from(a.0 as i64 - b.0 as i64));
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeRow {
    pub n: usize,
    /// One status per probed `j`; `None` when the entry has fewer intervals.
    pub statuses: Vec<Option<EvalStatus>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeTable {
    pub beta: String,
    pub js: Vec<usize>,
    pub rows: Vec<ProbeRow>,
    /// The first `j0 < j1` that are non-zero in every row.
    pub witness: Option<(usize, usize)>,
}

impl ProbeTable {
    pub fn undetermined(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| &r.statuses)
            .filter(|s| matches!(s, Some(EvalStatus::Undetermined { .. })))
            .count()
    }
}

/// Evaluates `P_{n,j}(1/beta)` for every entry and every `j` in `js`.
pub fn nonvanishing_probe(
    u: &WordStream,
    cert: &EchoingCertificate,
    beta: &AlgebraicInput,
    js: RangeInclusive<usize>,
    precision_cap: u64,
) -> Result<ProbeTable> {
    beta.require_expanding(precision_cap)?;
    let js: Vec<usize> = js.filter(|&j| j >= 1).collect();
    let rows = cert
        .entries
        .par_iter()
        .map(|e| {
            let statuses = js
                .iter()
                .map(|&j| match e.intervals.get(j - 1) {
                    Some(&iv) => {
                        let p = probe_polynomial(u, e.r, e.s, iv)?;
                        eval_certified(&p, beta, true, precision_cap).map(Some)
                    }
                    None => Ok(None),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ProbeRow { n: e.n, statuses })
        })
        .collect::<Result<Vec<_>>>()?;
    let good = |k: usize| rows.iter().all(|r| r.statuses[k].as_ref().is_some_and(EvalStatus::is_nonzero));
    let witness = (0..js.len())
        .flat_map(|a| (a + 1..js.len()).map(move |b| (a, b)))
        .find(|&(a, b)| good(a) && good(b))
        .map(|(a, b)| (js[a], js[b]));
    Ok(ProbeTable { beta: beta.to_string(), js, rows, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::echo::{certify_fixed_point, BuildOptions, CertificateEntry, Ratio};
    use crate::morphism::Morphism;
    use crate::word::{Letter, Word};
    use num_rational::BigRational;

    #[test]
    fn fibonacci_probes_are_nonzero() {
        let opts = BuildOptions { min_intervals: 3, ..BuildOptions::new(BigRational::new(1.into(), 10.into()), 10, 1000) };
        let run = certify_fixed_point(&Morphism::fibonacci(), &Word::parse_digits("0").unwrap(), &opts).unwrap();
        let u = WordStream::new(Morphism::fibonacci(), Letter(0)).unwrap();
        for beta in ["2", "1+i", "2+i", "-2"] {
            let beta = AlgebraicInput::parse(beta).unwrap();
            let table = nonvanishing_probe(&u, &run.certificate, &beta, 1..=2, 4096).unwrap();
            assert_eq!(table.witness, Some((1, 2)));
            assert_eq!(table.undetermined(), 0);
        }
    }

    #[test]
    fn synthetic_zero_interval() {
        let u = WordStream::new(Morphism::fibonacci(), Letter(0)).unwrap();
        // u[0..5] = 01001 and u[5..10] = 01001 agree at the start
        let cert = EchoingCertificate {
            epsilon: Ratio::new(1, 10),
            n0: 0,
            entries: vec![CertificateEntry { n: 0, r: 0, s: 5, intervals: vec![IntInterval::new(1, 3)], block_symbols: None }],
            provenance: String::new(),
        };
        let t = nonvanishing_probe(&u, &cert, &AlgebraicInput::parse("2").unwrap(), 1..=1, 4096).unwrap();
        assert_eq!(t.rows[0].statuses[0], Some(EvalStatus::Zero));
        assert!(nonvanishing_probe(&u, &cert, &AlgebraicInput::parse("1/2").unwrap(), 1..=1, 4096).is_err());
    }
}
