use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::morphism::{IncidenceMatrix, Morphism};
use crate::numeric::factor::{factor_monic, FactorOutcome};
use crate::numeric::roots::{isolate_at, precision_schedule, RootDisk};
use crate::numeric::{dense, Dyadic, DEFAULT_PRECISION_CAP};
use crate::poly::IntPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Pisot,
    NotPisot,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Irreducibility {
    Yes,
    No,
    Undetermined,
}

/// Rational bracket `[lower, upper]` around the Perron root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenEnclosure {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl EigenEnclosure {
    pub fn midpoint(&self) -> f64 {
        ((&self.lower + &self.upper) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }

    /// Half-width, always positive.
    pub fn radius(&self) -> f64 {
        ((&self.upper - &self.lower) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub incidence: IncidenceMatrix,
    pub primitive: bool,
    /// Least `p` with `M^p` entrywise positive.
    pub primitivity_power: Option<usize>,
    pub char_poly: IntPolynomial,
    pub dominant_eigenvalue: Option<EigenEnclosure>,
    /// Irreducible factor of the characteristic polynomial that vanishes at the Perron root.
    pub dominant_factor: Option<IntPolynomial>,
    /// Certified upper bounds on the moduli of the other roots of that factor.
    pub conjugate_moduli: Vec<f64>,
    pub classification: Classification,
    pub irreducible: Irreducibility,
    pub precision_bits: u64,
}

impl fmt::Display for SpectralReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "incidence matrix:")?;
        write!(f, "{}", self.incidence)?;
        match self.primitivity_power {
            Some(p) => writeln!(f, "primitive: yes (M^{p} > 0)")?,
            None => writeln!(f, "primitive: no")?,
        }
        writeln!(f, "characteristic polynomial: {}", self.char_poly)?;
        match &self.dominant_eigenvalue {
            Some(e) => writeln!(f, "dominant eigenvalue: {:.15} +/- {:.3e}", e.midpoint(), e.radius())?,
            None => writeln!(f, "dominant eigenvalue: not certified")?,
        }
        if let Some(df) = &self.dominant_factor {
            writeln!(f, "dominant factor: {df}")?;
        }
        writeln!(f, "classification: {:?}", self.classification)?;
        writeln!(f, "irreducible: {:?}", self.irreducible)?;
        write!(f, "precision: {} bits", self.precision_bits)
    }
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect()).collect()
}

/// Least power `p <= (k-1)^2 + 1` with `M^p > 0`, or `None` if the matrix is
/// not primitive. Wielandt's bound makes the search exhaustive.
pub fn primitivity_power(m: &IncidenceMatrix) -> Option<usize> {
    let k = m.dim();
    let base: Vec<Vec<bool>> = m.0.iter().map(|r| r.iter().map(|&v| v > 0).collect()).collect();
    let mut cur = base.clone();
    for p in 1..=(k - 1) * (k - 1) + 1 {
        if cur.iter().flatten().all(|&b| b) {
            return Some(p);
        }
        cur = bool_mul(&cur, &base);
    }
    None
}

/// `det(xI - M)` by fraction-free elimination over `Z[x]`.
pub fn characteristic_polynomial(m: &IncidenceMatrix) -> IntPolynomial {
    let k = m.dim();
    let rows = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut p = IntPolynomial::monomial(-BigInt::from(m.0[i][j]), 0);
                    if i == j {
                        p.add_term(1, BigInt::one());
                    }
                    p
                })
                .collect()
        })
        .collect();
    crate::poly::matrix_bareiss(rows)
}

fn sign_at(p: &[BigInt], x: &BigRational) -> i32 {
    let v = dense::eval_rational(p, x);
    if v.is_zero() { 0 } else if v.is_positive() { 1 } else { -1 }
}

/// Bisection on a simple real root isolated in `[lo, hi]`.
fn refine_real_root(p: &[BigInt], lo: BigRational, hi: BigRational, tol: &BigRational) -> EigenEnclosure {
    let two = BigRational::from_integer(2.into());
    let (mut lo, mut hi) = (lo, hi);
    let s_lo = sign_at(p, &lo);
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        let s = sign_at(p, &mid);
        if s == 0 {
            let q = tol / BigRational::from_integer(4.into());
            return EigenEnclosure { lower: &mid - &q, upper: &mid + &q };
        }
        if s == s_lo { lo = mid } else { hi = mid }
    }
    EigenEnclosure { lower: lo, upper: hi }
}

struct Analysis {
    dominant: usize,
    factor_roots: Option<Vec<usize>>,
    factor: Option<Vec<BigInt>>,
    factor_count: Option<usize>,
}

fn analyze_at(sf: &[BigInt], disks: &[RootDisk], p: u64) -> Option<Analysis> {
    let dominant = (0..disks.len()).filter(|&i| disks[i].is_real()).max_by(|&a, &b| disks[a].re.cmp(&disks[b].re))?;
    match factor_monic(sf, disks, p) {
        FactorOutcome::NeedPrecision => None,
        FactorOutcome::TooLarge => Some(Analysis { dominant, factor_roots: None, factor: None, factor_count: None }),
        FactorOutcome::Irreducibles(fs) => {
            let count = fs.len();
            let f = fs.into_iter().find(|f| f.roots.contains(&dominant))?;
            Some(Analysis { dominant, factor_roots: Some(f.roots), factor: Some(f.coeffs), factor_count: Some(count) })
        }
    }
}

pub fn spectral_report(m: &Morphism, tolerance: f64) -> SpectralReport {
    spectral_report_with_cap(m, tolerance, DEFAULT_PRECISION_CAP)
}

pub fn spectral_report_with_cap(m: &Morphism, tolerance: f64, precision_cap: u64) -> SpectralReport {
    let incidence = m.incidence_matrix();
    let power = primitivity_power(&incidence);
    let char_poly = characteristic_polynomial(&incidence);
    let dense_char = char_poly.to_dense(usize::MAX).expect("degree equals alphabet size");
    let sf = dense::squarefree_part(&dense_char);
    let repeated = dense::degree(&sf) != dense::degree(&dense_char);
    let tol = BigRational::from_float(tolerance.abs().max(1e-300)).unwrap_or_else(|| BigRational::new(1.into(), 1_000_000.into()));

    let mut report = SpectralReport {
        incidence,
        primitive: power.is_some(),
        primitivity_power: power,
        char_poly,
        dominant_eigenvalue: None,
        dominant_factor: None,
        conjugate_moduli: Vec::new(),
        classification: Classification::Undetermined,
        irreducible: if repeated { Irreducibility::No } else { Irreducibility::Undetermined },
        precision_bits: 0,
    };

    for p in precision_schedule(precision_cap) {
        report.precision_bits = p;
        let Some(disks) = isolate_at(&sf, p) else { continue };
        let Some(an) = analyze_at(&sf, &disks, p) else { continue };
        let dom = &disks[an.dominant];
        let poly_for_root = an.factor.clone().unwrap_or_else(|| sf.clone());
        let iv = dom.real_interval();
        report.dominant_eigenvalue =
            Some(refine_real_root(&poly_for_root, iv.lo.to_rational(), iv.hi.to_rational(), &tol));
        report.dominant_factor = an.factor.as_ref().map(|c| IntPolynomial::from_dense(c.iter().cloned()));
        if !repeated {
            report.irreducible = match an.factor_count {
                Some(1) => Irreducibility::Yes,
                Some(_) => Irreducibility::No,
                None => Irreducibility::Undetermined,
            };
        }
        let conjugates: Vec<usize> = match &an.factor_roots {
            Some(r) => r.iter().copied().filter(|&i| i != an.dominant).collect(),
            None => (0..disks.len()).filter(|&i| i != an.dominant).collect(),
        };
        report.conjugate_moduli = conjugates.iter().map(|&i| disks[i].modulus_upper(p).to_f64()).collect();

        let one = Dyadic::one();
        let above_one = dom.real_interval().lo > one;
        let at_most_one = dom.real_interval().hi < one || (dom.real_interval().contains(&one) && sign_at(&sf, &BigRational::one()) == 0);
        let inside = conjugates.iter().all(|&i| disks[i].modulus_upper(p) < one);
        let outside = conjugates.iter().any(|&i| disks[i].modulus_lower(p) >= one);

        let verdict = if !report.primitive {
            Some(Classification::Undetermined)
        } else if at_most_one {
            Some(Classification::NotPisot)
        } else if above_one && inside {
            Some(Classification::Pisot)
        } else if above_one && outside && an.factor_roots.is_some() {
            Some(Classification::NotPisot)
        } else {
            None
        };
        if let Some(v) = verdict {
            report.classification = v;
            break;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_and_tribonacci_are_pisot() {
        for (m, poly) in [(Morphism::fibonacci(), vec![-1, -1, 1]), (Morphism::tribonacci(), vec![-1, -1, -1, 1])] {
            let r = spectral_report(&m, 1e-12);
            assert!(r.primitive);
            assert_eq!(r.char_poly, IntPolynomial::from_coeffs(&poly));
            assert_eq!(r.classification, Classification::Pisot);
            assert_eq!(r.irreducible, Irreducibility::Yes);
            let e = r.dominant_eigenvalue.unwrap();
            assert!(e.radius() > 0.0 && e.radius() <= 1e-12);
        }
        let fib = spectral_report(&Morphism::fibonacci(), 1e-12).dominant_eigenvalue.unwrap();
        assert!((fib.midpoint() - 1.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn thue_morse_uses_the_dominant_factor() {
        let r = spectral_report(&Morphism::from_digit_images(&["01", "10"]).unwrap(), 1e-9);
        assert_eq!(r.char_poly, IntPolynomial::from_coeffs(&[0, -2, 1]));
        assert_eq!(r.dominant_factor, Some(IntPolynomial::from_coeffs(&[-2, 1])));
        assert_eq!(r.irreducible, Irreducibility::No);
        assert_eq!(r.classification, Classification::Pisot);
        assert!((r.dominant_eigenvalue.unwrap().midpoint() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_pisot_example() {
        // x^2 - x - 4: conjugate about -1.56
        let r = spectral_report(&Morphism::from_digit_images(&["01", "0000"]).unwrap(), 1e-9);
        assert_eq!(r.classification, Classification::NotPisot);
        assert_eq!(r.irreducible, Irreducibility::Yes);
        // x^2 - 3x - 1: conjugate about -0.30
        let r = spectral_report(&Morphism::from_digit_images(&["0001", "0"]).unwrap(), 1e-9);
        assert_eq!(r.classification, Classification::Pisot);
    }

    #[test]
    fn non_primitive_is_undetermined() {
        let r = spectral_report(&Morphism::from_digit_images(&["01", "1"]).unwrap(), 1e-9);
        assert!(!r.primitive);
        assert_eq!(r.classification, Classification::Undetermined);
    }

    fn reference_primitive(m: &[Vec<bool>]) -> bool {
        // Independent characterisation: strongly connected and the gcd of
        // cycle lengths through vertex 0 is 1.
        let k = m.len();
        let reach = |from: usize| {
            let mut seen = vec![false; k];
            let mut stack = vec![from];
            while let Some(v) = stack.pop() {
                for w in 0..k {
                    if m[v][w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        };
        if !(0..k).all(|v| reach(v).iter().all(|&b| b)) {
            return false;
        }
        // BFS levels from 0; period = gcd over edges (u,v) of level[u]+1-level[v].
        let mut level = vec![usize::MAX; k];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for w in 0..k {
                if m[v][w] && level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let mut g = 0i64;
        for u in 0..k {
            for v in 0..k {
                if m[u][v] {
                    let d = (level[u] as i64 + 1 - level[v] as i64).abs();
                    g = num_integer::gcd(g, d);
                }
            }
        }
        g == 1
    }

    #[test]
    fn primitivity_agrees_with_graph_oracle_exhaustively() {
        for k in 1..=4usize {
            for mask in 0u32..(1 << (k * k)) {
                let pattern: Vec<Vec<bool>> =
                    (0..k).map(|i| (0..k).map(|j| mask >> (i * k + j) & 1 == 1).collect()).collect();
                if pattern.iter().any(|r| !r.iter().any(|&b| b)) {
                    continue;
                }
                // Images are read off the pattern; letters never repeat, so lengths stay <= k.
                let images: Vec<crate::word::Word> = pattern
                    .iter()
                    .map(|r| crate::word::Word::from_indices((0..k).filter(|&j| r[j])))
                    .collect();
                let m = Morphism::new(images).unwrap();
                let ours = primitivity_power(&m.incidence_matrix()).is_some();
                assert_eq!(ours, reference_primitive(&pattern), "pattern {pattern:?}");
            }
        }
    }
}
