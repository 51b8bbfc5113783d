use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{AlgebraicInput, ComplexRational, IntPolynomial};
use crate::error::{Error, Result};
use crate::numeric::roots::precision_schedule;
use crate::numeric::{precision_cap, CInterval, Dyadic, Interval, Round};
use crate::stream::WordStream;

/// Longest exponent span Horner evaluation will walk.
const SPAN_LIMIT: u64 = 1 << 24;
/// Exact values are attached to a verdict only below this total degree.
const EXACT_VALUE_LIMIT: u64 = 4096;
/// Working precision of the bounds on the exact path.
const BOUND_PRECISION: u64 = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalStatus {
    /// `lower` is a certified positive lower bound on the modulus.
    NonZero { lower: Dyadic, exact: Option<ComplexRational> },
    Zero,
    Undetermined { precision: u64 },
}

impl EvalStatus {
    pub fn is_nonzero(&self) -> bool {
        matches!(self, EvalStatus::NonZero { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            EvalStatus::NonZero { .. } => "NonZero",
            EvalStatus::Zero => "Zero",
            EvalStatus::Undetermined { .. } => "Undetermined",
        }
    }
}

impl fmt::Display for EvalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalStatus::NonZero { lower, .. } => write!(f, "NonZero(|v| >= 2^{:.1})", lower.log2_abs()),
            EvalStatus::Zero => f.write_str("Zero"),
            EvalStatus::Undetermined { precision } => write!(f, "Undetermined({precision} bits)"),
        }
    }
}

/// Evaluation is organised as `beta^{+-outer} * H(beta)` where `H` has the
/// exponents `m` below; at the inverse this is the reversed polynomial.
struct Shape {
    terms: Vec<(u64, BigInt)>,
    outer: u64,
    inverse: bool,
}

fn shape(p: &IntPolynomial, at_inverse: bool) -> Result<Shape> {
    let (lo, hi) = (p.min_exponent().unwrap_or(0), p.degree().unwrap_or(0));
    if hi - lo > SPAN_LIMIT {
        return Err(Error::Budget(format!("exponent span {} exceeds {SPAN_LIMIT}", hi - lo)));
    }
    let mut terms: Vec<(u64, BigInt)> = p
        .terms()
        .map(|(e, c)| (if at_inverse { hi - e } else { e - lo }, c.clone()))
        .collect();
    terms.sort_by_key(|t| std::cmp::Reverse(t.0));
    Ok(Shape { terms, outer: if at_inverse { hi } else { lo }, inverse: at_inverse })
}

type Gauss = (BigInt, BigInt);

fn gmul(x: &Gauss, y: &Gauss) -> Gauss {
    (&x.0 * &y.0 - &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0)
}

fn gpow(x: &Gauss, mut e: u64) -> Gauss {
    let mut base = x.clone();
    let mut acc = (BigInt::one(), BigInt::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = gmul(&acc, &base);
        }
        base = gmul(&base, &base);
        e >>= 1;
    }
    acc
}

/// `N` with `H(beta) = N / d^{span}` for `beta = g / d`.
fn homogeneous_horner(terms: &[(u64, BigInt)], g: &Gauss, d: &BigInt) -> Gauss {
    let span = terms.first().map_or(0, |t| t.0);
    let mut acc: Gauss = (terms[0].1.clone(), BigInt::zero());
    let mut dpow = BigInt::one();
    let mut cur = span;
    for (m, c) in &terms[1..] {
        let step = cur - m;
        acc = gmul(&acc, &gpow(g, step));
        dpow *= d.pow(step as u32);
        acc.0 += c * &dpow;
        cur = *m;
    }
    gmul(&acc, &gpow(g, cur))
}

fn exact_eval(s: &Shape, beta: &ComplexRational) -> Result<EvalStatus> {
    let (a, b, d) = beta.as_gaussian_fraction();
    let span = s.terms[0].0;
    let n = homogeneous_horner(&s.terms, &(a.clone(), b.clone()), &d);
    if n.0.is_zero() && n.1.is_zero() {
        return Ok(EvalStatus::Zero);
    }
    let p = BOUND_PRECISION;
    let norm_n = Dyadic::from_int(&n.0 * &n.0 + &n.1 * &n.1);
    let mut lower = norm_n.sqrt_round(p, Round::Down);
    if span > 0 && !d.is_one() {
        let den = Dyadic::from_int(d.clone()).pow_round(span, p, Round::Up);
        lower = lower.div_round(&den, p, Round::Down);
    }
    if s.outer > 0 {
        let norm_beta = beta.norm_sqr();
        let dir = if s.inverse { Round::Up } else { Round::Down };
        let m = Dyadic::from_rational(&norm_beta, p, dir).pow_round(s.outer, p, dir).sqrt_round(p, dir);
        lower = if s.inverse { lower.div_round(&m, p, Round::Down) } else { lower.mul_round(&m, p, Round::Down) };
    }
    let exact = (s.outer <= EXACT_VALUE_LIMIT && span <= EXACT_VALUE_LIMIT).then(|| {
        let h = ComplexRational::new(BigRational::from(n.0.clone()), BigRational::from(n.1.clone()))
            .scale(&BigRational::new(BigInt::one(), d.pow(span as u32)));
        let outer = beta.pow(s.outer);
        if s.inverse {
            h.mul(&outer.inv().expect("beta is nonzero"))
        } else {
            h.mul(&outer)
        }
    });
    Ok(EvalStatus::NonZero { lower, exact })
}

fn ipow(x: &CInterval, mut e: u64, p: u64) -> CInterval {
    let mut base = x.clone();
    let mut acc = CInterval::point(Dyadic::one(), Dyadic::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base, p);
        }
        base = base.mul(&base, p);
        e >>= 1;
    }
    acc
}

fn interval_horner(terms: &[(u64, BigInt)], x: &CInterval, p: u64) -> CInterval {
    let mut acc = CInterval::real(Interval::from_int(&terms[0].1));
    let mut cur = terms[0].0;
    for (m, c) in &terms[1..] {
        acc = acc.mul(&ipow(x, cur - m, p), p).add(&CInterval::real(Interval::from_int(c)), p);
        cur = *m;
    }
    acc.mul(&ipow(x, cur, p), p)
}

/// Evaluates `p` at `beta` or at `1/beta`. Exact inputs give an exact
/// verdict; roots of polynomials go through interval arithmetic with
/// precision doubling up to `precision_cap` and never report `Zero`.
pub fn eval_certified(p: &IntPolynomial, beta: &AlgebraicInput, at_inverse: bool, precision_cap: u64) -> Result<EvalStatus> {
    if let Some(z) = beta.exact() {
        if at_inverse && z.is_zero() {
            return Err(Error::Domain("cannot evaluate at 1/beta for beta = 0".into()));
        }
        if p.is_zero() {
            return Ok(EvalStatus::Zero);
        }
        return exact_eval(&shape(p, at_inverse)?, &z);
    }
    if p.is_zero() {
        return Ok(EvalStatus::Zero);
    }
    let s = shape(p, at_inverse)?;
    let mut last = 64;
    let mut excluded_zero = false;
    for prec in precision_schedule(precision_cap) {
        last = prec;
        let b = beta.enclosure(prec)?;
        if b.contains_zero() {
            continue;
        }
        excluded_zero = true;
        let h = interval_horner(&s.terms, &b, prec);
        if h.contains_zero() {
            continue;
        }
        let mut lower = h.mig(prec);
        if s.outer > 0 {
            lower = if s.inverse {
                lower.div_round(&b.mag(prec).pow_round(s.outer, prec, Round::Up), prec, Round::Down)
            } else {
                lower.mul_round(&b.mig(prec).pow_round(s.outer, prec, Round::Down), prec, Round::Down)
            };
        }
        if lower.signum() > 0 {
            return Ok(EvalStatus::NonZero { lower, exact: None });
        }
    }
    if at_inverse && !excluded_zero {
        return Err(Error::Domain("beta could not be separated from 0".into()));
    }
    Ok(EvalStatus::Undetermined { precision: last })
}

/// A disk in the complex plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub center: ComplexRational,
    pub radius: BigRational,
    pub terms: u64,
}

impl Enclosure {
    pub fn contains(&self, z: &ComplexRational) -> bool {
        z.sub(&self.center).norm_sqr() <= &self.radius * &self.radius
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        let r = &self.radius + &other.radius;
        self.center.sub(&other.center).norm_sqr() <= &r * &r
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = Dyadic::from_rational(&self.center.re, 128, Round::Down).to_f64();
        let im = Dyadic::from_rational(&self.center.im, 128, Round::Down).to_f64();
        let r = Dyadic::from_rational(&self.radius, 64, Round::Up).to_f64();
        if self.center.im.is_zero() {
            write!(f, "{re:.20e} +- {r:.3e}")
        } else {
            write!(f, "({re:.20e}, {im:.20e}) +- {r:.3e}")
        }
    }
}

/// Least `N` with `digit_max L^{1-N} / (L - 1) <= target`, the bound on the
/// sum of all terms from index `N` on.
fn terms_needed(lower: &BigRational, digit_max: u64, target: &BigRational) -> (u64, BigRational) {
    if digit_max == 0 {
        return (0, BigRational::zero());
    }
    let mut tail = BigRational::from(BigInt::from(digit_max)) * lower / (lower - BigRational::one());
    let mut n = 0;
    while tail > *target {
        tail /= lower;
        n += 1;
    }
    (n, tail)
}

/// Encloses `sum_n u_n beta^{-n}` to within `target_error`.
pub fn eval_number(u: &WordStream, beta: &AlgebraicInput, target_error: &BigRational) -> Result<Enclosure> {
    if !target_error.is_positive() {
        return Err(Error::Domain("the target error must be positive".into()));
    }
    let cap = precision_cap();
    let lower = beta.require_expanding(cap)?.to_rational();
    let digit_max = u.morphism().alphabet_size() as u64 - 1;
    let exact = beta.exact();
    let tail_target = if exact.is_some() { target_error.clone() } else { target_error / BigInt::from(2) };
    let (n, tail) = terms_needed(&lower, digit_max, &tail_target);
    let digits = u.factor(0, n as usize)?;
    if let Some(z) = exact {
        let x = z.inv().expect("|beta| > 1");
        let mut acc = ComplexRational::zero();
        for d in digits.iter().rev() {
            acc = acc.mul(&x).add(&ComplexRational::real(BigRational::from(BigInt::from(d.0))));
        }
        return Ok(Enclosure { center: acc, radius: tail, terms: n });
    }
    for prec in precision_schedule(cap) {
        let b = beta.enclosure(prec)?;
        let Some(x) = CInterval::point(Dyadic::one(), Dyadic::zero()).div(&b, prec) else { continue };
        let mut acc = CInterval::zero();
        for d in digits.iter().rev() {
            acc = acc.mul(&x, prec).add(&CInterval::real(Interval::from_int(&BigInt::from(d.0))), prec);
        }
        let mid = |i: &Interval| (&i.lo + &i.hi).to_rational() / BigInt::from(2);
        let half = (&(&acc.re.hi - &acc.re.lo) + &(&acc.im.hi - &acc.im.lo)).to_rational() / BigInt::from(2);
        if half <= tail_target {
            return Ok(Enclosure {
                center: ComplexRational::new(mid(&acc.re), mid(&acc.im)),
                radius: tail + half,
                terms: n,
            });
        }
    }
    Err(Error::Budget(format!("enclosure radius not reached within {cap} bits")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::Morphism;
    use crate::word::Letter;
    use proptest::prelude::*;

    fn beta(s: &str) -> AlgebraicInput {
        AlgebraicInput::parse(s).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_exact_cases() {
        let p = IntPolynomial::from_coeffs(&[-1, 1]);
        match eval_certified(&p, &beta("2"), true, 4096).unwrap() {
            EvalStatus::NonZero { lower, exact } => {
                assert_eq!(exact, Some(ComplexRational::real(q(-1, 2))));
                assert!(lower.to_rational() <= q(1, 2) && lower.to_rational() > q(49, 100));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(eval_certified(&p, &beta("1"), false, 4096).unwrap(), EvalStatus::Zero);
        assert_eq!(eval_certified(&p, &beta("1"), true, 4096).unwrap(), EvalStatus::Zero);
        assert!(eval_certified(&p, &beta("0"), true, 4096).is_err());
        // x^2 + 1 vanishes at i and at 1/i
        let c = IntPolynomial::from_coeffs(&[1, 0, 1]);
        assert_eq!(eval_certified(&c, &beta("i"), true, 4096).unwrap(), EvalStatus::Zero);
    }

    #[test]
    fn huge_exponents_keep_a_bound() {
        let e = 100_000_000_000u64;
        let p = &IntPolynomial::x_pow(e) - &IntPolynomial::x_pow(e + 1);
        match eval_certified(&p, &beta("2"), true, 4096).unwrap() {
            EvalStatus::NonZero { lower, exact } => {
                assert!(exact.is_none());
                // |2^{-e} - 2^{-e-1}| = 2^{-e-1}
                let l = lower.log2_abs();
                assert!(l <= -(e as f64) - 1.0 + 1e-6 && l > -(e as f64) - 1.01, "{l}");
            }
            other => panic!("{other:?}"),
        }
        assert!(eval_certified(&p, &beta("1+i"), true, 4096).unwrap().is_nonzero());
    }

    #[test]
    fn interval_path_agrees_with_exact_sign() {
        let phi = beta("rootof:[-1,-1,1]@[1,2,0,0]");
        let p = IntPolynomial::from_coeffs(&[-1, 1, 1]);
        // 1/phi is a root of x^2 + x - 1
        let zero_at_inverse = eval_certified(&p, &phi, true, 512).unwrap();
        assert!(matches!(zero_at_inverse, EvalStatus::Undetermined { .. }));
        let other = IntPolynomial::from_coeffs(&[-1, 1]);
        assert!(eval_certified(&other, &phi, true, 512).unwrap().is_nonzero());
    }

    #[test]
    fn geometric_series() {
        let ones = WordStream::new(Morphism::from_digit_images(&["0", "11"]).unwrap(), Letter(1)).unwrap();
        let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(30));
        let enc = eval_number(&ones, &beta("2"), &tol).unwrap();
        assert!(enc.contains(&ComplexRational::real(q(2, 1))));
        assert!(enc.radius <= tol);
        let zeros = WordStream::new(Morphism::from_digit_images(&["00", "1"]).unwrap(), Letter(0)).unwrap();
        let enc = eval_number(&zeros, &beta("3/2"), &tol).unwrap();
        assert!(enc.center.is_zero());
        assert!(eval_number(&zeros, &beta("1/2"), &tol).unwrap_err().to_string().contains("beta"));
    }

    #[test]
    fn rootof_number_matches_rational_shadow() {
        let fib = WordStream::new(Morphism::fibonacci(), Letter(0)).unwrap();
        let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(20));
        let two = eval_number(&fib, &beta("2"), &tol).unwrap();
        let two_root = eval_number(&fib, &beta("rootof:[-2,1]@[1,3,0,0]"), &tol).unwrap();
        assert!(two.overlaps(&two_root));
    }

    proptest! {
        #[test]
        fn exact_path_is_linear(a in proptest::collection::vec(-5i64..5, 1..8), b in proptest::collection::vec(-5i64..5, 1..8),
                                re in -4i64..5, im in -3i64..4) {
            prop_assume!(re != 0 || im != 0);
            let z = ComplexRational::new(q(re, 1), q(im, 2));
            let input = if im == 0 { AlgebraicInput::Rational(z.re.clone()) } else { AlgebraicInput::GaussianRational(z.clone()) };
            let (pa, pb) = (IntPolynomial::from_coeffs(&a), IntPolynomial::from_coeffs(&b));
            let value = |p: &IntPolynomial| match eval_certified(p, &input, true, 4096).unwrap() {
                EvalStatus::Zero => ComplexRational::zero(),
                EvalStatus::NonZero { exact, .. } => exact.unwrap(),
                EvalStatus::Undetermined { .. } => panic!("exact path"),
            };
            prop_assert_eq!(value(&(&pa + &pb)), value(&pa).add(&value(&pb)));
        }
    }
}
