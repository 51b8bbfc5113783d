use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for inexact operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// An exact binary fraction `mant * 2^exp`. Addition, subtraction and
/// multiplication are exact; the `_round` operations keep `prec` significant
/// bits and round in the requested direction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        match self.mant.trailing_zeros() {
            None => self.exp = 0,
            Some(tz) if tz > 0 => {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
            Some(_) => {}
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v.into(), 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Smallest `t` with `|self| < 2^t`; `i64::MIN` for zero.
    pub fn top(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    pub fn round(&self, prec: u64, dir: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= prec {
            return self.clone();
        }
        let sh = bits - prec;
        let d = pow2(sh);
        let m = match dir {
            Round::Down => self.mant.div_floor(&d),
            Round::Up => Integer::div_ceil(&self.mant, &d),
        };
        Dyadic::new(m, self.exp + sh as i64)
    }

    /// Rounded sum that stays cheap when the operands differ wildly in scale.
    pub fn add_round(&self, other: &Dyadic, prec: u64, dir: Round) -> Self {
        let (big, small) = if self.top() >= other.top() { (self, other) } else { (other, self) };
        if small.is_zero() {
            return big.round(prec, dir);
        }
        let gap_limit = big.top().saturating_sub(prec as i64 + 4);
        if small.top() <= gap_limit {
            // |small| < 2^gap_limit: replace it by a one-sided stand-in.
            let nudge = Dyadic::pow2(gap_limit);
            let adjusted = match (dir, small.signum() < 0) {
                (Round::Down, true) => big - &nudge,
                (Round::Up, false) => big + &nudge,
                _ => big.clone(),
            };
            return adjusted.round(prec, dir);
        }
        (self + other).round(prec, dir)
    }

    pub fn sub_round(&self, other: &Dyadic, prec: u64, dir: Round) -> Self {
        self.add_round(&-other, prec, dir)
    }

    pub fn mul_round(&self, other: &Dyadic, prec: u64, dir: Round) -> Self {
        (self * other).round(prec, dir)
    }

    /// Quotient with `prec` significant bits. Panics on division by zero.
    pub fn div_round(&self, other: &Dyadic, prec: u64, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2;
        let sh = want.max(0) as u64;
        let num = &self.mant << sh;
        let q = match dir {
            Round::Down => num.div_floor(&other.mant),
            Round::Up => Integer::div_ceil(&num, &other.mant),
        };
        Dyadic::new(q, self.exp - sh as i64 - other.exp).round(prec, dir)
    }

    /// Square root of a non-negative value. Panics on negative input.
    pub fn sqrt_round(&self, prec: u64, dir: Round) -> Self {
        assert!(self.signum() >= 0, "square root of a negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut sh = (2 * prec + 4).saturating_sub(self.mant.bits());
        if (self.exp - sh as i64).rem_euclid(2) != 0 {
            sh += 1;
        }
        let m = &self.mant << sh;
        let mut r = m.sqrt();
        if dir == Round::Up && &r * &r < m {
            r += 1;
        }
        Dyadic::new(r, (self.exp - sh as i64) / 2).round(prec, dir)
    }

    /// `self^n` for a non-negative base, rounding every step the same way.
    pub fn pow_round(&self, mut n: u64, prec: u64, dir: Round) -> Self {
        assert!(self.signum() >= 0, "pow_round expects a non-negative base");
        let mut base = self.round(prec, dir);
        let mut acc = Dyadic::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_round(&base, prec, dir);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_round(&base, prec, dir);
            }
        }
        acc
    }

    pub fn from_rational(q: &BigRational, prec: u64, dir: Round) -> Self {
        Dyadic::from_int(q.numer().clone()).div_round(&Dyadic::from_int(q.denom().clone()), prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), pow2(self.exp.unsigned_abs()))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 60 {
            (&self.mant >> (bits - 60), self.exp + (bits - 60) as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let m = m.to_f64().unwrap_or(f64::NAN);
        let e = e.clamp(-100_000, 100_000) as i32;
        if e < -1074 {
            m * 2f64.powi(-1074) * 2f64.powi(e + 1074)
        } else {
            m * 2f64.powi(e)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            self.mant.div_floor(&pow2(self.exp.unsigned_abs()))
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            Integer::div_ceil(&self.mant, &pow2(self.exp.unsigned_abs()))
        }
    }

    /// Approximate base-2 logarithm of `|self|`, useful for reporting tiny bounds.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits();
        let top = if bits > 60 { &self.mant.abs() >> (bits - 60) } else { self.mant.abs() };
        let shift = bits.saturating_sub(60) as f64;
        top.to_f64().unwrap_or(1.0).log2() + shift + self.exp as f64
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b { a.clone() } else { b.clone() }
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b { a.clone() } else { b.clone() }
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &rhs.mant << (rhs.exp - e) as u64;
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -self.mant, exp: self.exp }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            let by_magnitude = ta.cmp(&tb);
            return if sa > 0 { by_magnitude } else { by_magnitude.reverse() };
        }
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v != 0.0 && v.is_finite() {
            write!(f, "{v:e}")
        } else if self.is_zero() {
            f.write_str("0")
        } else {
            write!(f, "2^{:.3}", self.log2_abs())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn directed_division_brackets_one_third() {
        let one = Dyadic::one();
        let three = Dyadic::from(3);
        let lo = one.div_round(&three, 64, Round::Down);
        let hi = one.div_round(&three, 64, Round::Up);
        assert!(lo.to_rational() < q(1, 3));
        assert!(hi.to_rational() > q(1, 3));
        assert!(&hi - &lo <= Dyadic::pow2(-60));
    }

    #[test]
    fn sqrt_brackets() {
        let two = Dyadic::from(2);
        let lo = two.sqrt_round(80, Round::Down);
        let hi = two.sqrt_round(80, Round::Up);
        assert!(&lo * &lo < two);
        assert!(&hi * &hi > two);
        assert_eq!(Dyadic::from(9).sqrt_round(10, Round::Down), Dyadic::from(3));
    }

    #[test]
    fn tiny_addend_keeps_direction() {
        let big = Dyadic::one();
        let tiny = Dyadic::pow2(-1_000_000);
        let up = big.add_round(&tiny, 53, Round::Up);
        let down = big.add_round(&tiny, 53, Round::Down);
        assert!(up > Dyadic::one());
        assert_eq!(down, Dyadic::one());
        let down_neg = big.add_round(&-tiny, 53, Round::Down);
        assert!(down_neg < Dyadic::one());
    }

    #[test]
    fn huge_powers_stay_cheap() {
        let half = Dyadic::pow2(-1);
        let p = half.pow_round(100_000_000_000, 64, Round::Up);
        assert_eq!(p, Dyadic::pow2(-100_000_000_000));
        let three = Dyadic::from(3);
        let lo = three.pow_round(40, 64, Round::Down);
        let hi = three.pow_round(40, 64, Round::Up);
        let exact = Dyadic::from_int(num_traits::pow(BigInt::from(3), 40));
        assert!(lo <= exact && exact <= hi);
    }

    proptest! {
        #[test]
        fn rounding_is_directed(m in -1_000_000_000_000i64..1_000_000_000_000, e in -80i64..80, p in 2u64..40) {
            let x = Dyadic::new(BigInt::from(m), e);
            let lo = x.round(p, Round::Down);
            let hi = x.round(p, Round::Up);
            prop_assert!(lo <= x && x <= hi);
            prop_assert!(lo.mantissa().bits() <= p && hi.mantissa().bits() <= p);
        }

        #[test]
        fn ordering_matches_rationals(a in -10_000i64..10_000, ea in -20i64..20, b in -10_000i64..10_000, eb in -20i64..20) {
            let x = Dyadic::new(a.into(), ea);
            let y = Dyadic::new(b.into(), eb);
            prop_assert_eq!(x.cmp(&y), x.to_rational().cmp(&y.to_rational()));
        }
    }
}
