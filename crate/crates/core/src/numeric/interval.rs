use num_bigint::BigInt;
use num_rational::BigRational;

use super::dyadic::{Dyadic, Round};

/// A closed real interval with dyadic endpoints. Every operation rounds
/// outward at the given precision, so the result contains every exact
/// combination of points from the operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Self {
        Interval { lo: d.clone(), hi: d }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn from_int(v: &BigInt) -> Self {
        Self::point(Dyadic::from_int(v.clone()))
    }

    pub fn from_rational(q: &BigRational, prec: u64) -> Self {
        Interval {
            lo: Dyadic::from_rational(q, prec, Round::Down),
            hi: Dyadic::from_rational(q, prec, Round::Up),
        }
    }

    pub fn add(&self, o: &Interval, prec: u64) -> Interval {
        Interval {
            lo: self.lo.add_round(&o.lo, prec, Round::Down),
            hi: self.hi.add_round(&o.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, o: &Interval, prec: u64) -> Interval {
        Interval {
            lo: self.lo.sub_round(&o.hi, prec, Round::Down),
            hi: self.hi.sub_round(&o.lo, prec, Round::Up),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &Interval, prec: u64) -> Interval {
        let corners = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = corners
            .iter()
            .map(|(a, b)| a.mul_round(b, prec, Round::Down))
            .min()
            .expect("four corners");
        let hi = corners
            .iter()
            .map(|(a, b)| a.mul_round(b, prec, Round::Up))
            .max()
            .expect("four corners");
        Interval { lo, hi }
    }

    pub fn sqr(&self, prec: u64) -> Interval {
        if self.contains_zero() {
            let m = self.mag();
            Interval { lo: Dyadic::zero(), hi: m.mul_round(&m, prec, Round::Up) }
        } else {
            let (a, b) = (self.mig(), self.mag());
            Interval { lo: a.mul_round(&a, prec, Round::Down), hi: b.mul_round(&b, prec, Round::Up) }
        }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, o: &Interval, prec: u64) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        let corners = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = corners
            .iter()
            .map(|(a, b)| a.div_round(b, prec, Round::Down))
            .min()
            .expect("four corners");
        let hi = corners
            .iter()
            .map(|(a, b)| a.div_round(b, prec, Round::Up))
            .max()
            .expect("four corners");
        Some(Interval { lo, hi })
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    /// Upper bound on `|x|` over the interval.
    pub fn mag(&self) -> Dyadic {
        Dyadic::max(&self.lo.abs(), &self.hi.abs())
    }

    /// Lower bound on `|x|` over the interval.
    pub fn mig(&self) -> Dyadic {
        if self.contains_zero() {
            Dyadic::zero()
        } else {
            Dyadic::min(&self.lo.abs(), &self.hi.abs())
        }
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval { lo: Dyadic::min(&self.lo, &o.lo), hi: Dyadic::max(&self.hi, &o.hi) }
    }

    pub fn is_subset_of(&self, o: &Interval) -> bool {
        o.lo <= self.lo && self.hi <= o.hi
    }
}

/// A rectangle in the complex plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        CInterval { re, im }
    }

    pub fn point(re: Dyadic, im: Dyadic) -> Self {
        CInterval { re: Interval::point(re), im: Interval::point(im) }
    }

    pub fn real(re: Interval) -> Self {
        CInterval { re, im: Interval::zero() }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero(), Dyadic::zero())
    }

    pub fn add(&self, o: &CInterval, prec: u64) -> CInterval {
        CInterval { re: self.re.add(&o.re, prec), im: self.im.add(&o.im, prec) }
    }

    pub fn sub(&self, o: &CInterval, prec: u64) -> CInterval {
        CInterval { re: self.re.sub(&o.re, prec), im: self.im.sub(&o.im, prec) }
    }

    pub fn mul(&self, o: &CInterval, prec: u64) -> CInterval {
        let re = self.re.mul(&o.re, prec).sub(&self.im.mul(&o.im, prec), prec);
        let im = self.re.mul(&o.im, prec).add(&self.im.mul(&o.re, prec), prec);
        CInterval { re, im }
    }

    pub fn scale(&self, s: &Interval, prec: u64) -> CInterval {
        CInterval { re: self.re.mul(s, prec), im: self.im.mul(s, prec) }
    }

    /// Enclosure of `|z|^2`.
    pub fn norm_sqr(&self, prec: u64) -> Interval {
        self.re.sqr(prec).add(&self.im.sqr(prec), prec)
    }

    pub fn div(&self, o: &CInterval, prec: u64) -> Option<CInterval> {
        let n = o.norm_sqr(prec);
        if n.contains_zero() {
            return None;
        }
        let conj = CInterval { re: o.re.clone(), im: o.im.neg() };
        let num = self.mul(&conj, prec);
        Some(CInterval { re: num.re.div(&n, prec)?, im: num.im.div(&n, prec)? })
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Upper bound on the modulus.
    pub fn mag(&self, prec: u64) -> Dyadic {
        let (a, b) = (self.re.mag(), self.im.mag());
        (&(&a * &a) + &(&b * &b)).sqrt_round(prec, Round::Up)
    }

    /// Lower bound on the modulus (distance from the rectangle to zero).
    pub fn mig(&self, prec: u64) -> Dyadic {
        let (a, b) = (self.re.mig(), self.im.mig());
        (&(&a * &a) + &(&b * &b)).sqrt_round(prec, Round::Down)
    }

    pub fn is_subset_of(&self, o: &CInterval) -> bool {
        self.re.is_subset_of(&o.re) && self.im.is_subset_of(&o.im)
    }
}
