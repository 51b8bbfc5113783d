use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::dense;
use crate::numeric::roots::{isolate_at, precision_schedule, RootDisk};
use crate::numeric::{CInterval, Dyadic, Interval, Round};

/// An exact complex number with rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ComplexRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Writes the number as `(a + b i) / d` with integers and `d > 0`.
    pub fn as_gaussian_fraction(&self) -> (BigInt, BigInt, BigInt) {
        use num_integer::Integer;
        let d = self.re.denom().lcm(self.im.denom());
        let a = self.re.numer() * (&d / self.re.denom());
        let b = self.im.numer() * (&d / self.im.denom());
        (a, b, d)
    }

    pub fn to_cinterval(&self, prec: u64) -> CInterval {
        CInterval::new(Interval::from_rational(&self.re, prec), Interval::from_rational(&self.im, prec))
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// The base `beta` of a numeration, in one of three exact forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraicInput {
    Rational(BigRational),
    GaussianRational(ComplexRational),
    RootOf { poly: Vec<BigInt>, rect: [BigRational; 4] },
}

/// Integers, `p/q`, decimals and decimals with a power-of-ten suffix (`1e-30`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let e: i32 = exp.parse().map_err(|_| bad())?;
        if mant.contains('/') || e.unsigned_abs() > 100_000 {
            return Err(bad());
        }
        let scale = BigRational::from_integer(BigInt::from(10).pow(e.unsigned_abs()));
        let m = parse_rational(mant)?;
        return Ok(if e < 0 { m / scale } else { m * scale });
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole = BigRational::from_str(if int.is_empty() || int == "-" || int == "+" { "0" } else { int }).map_err(|_| bad())?;
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let part = BigRational::new(BigInt::from_str(frac).map_err(|_| bad())?, scale);
        return Ok(if int.starts_with('-') { whole - part } else { whole + part });
    }
    BigRational::from_str(s.strip_prefix('+').unwrap_or(s)).map_err(|_| bad())
}

fn parse_list(s: &str) -> Result<Vec<&str>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected a bracketed list, got {s:?}")))?;
    Ok(inner.split(',').map(str::trim).filter(|t| !t.is_empty()).collect())
}

fn parse_gaussian(s: &str) -> Result<ComplexRational> {
    let body = s.strip_suffix('i').expect("caller checked the suffix");
    // split at the last sign that is not leading
    let cut = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
    let (re, im) = match cut {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let im = match im {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        t => parse_rational(t)?,
    };
    let re = if re.is_empty() { BigRational::zero() } else { parse_rational(re)? };
    Ok(ComplexRational::new(re, im))
}

impl AlgebraicInput {
    /// Parses `p/q`, `p/q+r/si` or `rootof:[c0,c1,...]@[reLo,reHi,imLo,imHi]`.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(rest) = s.strip_prefix("rootof:") {
            let (coeffs, rect) =
                rest.split_once('@').ok_or_else(|| Error::Parse("rootof needs '@' before the rectangle".into()))?;
            let poly = parse_list(coeffs)?
                .into_iter()
                .map(|c| BigInt::from_str(c).map_err(|_| Error::Parse(format!("bad coefficient {c:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let r = parse_list(rect)?.into_iter().map(parse_rational).collect::<Result<Vec<_>>>()?;
            let rect: [BigRational; 4] =
                r.try_into().map_err(|_| Error::Parse("the rectangle needs four bounds".into()))?;
            return Self::root_of(poly, rect);
        }
        if s.ends_with('i') {
            let z = parse_gaussian(&s)?;
            return Ok(if z.im.is_zero() { AlgebraicInput::Rational(z.re) } else { AlgebraicInput::GaussianRational(z) });
        }
        Ok(AlgebraicInput::Rational(parse_rational(&s)?))
    }

    /// A root given by a polynomial and a rectangle, checked to isolate
    /// exactly one root of its squarefree part.
    pub fn root_of(poly: Vec<BigInt>, rect: [BigRational; 4]) -> Result<Self> {
        let poly = dense::trim(poly);
        if dense::degree(&poly).unwrap_or(0) == 0 {
            return Err(Error::Domain("rootof needs a polynomial of positive degree".into()));
        }
        if rect[0] > rect[1] || rect[2] > rect[3] {
            return Err(Error::Domain("rectangle bounds are out of order".into()));
        }
        let poly = dense::squarefree_part(&poly);
        let input = AlgebraicInput::RootOf { poly, rect };
        input.locate(crate::numeric::DEFAULT_PRECISION_CAP.max(1024))?;
        Ok(input)
    }

    fn locate(&self, cap: u64) -> Result<(RootDisk, u64)> {
        let AlgebraicInput::RootOf { poly, rect } = self else {
            return Err(Error::Internal("locate on an exact input".into()));
        };
        for p in precision_schedule(cap) {
            let Some(disks) = isolate_at(poly, p) else { continue };
            let mut inside = Vec::new();
            let mut undecided = false;
            for d in disks {
                match placement(&d, rect) {
                    Some(true) => inside.push(d),
                    Some(false) => {}
                    None => undecided = true,
                }
            }
            if undecided {
                continue;
            }
            return match inside.len() {
                1 => Ok((inside.pop().expect("one disk"), p)),
                0 => Err(Error::Domain("the rectangle contains no root".into())),
                c => Err(Error::Domain(format!("the rectangle contains {c} roots"))),
            };
        }
        Err(Error::Domain(format!("could not decide isolation within {cap} bits")))
    }

    pub fn exact(&self) -> Option<ComplexRational> {
        match self {
            AlgebraicInput::Rational(q) => Some(ComplexRational::real(q.clone())),
            AlgebraicInput::GaussianRational(z) => Some(z.clone()),
            AlgebraicInput::RootOf { .. } => None,
        }
    }

    /// A complex interval holding `beta`, at roughly `prec` bits.
    pub fn enclosure(&self, prec: u64) -> Result<CInterval> {
        if let Some(z) = self.exact() {
            return Ok(z.to_cinterval(prec));
        }
        let AlgebraicInput::RootOf { poly, rect } = self else { unreachable!() };
        for p in precision_schedule(prec.max(64) * 4).skip_while(|&p| p < prec) {
            if let Some(disks) = isolate_at(poly, p) {
                if let Some(d) = disks.into_iter().find(|d| placement(d, rect) == Some(true)) {
                    return Ok(if d.is_real() { CInterval::real(d.real_interval()) } else { d.rect() });
                }
            }
        }
        Err(Error::Domain(format!("root could not be re-isolated at {prec} bits")))
    }

    /// A certified lower bound on `|beta|`.
    pub fn modulus_lower(&self, prec: u64) -> Result<Dyadic> {
        match self.exact() {
            Some(z) => Ok(Dyadic::from_rational(&z.norm_sqr(), prec, Round::Down).sqrt_round(prec, Round::Down)),
            None => Ok(self.enclosure(prec)?.mig(prec)),
        }
    }

    /// Fails unless `|beta| > 1` can be certified.
    pub fn require_expanding(&self, cap: u64) -> Result<Dyadic> {
        for p in precision_schedule(cap) {
            let lower = self.modulus_lower(p)?;
            if lower > Dyadic::one() {
                return Ok(lower);
            }
            if self.exact().is_some() {
                break;
            }
        }
        Err(Error::Domain(format!("|beta| > 1 could not be certified for {self}")))
    }
}

/// `Some(true)` when the disk lies in the rectangle, `Some(false)` when it
/// misses it, `None` when it straddles the boundary.
fn placement(d: &RootDisk, rect: &[BigRational; 4]) -> Option<bool> {
    let [re_lo, re_hi, im_lo, im_hi] = rect;
    let r = d.real_interval();
    let (rlo, rhi) = (r.lo.to_rational(), r.hi.to_rational());
    let (ilo, ihi) = if d.is_real() {
        (BigRational::zero(), BigRational::zero())
    } else {
        let b = d.rect().im;
        (b.lo.to_rational(), b.hi.to_rational())
    };
    if rhi < *re_lo || rlo > *re_hi || ihi < *im_lo || ilo > *im_hi {
        return Some(false);
    }
    if rlo >= *re_lo && rhi <= *re_hi && ilo >= *im_lo && ihi <= *im_hi {
        return Some(true);
    }
    None
}

impl fmt::Display for AlgebraicInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicInput::Rational(q) => write!(f, "{q}"),
            AlgebraicInput::GaussianRational(z) => write!(f, "{z}"),
            AlgebraicInput::RootOf { poly, rect } => {
                let cs: Vec<String> = poly.iter().map(ToString::to_string).collect();
                let rs: Vec<String> = rect.iter().map(ToString::to_string).collect();
                write!(f, "rootof:[{}]@[{}]", cs.join(","), rs.join(","))
            }
        }
    }
}

impl FromStr for AlgebraicInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
