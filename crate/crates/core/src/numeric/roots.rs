//! Certified complex root isolation.
//!
//! Approximations come from Aberth iteration in `f64`, refined by
//! Weierstrass (Durand-Kerner) steps at the working precision. They are
//! then certified with the inclusion disks `|z - z_i| <= n |W_i|`, where
//! `W_i = f(z_i) / (lc * prod_{j != i} (z_i - z_j))`. When these disks are
//! pairwise disjoint each one holds exactly one root.

use num_bigint::BigInt;
use num_traits::Zero;

use super::dense;
use super::dyadic::{Dyadic, Round};
use super::interval::{CInterval, Interval};

/// A closed disk known to contain exactly one root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootDisk {
    pub re: Dyadic,
    pub im: Dyadic,
    pub radius: Dyadic,
}

impl RootDisk {
    /// True when the disk sits on the real axis, so its root is real.
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn rect(&self) -> CInterval {
        CInterval::new(
            Interval::new(&self.re - &self.radius, &self.re + &self.radius),
            Interval::new(&self.im - &self.radius, &self.im + &self.radius),
        )
    }

    pub fn real_interval(&self) -> Interval {
        Interval::new(&self.re - &self.radius, &self.re + &self.radius)
    }

    fn center(&self) -> CInterval {
        CInterval::point(self.re.clone(), self.im.clone())
    }

    pub fn modulus_upper(&self, prec: u64) -> Dyadic {
        self.center().mag(prec).add_round(&self.radius, prec, Round::Up)
    }

    pub fn modulus_lower(&self, prec: u64) -> Dyadic {
        let m = self.center().mig(prec).sub_round(&self.radius, prec, Round::Down);
        if m.signum() < 0 { Dyadic::zero() } else { m }
    }
}

#[derive(Clone, Copy, Debug)]
struct C64(f64, f64);

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64(self.0 + o.0, self.1 + o.1)
    }
    fn sub(self, o: C64) -> C64 {
        C64(self.0 - o.0, self.1 - o.1)
    }
    fn mul(self, o: C64) -> C64 {
        C64(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn div(self, o: C64) -> C64 {
        let n = o.0 * o.0 + o.1 * o.1;
        C64((self.0 * o.0 + self.1 * o.1) / n, (self.1 * o.0 - self.0 * o.1) / n)
    }
    fn abs(self) -> f64 {
        self.0.hypot(self.1)
    }
}

fn aberth_f64(f: &[BigInt]) -> Vec<C64> {
    let n = f.len() - 1;
    let lead = Dyadic::from_int(f[n].clone());
    let monic: Vec<f64> = f
        .iter()
        .map(|c| Dyadic::from_int(c.clone()).div_round(&lead, 60, Round::Down).to_f64())
        .collect();
    let cauchy = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let radius = if cauchy.is_finite() { cauchy } else { 1e6 };
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 0.4 + std::f64::consts::TAU * k as f64 / n as f64;
            C64(radius * t.cos(), radius * t.sin())
        })
        .collect();
    let deriv: Vec<f64> = (1..=n).map(|i| monic[i] * i as f64).collect();
    let horner = |c: &[f64], x: C64| c.iter().rev().fold(C64(0.0, 0.0), |acc, &a| acc.mul(x).add(C64(a, 0.0)));
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let pk = horner(&monic, z[k]);
            let dk = horner(&deriv, z[k]);
            if pk.abs() == 0.0 {
                continue;
            }
            let ratio = pk.div(dk);
            let mut s = C64(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s = s.add(C64(1.0, 0.0).div(z[k].sub(z[j])));
                }
            }
            let w = ratio.div(C64(1.0, 0.0).sub(ratio.mul(s)));
            if w.0.is_finite() && w.1.is_finite() {
                z[k] = z[k].sub(w);
                moved = moved.max(w.abs() / z[k].abs().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[derive(Clone, Debug)]
struct Approx {
    re: Dyadic,
    im: Dyadic,
}

impl Approx {
    fn r(d: Dyadic, p: u64) -> Dyadic {
        d.round(p, Round::Down)
    }
    fn sub(&self, o: &Approx, p: u64) -> Approx {
        Approx { re: Self::r(&self.re - &o.re, p), im: Self::r(&self.im - &o.im, p) }
    }
    fn mul(&self, o: &Approx, p: u64) -> Approx {
        Approx {
            re: Self::r(&(&self.re * &o.re) - &(&self.im * &o.im), p),
            im: Self::r(&(&self.re * &o.im) + &(&self.im * &o.re), p),
        }
    }
    fn div(&self, o: &Approx, p: u64) -> Option<Approx> {
        let n = &(&o.re * &o.re) + &(&o.im * &o.im);
        if n.is_zero() {
            return None;
        }
        let a = &(&self.re * &o.re) + &(&self.im * &o.im);
        let b = &(&self.im * &o.re) - &(&self.re * &o.im);
        Some(Approx { re: a.div_round(&n, p, Round::Down), im: b.div_round(&n, p, Round::Down) })
    }
    fn mag_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
    fn log2_mag(&self) -> f64 {
        self.re.log2_abs().max(self.im.log2_abs())
    }
}

fn eval_approx(f: &[BigInt], z: &Approx, p: u64) -> Approx {
    let mut acc = Approx { re: Dyadic::zero(), im: Dyadic::zero() };
    for c in f.iter().rev() {
        acc = acc.mul(z, p);
        acc.re = (&acc.re + &Dyadic::from_int(c.clone())).round(p, Round::Down);
    }
    acc
}

fn weierstrass_refine(f: &[BigInt], z: &mut [Approx], p: u64) {
    let n = z.len();
    let lead = Approx { re: Dyadic::from_int(f[n].clone()), im: Dyadic::zero() };
    for _ in 0..(p / 8 + 40) {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            let num = eval_approx(f, &z[i], p);
            let mut den = lead.clone();
            for j in 0..n {
                if j != i {
                    den = den.mul(&z[i].sub(&z[j], p), p);
                }
            }
            let Some(w) = num.div(&den, p) else { continue };
            z[i] = z[i].sub(&w, p);
            let scale = z[i].log2_mag().max(0.0);
            worst = worst.max(w.log2_mag() - scale);
        }
        if worst < -(p as f64) + 8.0 {
            break;
        }
    }
}

/// Forces near-real approximations onto the axis and pairs the rest into
/// exact conjugates, so that certified disks respect complex conjugation.
fn symmetrize(z: &mut [Approx], p: u64) {
    let tol = -(p as f64) / 2.0;
    for a in z.iter_mut() {
        let scale = a.log2_mag().max(0.0);
        if a.im.log2_abs() - scale < tol {
            a.im = Dyadic::zero();
        }
    }
    let mut used = vec![false; z.len()];
    for i in 0..z.len() {
        if used[i] || z[i].im.signum() <= 0 {
            continue;
        }
        let target = Approx { re: z[i].re.clone(), im: -&z[i].im };
        let best = (0..z.len())
            .filter(|&j| !used[j] && j != i && z[j].im.signum() < 0)
            .min_by(|&a, &b| {
                let da = z[a].sub(&target, p).mag_f64();
                let db = z[b].sub(&target, p).mag_f64();
                da.total_cmp(&db)
            });
        if let Some(j) = best {
            used[i] = true;
            used[j] = true;
            z[j] = target;
        }
    }
}

fn certify(f: &[BigInt], z: &[Approx], p: u64) -> Option<Vec<RootDisk>> {
    let n = z.len();
    let points: Vec<CInterval> = z.iter().map(|a| CInterval::point(a.re.clone(), a.im.clone())).collect();
    let lead = CInterval::real(Interval::from_int(&f[n]));
    let count = Dyadic::from(n as i64);
    let mut disks = Vec::with_capacity(n);
    for i in 0..n {
        let mut val = CInterval::zero();
        for c in f.iter().rev() {
            val = val.mul(&points[i], p).add(&CInterval::real(Interval::from_int(c)), p);
        }
        let mut den = lead.clone();
        for j in 0..n {
            if j != i {
                den = den.mul(&points[i].sub(&points[j], p), p);
            }
        }
        let w = val.div(&den, p)?;
        let radius = w.mag(p).mul_round(&count, p, Round::Up);
        disks.push(RootDisk { re: z[i].re.clone(), im: z[i].im.clone(), radius });
    }
    for i in 0..n {
        if !disks[i].is_real() && disks[i].im.abs() <= disks[i].radius {
            return None;
        }
        for j in i + 1..n {
            let gap = points[i].sub(&points[j], p).mig(p);
            let need = disks[i].radius.add_round(&disks[j].radius, p, Round::Up);
            if gap <= need {
                return None;
            }
        }
    }
    Some(disks)
}

/// Isolates all complex roots of a squarefree integer polynomial at the
/// given precision, or returns `None` when the disks fail to separate.
pub fn isolate_at(f: &[BigInt], p: u64) -> Option<Vec<RootDisk>> {
    let f = dense::trim(f.to_vec());
    let n = dense::degree(&f)?;
    if n == 0 {
        return Some(Vec::new());
    }
    let mut z: Vec<Approx> = aberth_f64(&f)
        .into_iter()
        .map(|c| Approx {
            re: Dyadic::from_rational(&rational_of(c.0), p, Round::Down),
            im: Dyadic::from_rational(&rational_of(c.1), p, Round::Down),
        })
        .collect();
    weierstrass_refine(&f, &mut z, p);
    symmetrize(&mut z, p);
    certify(&f, &z, p)
}

fn rational_of(x: f64) -> num_rational::BigRational {
    num_rational::BigRational::from_float(if x.is_finite() { x } else { 0.0 })
        .unwrap_or_else(num_rational::BigRational::zero)
}

/// Precision schedule 64, 128, … up to `cap` bits.
pub fn precision_schedule(cap: u64) -> impl Iterator<Item = u64> {
    std::iter::successors(Some(64u64), |p| p.checked_mul(2)).take_while(move |p| *p <= cap.max(64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn golden_ratio_polynomial() {
        let disks = isolate_at(&v(&[-1, -1, 1]), 64).unwrap();
        assert_eq!(disks.len(), 2);
        assert!(disks.iter().all(RootDisk::is_real));
        let mut centers: Vec<f64> = disks.iter().map(|d| d.re.to_f64()).collect();
        centers.sort_by(f64::total_cmp);
        assert!((centers[0] + 0.618_033_988_75).abs() < 1e-9);
        assert!((centers[1] - 1.618_033_988_75).abs() < 1e-9);
    }

    #[test]
    fn tribonacci_polynomial_has_one_real_root() {
        let disks = isolate_at(&v(&[-1, -1, -1, 1]), 64).unwrap();
        assert_eq!(disks.iter().filter(|d| d.is_real()).count(), 1);
        let complex: Vec<_> = disks.iter().filter(|d| !d.is_real()).collect();
        assert_eq!(complex.len(), 2);
        for d in complex {
            assert!(d.modulus_upper(64) < Dyadic::one());
        }
    }

    #[test]
    fn disks_contain_known_roots() {
        // (x - 3)(x + 2)(x^2 + 1)
        let p = dense::mul(&dense::mul(&v(&[-3, 1]), &v(&[2, 1])), &v(&[1, 0, 1]));
        let disks = isolate_at(&p, 64).unwrap();
        let known = [(3i64, 0i64), (-2, 0), (0, 1), (0, -1)];
        for (re, im) in known {
            let hit = disks.iter().filter(|d| {
                let r = d.rect();
                r.re.contains(&Dyadic::from(re)) && r.im.contains(&Dyadic::from(im))
            });
            assert_eq!(hit.count(), 1, "root {re}+{im}i");
        }
    }
}
