//! Real and complex balls: a dyadic midpoint plus a rigorous radius. Every
//! operation rounds the midpoint to the ball's precision and adds the rounding
//! error to the radius, so the represented exact value is never lost.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::dyadic::{Dir, Dyadic, Mag};
use super::qi::GaussianRational;

/// Real ball `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    mid: Dyadic,
    rad: Mag,
    prec: u32,
}

impl Ball {
    pub fn new(mid: Dyadic, rad: Mag, prec: u32) -> Self {
        let (mid, err) = mid.round(prec);
        Ball { mid, rad: rad.add(err, Dir::Up), prec }
    }

    pub fn exact(mid: Dyadic, prec: u32) -> Self {
        Ball::new(mid, Mag::ZERO, prec)
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Ball::exact(Dyadic::from_int(n), prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Ball::exact(Dyadic::from_f64(x), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let (mid, err) = Dyadic::from_rational(q, prec);
        Ball { mid, rad: err, prec }
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Ball {
        Ball::new(self.mid.clone(), self.rad, prec)
    }

    pub fn add_error(&self, e: Mag) -> Ball {
        Ball { mid: self.mid.clone(), rad: self.rad.add(e, Dir::Up), prec: self.prec }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64_up()
    }

    /// Upper bound of `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid.mag_upper().add(self.rad, Dir::Up)
    }

    /// Lower bound of `|x|` over the ball (zero if it contains zero).
    pub fn abs_lower(&self) -> Mag {
        self.mid.mag_lower().sub(self.rad, Dir::Down)
    }

    pub fn contains_zero(&self) -> bool {
        !self.rad.lt(&self.mid.mag_lower())
    }

    pub fn is_positive(&self) -> bool {
        !self.mid.is_negative() && !self.contains_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mid.is_negative() && !self.contains_zero()
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let d = self.mid.sub(&Dyadic::from_f64(x));
        !self.rad.lt(&d.mag_lower())
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let diff = (self.mid.to_rational() - q).abs();
        let (d, _) = Dyadic::from_rational(&diff, 64);
        // d may be rounded below diff by one part in 2^63
        !self.rad.lt(&d.mag_lower().mul(Mag::from_f64(1.0 - 2f64.powi(-60)), Dir::Down))
    }

    pub fn mul_2exp(&self, k: i64) -> Ball {
        Ball { mid: self.mid.mul_2exp(k), rad: self.rad.mul_2exp(k), prec: self.prec }
    }

    pub fn sqr(&self) -> Ball {
        self * self
    }

    pub fn recip(&self) -> Option<Ball> {
        Ball::from_int(1, self.prec).div(self)
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &Ball) -> Option<Ball> {
        let prec = self.prec.max(o.prec);
        let lower = o.abs_lower();
        if lower.is_zero() {
            return None;
        }
        let (q, err) = self.mid.div(&o.mid, prec);
        // |x/y - mx/my| <= (rx + |mx/my| ry) / (|my| - ry)
        let qa = q.mag_upper().add(err, Dir::Up);
        let num = self.rad.add(qa.mul(o.rad, Dir::Up), Dir::Up);
        let rad = num.div(lower, Dir::Up).add(err, Dir::Up);
        Some(Ball { mid: q, rad, prec })
    }

    pub fn sqrt(&self) -> Option<Ball> {
        if self.is_negative() {
            return None;
        }
        let prec = self.prec;
        let lo = self.mid.mag_lower().sub(self.rad, Dir::Down);
        if lo.is_zero() || self.mid.is_negative() {
            // ball touches zero: enclose [0, sqrt(hi)]
            let hi = self.abs_upper().sqrt(Dir::Up);
            let half = hi.mul_2exp(-1);
            let (m, _) = Dyadic::from_f64(half.to_f64_up()).round(prec);
            return Some(Ball { mid: m, rad: half.mul(Mag::from_f64(1.0 + 1e-12), Dir::Up), prec });
        }
        let (s, err) = self.mid.sqrt(prec);
        // |sqrt(x) - sqrt(m)| <= r / (sqrt(m - r) + sqrt(m)) <= r / sqrt(m - r)
        let prop = self.rad.div(lo.sqrt(Dir::Down), Dir::Up);
        Some(Ball { mid: s, rad: err.add(prop, Dir::Up), prec })
    }

    pub fn pi(prec: u32) -> Ball {
        let wp = prec + 16;
        let a = atan_point(&Ball::from_int(1, wp).div(&Ball::from_int(5, wp)).unwrap());
        let b = atan_point(&Ball::from_int(1, wp).div(&Ball::from_int(239, wp)).unwrap());
        (&a.mul_2exp(4) - &b.mul_2exp(2)).with_prec(prec)
    }

    pub fn ln2(prec: u32) -> Ball {
        let wp = prec + 16;
        let third = Ball::from_int(1, wp).div(&Ball::from_int(3, wp)).unwrap();
        atanh_series(&third).mul_2exp(1).with_prec(prec)
    }

    /// Natural logarithm of a positive ball.
    pub fn ln(&self) -> Option<Ball> {
        if !self.is_positive() {
            return None;
        }
        let prec = self.prec;
        let wp = prec + 20;
        // x = 2^k * y with y in [1, 2)
        let k = self.mid.top_exp() - 1;
        let y = Ball::exact(self.mid.mul_2exp(-k), wp);
        let one = Ball::from_int(1, wp);
        let w = (&y - &one).div(&(&y + &one)).unwrap();
        let mut out = atanh_series(&w).mul_2exp(1);
        if k != 0 {
            out = &out + &(&Ball::ln2(wp) * &Ball::from_int(k, wp));
        }
        // |ln x - ln m| <= r / (m - r)
        let lo = self.abs_lower();
        let prop = self.rad.div(lo, Dir::Up);
        Some(out.add_error(prop).with_prec(prec))
    }

    /// Arctangent.
    pub fn atan(&self) -> Ball {
        let point = Ball::exact(self.mid.clone(), self.prec + 16);
        atan_point(&point).add_error(self.rad).with_prec(self.prec)
    }

    /// Principal argument of `x + i y`, in `(-pi, pi]`; `None` when the ball
    /// meets the cut or contains the origin.
    pub fn atan2(y: &Ball, x: &Ball) -> Option<Ball> {
        let prec = x.prec.max(y.prec);
        if x.is_positive() {
            return Some(y.div(x)?.atan());
        }
        if x.is_negative() {
            let base = y.div(x)?.atan();
            let pi = Ball::pi(prec);
            if !y.mid.is_negative() && !y.contains_zero() || y.mid.is_zero() && y.rad.is_zero() {
                return Some(&base + &pi);
            }
            if y.is_negative() {
                return Some(&base - &pi);
            }
            return None;
        }
        // x straddles zero: use the y axis
        let half_pi = Ball::pi(prec).mul_2exp(-1);
        if y.is_positive() {
            return Some(&half_pi - &x.div(y)?.atan());
        }
        if y.is_negative() {
            return Some(&(-&half_pi) - &x.div(y)?.atan());
        }
        None
    }

    pub fn exp(&self) -> Ball {
        let z = ComplexBall::new(self.mid.clone(), Dyadic::zero(), self.rad, self.prec);
        let e = z.exp();
        Ball { mid: e.re.clone(), rad: e.rad, prec: self.prec }
    }
}

/// `sum w^(2k+1)/(2k+1)` for `|w| <= 1/2`, with a rigorous truncation bound.
fn atanh_series(w: &Ball) -> Ball {
    let wp = w.prec;
    let w2 = w.sqr();
    let mut term = w.clone();
    let mut sum = w.clone();
    let mut k: i64 = 1;
    let eps = Mag::pow2(-(wp as i64) - 4);
    loop {
        term = &term * &w2;
        let t = term.div(&Ball::from_int(2 * k + 1, wp)).unwrap();
        sum = &sum + &t;
        k += 1;
        if term.abs_upper().lt(&eps) {
            break;
        }
    }
    // remaining tail <= |w|^(2k+1) / (1 - w^2) <= 2 |term|
    let tail = term.abs_upper().mul(w2.abs_upper(), Dir::Up).mul_2exp(1);
    sum.add_error(tail)
}

/// Arctangent of an (almost) point ball by argument halving and Taylor series.
fn atan_point(x: &Ball) -> Ball {
    let wp = x.prec;
    let one = Ball::from_int(1, wp);
    let mut t = x.clone();
    let mut doublings = 0;
    let small = Mag::pow2(-4);
    while !t.abs_upper().lt(&small) {
        // atan(t) = 2 atan(t / (1 + sqrt(1 + t^2)))
        let s = (&one + &t.sqr()).sqrt().unwrap();
        t = t.div(&(&one + &s)).unwrap();
        doublings += 1;
    }
    let t2 = t.sqr();
    let mut term = t.clone();
    let mut sum = t.clone();
    let mut k: i64 = 1;
    let eps = Mag::pow2(-(wp as i64) - 4);
    loop {
        term = -&(&term * &t2);
        let c = term.div(&Ball::from_int(2 * k + 1, wp)).unwrap();
        sum = &sum + &c;
        k += 1;
        if term.abs_upper().lt(&eps) {
            break;
        }
    }
    // alternating series: tail bounded by the next term
    let tail = term.abs_upper().mul(t2.abs_upper(), Dir::Up);
    sum.add_error(tail).mul_2exp(doublings)
}

impl Add for &Ball {
    type Output = Ball;
    fn add(self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        Ball::new(self.mid.add(&o.mid), self.rad.add(o.rad, Dir::Up), prec)
    }
}

impl Sub for &Ball {
    type Output = Ball;
    fn sub(self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        Ball::new(self.mid.sub(&o.mid), self.rad.add(o.rad, Dir::Up), prec)
    }
}

impl Mul for &Ball {
    type Output = Ball;
    fn mul(self, o: &Ball) -> Ball {
        let prec = self.prec.max(o.prec);
        let a = self.mid.mag_upper();
        let b = o.mid.mag_upper();
        let rad = a
            .mul(o.rad, Dir::Up)
            .add(b.mul(self.rad, Dir::Up), Dir::Up)
            .add(self.rad.mul(o.rad, Dir::Up), Dir::Up);
        Ball::new(self.mid.mul(&o.mid), rad, prec)
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball { mid: self.mid.neg(), rad: self.rad, prec: self.prec }
    }
}

/// Complex disk: dyadic center `re + i im` and radius `rad`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBall {
    re: Dyadic,
    im: Dyadic,
    rad: Mag,
    prec: u32,
}

impl ComplexBall {
    pub fn new(re: Dyadic, im: Dyadic, rad: Mag, prec: u32) -> Self {
        let (re, e1) = re.round(prec);
        let (im, e2) = im.round(prec);
        ComplexBall { re, im, rad: rad.add(e1, Dir::Up).add(e2, Dir::Up), prec }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexBall { re: Dyadic::zero(), im: Dyadic::zero(), rad: Mag::ZERO, prec }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        ComplexBall::new(Dyadic::from_int(n), Dyadic::zero(), Mag::ZERO, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexBall::new(Dyadic::from_f64(re), Dyadic::from_f64(im), Mag::ZERO, prec)
    }

    pub fn from_complex64(z: Complex64, rad: f64, prec: u32) -> Self {
        ComplexBall::new(Dyadic::from_f64(z.re), Dyadic::from_f64(z.im), Mag::from_f64(rad.abs()), prec)
    }

    pub fn from_qi(q: &GaussianRational, prec: u32) -> Self {
        let (re, e1) = Dyadic::from_rational(q.re(), prec);
        let (im, e2) = Dyadic::from_rational(q.im(), prec);
        ComplexBall { re, im, rad: e1.add(e2, Dir::Up), prec }
    }

    pub fn from_real(b: &Ball) -> Self {
        ComplexBall { re: b.mid.clone(), im: Dyadic::zero(), rad: b.rad, prec: b.prec }
    }

    pub fn from_parts(re: &Ball, im: &Ball) -> Self {
        let prec = re.prec.max(im.prec);
        ComplexBall::new(re.mid.clone(), im.mid.clone(), re.rad.add(im.rad, Dir::Up), prec)
    }

    pub fn re_mid(&self) -> &Dyadic {
        &self.re
    }

    pub fn im_mid(&self) -> &Dyadic {
        &self.im
    }

    pub fn re(&self) -> Ball {
        Ball { mid: self.re.clone(), rad: self.rad, prec: self.prec }
    }

    pub fn im(&self) -> Ball {
        Ball { mid: self.im.clone(), rad: self.rad, prec: self.prec }
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64_up()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexBall::new(self.re.clone(), self.im.clone(), self.rad, prec)
    }

    /// The exact center as a point ball.
    pub fn center(&self) -> ComplexBall {
        ComplexBall { re: self.re.clone(), im: self.im.clone(), rad: Mag::ZERO, prec: self.prec }
    }

    pub fn center_qi(&self) -> GaussianRational {
        GaussianRational::new(self.re.to_rational(), self.im.to_rational())
    }

    pub fn add_error(&self, e: Mag) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.clone(), rad: self.rad.add(e, Dir::Up), prec: self.prec }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        ComplexBall { re: self.re.clone(), im: self.im.neg(), rad: self.rad, prec: self.prec }
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        ComplexBall { re: self.re.mul_2exp(k), im: self.im.mul_2exp(k), rad: self.rad.mul_2exp(k), prec: self.prec }
    }

    fn center_abs(&self, dir: Dir) -> Mag {
        let a = match dir {
            Dir::Up => self.re.mag_upper(),
            Dir::Down => self.re.mag_lower(),
        };
        let b = match dir {
            Dir::Up => self.im.mag_upper(),
            Dir::Down => self.im.mag_lower(),
        };
        a.mul(a, dir).add(b.mul(b, dir), dir).sqrt(dir)
    }

    pub fn abs_upper(&self) -> Mag {
        self.center_abs(Dir::Up).add(self.rad, Dir::Up)
    }

    pub fn abs_lower(&self) -> Mag {
        self.center_abs(Dir::Down).sub(self.rad, Dir::Down)
    }

    /// Modulus as a real ball.
    pub fn abs(&self) -> Ball {
        let wp = self.prec;
        let c = Ball::exact(self.re.mul(&self.re).add(&self.im.mul(&self.im)), wp + 8);
        let m = c.sqrt().unwrap();
        m.add_error(self.rad).with_prec(wp)
    }

    pub fn contains_zero(&self) -> bool {
        !self.rad.lt(&self.center_abs(Dir::Down))
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_qi(&self, q: &GaussianRational) -> bool {
        (self - &ComplexBall::from_qi(q, self.prec + 64)).contains_zero()
    }

    pub fn contains_f64(&self, re: f64, im: f64) -> bool {
        (self - &ComplexBall::from_f64(re, im, self.prec)).contains_zero()
    }

    /// True unless the two disks are certified disjoint.
    pub fn overlaps(&self, o: &ComplexBall) -> bool {
        let d = self.sub_centers(o);
        !self.rad.add(o.rad, Dir::Up).lt(&d.center_abs(Dir::Down))
    }

    /// `o` lies entirely inside `self`.
    pub fn contains(&self, o: &ComplexBall) -> bool {
        let d = self.sub_centers(o);
        d.center_abs(Dir::Up).add(o.rad, Dir::Up).cmp_mag(&self.rad) != std::cmp::Ordering::Greater
    }

    fn sub_centers(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im), rad: Mag::ZERO, prec: self.prec }
    }

    /// Lower bound of the distance between any two points of the balls.
    pub fn distance_lower(&self, o: &ComplexBall) -> f64 {
        let d = self.sub_centers(o);
        d.center_abs(Dir::Down).sub(self.rad.add(o.rad, Dir::Up), Dir::Down).to_f64(Dir::Down)
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn pow_u32(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = ComplexBall::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn scale_qi(&self, q: &GaussianRational) -> Self {
        self * &ComplexBall::from_qi(q, self.prec)
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &ComplexBall) -> Option<ComplexBall> {
        let prec = self.prec.max(o.prec);
        let lower = o.abs_lower();
        if lower.is_zero() {
            return None;
        }
        // center quotient via conj(o) / |o|^2
        let den = o.re.mul(&o.re).add(&o.im.mul(&o.im));
        let nre = self.re.mul(&o.re).add(&self.im.mul(&o.im));
        let nim = self.im.mul(&o.re).sub(&self.re.mul(&o.im));
        let (qre, e1) = nre.div(&den, prec);
        let (qim, e2) = nim.div(&den, prec);
        let err = e1.add(e2, Dir::Up);
        let q = ComplexBall { re: qre, im: qim, rad: Mag::ZERO, prec };
        let qa = q.center_abs(Dir::Up).add(err, Dir::Up);
        let num = self.rad.add(qa.mul(o.rad, Dir::Up), Dir::Up);
        let rad = num.div(lower, Dir::Up).add(err, Dir::Up);
        Some(ComplexBall { rad, ..q })
    }

    pub fn recip(&self) -> Option<ComplexBall> {
        ComplexBall::one(self.prec).div(self)
    }

    /// Complex exponential: halve the argument until tiny, sum the Taylor
    /// series with an explicit remainder bound, then square back.
    pub fn exp(&self) -> ComplexBall {
        let prec = self.prec;
        let top = self.abs_upper();
        let s = if top.is_zero() { 0 } else { (top.log2().ceil() as i64 + 10).max(0) };
        let wp = prec + 24 + s as u32;
        let t = self.with_prec(wp).mul_2exp(-s);
        let mut term = ComplexBall::one(wp);
        let mut sum = ComplexBall::one(wp);
        let eps = Mag::pow2(-(wp as i64) - 8);
        let mut k: i64 = 1;
        loop {
            term = (&term * &t).div(&ComplexBall::from_int(k, wp)).unwrap();
            sum = &sum + &term;
            k += 1;
            if term.abs_upper().lt(&eps) {
                break;
            }
        }
        // |t| <= 2^-10, so the remainder is below twice the next term
        let tail = term.abs_upper().mul(t.abs_upper(), Dir::Up).mul_2exp(1);
        let mut r = sum.add_error(tail);
        for _ in 0..s {
            r = r.sqr();
        }
        r.with_prec(prec)
    }

    /// Principal logarithm; `None` when the ball meets the cut `(-inf, 0]`.
    pub fn ln(&self) -> Option<ComplexBall> {
        let prec = self.prec;
        let wp = prec + 16;
        let lower = self.abs_lower();
        if lower.is_zero() {
            return None;
        }
        let re = Ball::exact(self.re.clone(), wp);
        let im = Ball::exact(self.im.clone(), wp);
        // on the negative real axis the principal value is still defined for
        // exact points, but not for balls straddling it
        if self.re.is_negative() && !self.rad.is_zero() && !self.rad.lt(&self.im.mag_lower()) {
            return None;
        }
        let arg = Ball::atan2(&im, &re)?;
        let n2 = Ball::exact(self.re.mul(&self.re).add(&self.im.mul(&self.im)), wp);
        let lnabs = n2.ln()?.mul_2exp(-1);
        let out = ComplexBall::from_parts(&lnabs, &arg);
        Some(out.add_error(self.rad.div(lower, Dir::Up)).with_prec(prec))
    }

    /// Principal square root; `None` when the ball meets the cut.
    pub fn sqrt(&self) -> Option<ComplexBall> {
        let prec = self.prec;
        let wp = prec + 16;
        if self.contains_zero() {
            return None;
        }
        if self.re.is_negative() && !self.rad.lt(&self.im.mag_lower()) && !self.rad.is_zero() {
            return None;
        }
        if self.re.is_negative() && self.im.is_zero() && !self.rad.is_zero() {
            return None;
        }
        let re = Ball::exact(self.re.clone(), wp);
        let im = Ball::exact(self.im.clone(), wp);
        let modulus = Ball::exact(self.re.mul(&self.re).add(&self.im.mul(&self.im)), wp).sqrt()?;
        let point = if !self.re.is_negative() {
            let s = (&modulus + &re).mul_2exp(-1).sqrt()?;
            let i_part = im.div(&s.mul_2exp(1))?;
            ComplexBall::from_parts(&s, &i_part)
        } else {
            let t = (&modulus - &re).mul_2exp(-1).sqrt()?;
            let r_part = Ball::exact(self.im.abs(), wp).div(&t.mul_2exp(1))?;
            let t = if self.im.is_negative() { -&t } else { t };
            ComplexBall::from_parts(&r_part, &t)
        };
        // |sqrt z - sqrt c| <= r / Re(sqrt c) for principal roots off the cut
        let re_root = point.re().abs_lower();
        let prop = if self.rad.is_zero() { Mag::ZERO } else { self.rad.div(re_root, Dir::Up) };
        Some(point.add_error(prop).with_prec(prec))
    }

    /// Principal power `self^e` with a rational exponent.
    pub fn pow_rational(&self, e: &BigRational) -> Option<ComplexBall> {
        if e.is_integer() {
            let n = e.to_integer();
            let k: i64 = n.try_into().ok()?;
            let p = self.pow_u32(k.unsigned_abs() as u32);
            return if k < 0 { p.recip() } else { Some(p) };
        }
        let l = self.ln()?;
        let eb = Ball::from_rational(e, self.prec + 16);
        Some((&l * &ComplexBall::from_real(&eb)).exp())
    }

    pub fn to_sci_strings(&self, digits: usize) -> (String, String) {
        (self.re.to_sci_string(digits), self.im.to_sci_string(digits))
    }
}

impl Add for &ComplexBall {
    type Output = ComplexBall;
    fn add(self, o: &ComplexBall) -> ComplexBall {
        let prec = self.prec.max(o.prec);
        ComplexBall::new(self.re.add(&o.re), self.im.add(&o.im), self.rad.add(o.rad, Dir::Up), prec)
    }
}

impl Sub for &ComplexBall {
    type Output = ComplexBall;
    fn sub(self, o: &ComplexBall) -> ComplexBall {
        let prec = self.prec.max(o.prec);
        ComplexBall::new(self.re.sub(&o.re), self.im.sub(&o.im), self.rad.add(o.rad, Dir::Up), prec)
    }
}

impl Mul for &ComplexBall {
    type Output = ComplexBall;
    fn mul(self, o: &ComplexBall) -> ComplexBall {
        let prec = self.prec.max(o.prec);
        let (re, im) = if self.im.is_zero() && o.im.is_zero() {
            (self.re.mul(&o.re), Dyadic::zero())
        } else {
            (
                self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
                self.re.mul(&o.im).add(&self.im.mul(&o.re)),
            )
        };
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            Mag::ZERO
        } else {
            let a = self.center_abs(Dir::Up);
            let b = o.center_abs(Dir::Up);
            a.mul(o.rad, Dir::Up).add(b.mul(self.rad, Dir::Up), Dir::Up).add(self.rad.mul(o.rad, Dir::Up), Dir::Up)
        };
        ComplexBall::new(re, im, rad, prec)
    }
}

impl Neg for &ComplexBall {
    type Output = ComplexBall;
    fn neg(self) -> ComplexBall {
        ComplexBall { re: self.re.neg(), im: self.im.neg(), rad: self.rad, prec: self.prec }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
owned_ops!(Ball);
owned_ops!(ComplexBall);

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_sci_strings(20);
        write!(f, "[{re} + {im}i +/- {:.3e}]", self.rad_f64())
    }
}

/// JSON form of a ball: decimal center strings plus an f64 error bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallJson {
    pub re: String,
    pub im: String,
    pub err: f64,
}

impl From<&ComplexBall> for BallJson {
    fn from(b: &ComplexBall) -> Self {
        let digits = ((b.prec as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1;
        let (re, im) = b.to_sci_strings(digits.min(120));
        // decimal rendering of the center loses at most half a unit in the last digit
        let render = 10f64.powi(-(digits.min(120) as i32) + 1)
            * b.re.to_f64().abs().max(b.im.to_f64().abs()).max(f64::MIN_POSITIVE);
        BallJson { re, im, err: (b.rad_f64() + render).next_up() }
    }
}
