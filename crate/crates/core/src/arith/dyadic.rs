//! Dyadic numbers `m * 2^e` with big-integer mantissas, and `Mag`, a compact
//! nonnegative float with a separate exponent used for error radii.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::qi::ldexp;

/// Nonnegative magnitude `m * 2^e` with `m` in `[0.5, 1)`. Every operation
/// takes an explicit rounding direction; radii are always rounded up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mag {
    m: f64,
    e: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Up,
    Down,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let (x, adj) = if x.abs() < f64::MIN_POSITIVE { (x * 2f64.powi(64), -64) } else { (x, 0) };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1022;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, exp + adj)
}

fn round_dir(x: f64, dir: Dir) -> f64 {
    match dir {
        Dir::Up => x.next_up(),
        Dir::Down => x.next_down().max(0.0),
    }
}

impl Mag {
    pub const ZERO: Mag = Mag { m: 0.0, e: 0 };
    pub const INFINITY: Mag = Mag { m: f64::INFINITY, e: 0 };

    fn norm(m: f64, e: i64) -> Mag {
        if m == 0.0 {
            return Mag::ZERO;
        }
        if !m.is_finite() {
            return Mag::INFINITY;
        }
        let (fm, fe) = frexp(m);
        Mag { m: fm, e: e + fe }
    }

    /// `x` must be nonnegative; f64 values are exact so no rounding is needed.
    pub fn from_f64(x: f64) -> Mag {
        debug_assert!(x >= 0.0 || x.is_nan());
        if x.is_nan() {
            return Mag::INFINITY;
        }
        Mag::norm(x, 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Mag {
        Mag { m: 0.5, e: k + 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.m.is_finite()
    }

    /// Saturating conversion; a nonzero value that underflows becomes the
    /// smallest positive f64 when rounding up.
    pub fn to_f64(&self, dir: Dir) -> f64 {
        if self.m == 0.0 || !self.m.is_finite() {
            return self.m;
        }
        let v = ldexp(self.m, self.e);
        if v == 0.0 && dir == Dir::Up {
            return f64::from_bits(1);
        }
        if v.is_infinite() && dir == Dir::Down {
            return f64::MAX;
        }
        v
    }

    /// Upper bound as f64 (the usual reporting form of a radius).
    pub fn to_f64_up(&self) -> f64 {
        self.to_f64(Dir::Up)
    }

    /// log2 of the value (approximate; -inf for zero).
    pub fn log2(&self) -> f64 {
        if self.m == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.m.log2() + self.e as f64
    }

    pub fn add(self, o: Mag, dir: Dir) -> Mag {
        if o.is_zero() {
            return self;
        }
        if self.is_zero() {
            return o;
        }
        if !self.is_finite() || !o.is_finite() {
            return Mag::INFINITY;
        }
        let (a, b) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = a.e - b.e;
        if d > 1000 {
            return match dir {
                Dir::Up => Mag::norm(a.m.next_up(), a.e),
                Dir::Down => a,
            };
        }
        Mag::norm(round_dir(a.m + ldexp(b.m, -d), dir), a.e)
    }

    /// `max(self - o, 0)`.
    pub fn sub(self, o: Mag, dir: Dir) -> Mag {
        if o.is_zero() {
            return self;
        }
        if self.cmp_mag(&o) != Ordering::Greater {
            return Mag::ZERO;
        }
        if !self.is_finite() {
            return Mag::INFINITY;
        }
        let d = self.e - o.e;
        if d > 1000 {
            return match dir {
                Dir::Up => self,
                Dir::Down => Mag::norm(self.m.next_down(), self.e),
            };
        }
        let v = self.m - ldexp(o.m, -d);
        Mag::norm(round_dir(v, dir), self.e)
    }

    pub fn mul(self, o: Mag, dir: Dir) -> Mag {
        if self.is_zero() || o.is_zero() {
            return Mag::ZERO;
        }
        if !self.is_finite() || !o.is_finite() {
            return Mag::INFINITY;
        }
        Mag::norm(round_dir(self.m * o.m, dir), self.e + o.e)
    }

    pub fn div(self, o: Mag, dir: Dir) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        if o.is_zero() || !self.is_finite() {
            return Mag::INFINITY;
        }
        if !o.is_finite() {
            return Mag::ZERO;
        }
        Mag::norm(round_dir(self.m / o.m, dir), self.e - o.e)
    }

    pub fn sqrt(self, dir: Dir) -> Mag {
        if self.is_zero() || !self.is_finite() {
            return self;
        }
        let (m, e) = if self.e % 2 != 0 { (self.m * 2.0, self.e - 1) } else { (self.m, self.e) };
        Mag::norm(round_dir(m.sqrt(), dir), e / 2)
    }

    pub fn mul_2exp(self, k: i64) -> Mag {
        if self.is_zero() || !self.is_finite() {
            return self;
        }
        Mag { m: self.m, e: self.e + k }
    }

    pub fn cmp_mag(&self, o: &Mag) -> Ordering {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match (self.is_finite(), o.is_finite()) {
            (false, false) => return Ordering::Equal,
            (false, true) => return Ordering::Greater,
            (true, false) => return Ordering::Less,
            _ => {}
        }
        self.e.cmp(&o.e).then(self.m.partial_cmp(&o.m).unwrap())
    }

    pub fn max(self, o: Mag) -> Mag {
        if self.cmp_mag(&o) == Ordering::Less {
            o
        } else {
            self
        }
    }

    pub fn lt(&self, o: &Mag) -> bool {
        self.cmp_mag(o) == Ordering::Less
    }
}

/// Exact dyadic rational `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }.canonical()
    }

    fn canonical(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz as usize;
            self.exp += tz as i64;
        }
        self
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// Exact: every finite f64 is dyadic.
    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 || !x.is_finite() {
            return Dyadic::zero();
        }
        let (m, e) = frexp(x);
        let mi = (m * 2f64.powi(53)) as i64;
        Dyadic::new(BigInt::from(mi), e - 53)
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    /// `|self| < 2^top_exp()`; meaningless for zero.
    pub fn top_exp(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn mul_2exp(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &o.mant << (o.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: &self.mant * &o.mant, exp: self.exp + o.exp }
    }

    /// Rounds to `prec` significant bits (toward -inf); returns the error bound.
    pub fn round(&self, prec: u32) -> (Dyadic, Mag) {
        let bits = self.mant.bits() as i64;
        let prec = prec.max(2) as i64;
        if bits <= prec {
            return (self.clone(), Mag::ZERO);
        }
        let shift = bits - prec;
        let mant = &self.mant >> shift as usize;
        let out = Dyadic::new(mant, self.exp + shift);
        (out, Mag::pow2(self.exp + shift))
    }

    /// `self / o` to `prec` bits with error bound. Panics on division by zero.
    pub fn div(&self, o: &Dyadic, prec: u32) -> (Dyadic, Mag) {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return (Dyadic::zero(), Mag::ZERO);
        }
        let shift = prec as i64 + 2 + o.mant.bits() as i64 - self.mant.bits() as i64;
        let shift = shift.max(0);
        let num = &self.mant << shift as usize;
        let q = &num / &o.mant; // truncates toward zero, |error| < 1 unit
        let e = self.exp - o.exp - shift;
        let (r, err) = Dyadic::new(q, e).round(prec);
        (r, err.add(Mag::pow2(e), Dir::Up))
    }

    /// Square root of a nonnegative value to `prec` bits.
    pub fn sqrt(&self, prec: u32) -> (Dyadic, Mag) {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return (Dyadic::zero(), Mag::ZERO);
        }
        let want = 2 * (prec as i64 + 2);
        let mut shift = (want - self.mant.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mant << shift as usize;
        let r = m.sqrt(); // floor, error < 1 unit
        let e = (self.exp - shift) / 2;
        let (out, err) = Dyadic::new(r, e).round(prec);
        (out, err.add(Mag::pow2(e), Dir::Up))
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> (Dyadic, Mag) {
        let n = Dyadic::new(q.numer().clone(), 0);
        let d = q.denom();
        if d == &BigInt::from(1) {
            return n.round(prec);
        }
        if d.trailing_zeros() == Some(d.bits() - 1) {
            // power of two denominator: exact
            return Dyadic::new(q.numer().clone(), -(d.bits() as i64 - 1)).round(prec);
        }
        n.div(&Dyadic::new(d.clone(), 0), prec)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::from(1) << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        if bits <= 60 {
            return ldexp(self.mant.to_f64().unwrap(), self.exp);
        }
        let shift = bits - 60;
        ldexp((&self.mant >> shift as usize).to_f64().unwrap(), self.exp + shift)
    }

    fn mag(&self, dir: Dir) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        let bits = self.mant.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (self.mant.abs() >> shift as usize).to_f64().unwrap();
        Mag::norm(round_dir(top, dir), self.exp + shift)
    }

    pub fn mag_upper(&self) -> Mag {
        let m = self.mag(Dir::Up);
        let shift = self.mant.bits() as i64 - 64;
        if shift <= 0 {
            return m;
        }
        // truncated low bits are below one unit of the 64-bit top
        m.add(Mag::pow2(self.exp + shift), Dir::Up)
    }

    pub fn mag_lower(&self) -> Mag {
        self.mag(Dir::Down)
    }

    pub fn cmp(&self, o: &Dyadic) -> Ordering {
        let d = self.sub(o);
        match d.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let neg = self.is_negative();
        let approx_log10 = (self.top_exp() as f64 - 0.5) * std::f64::consts::LOG10_2;
        let mut k = approx_log10.floor() as i64;
        let q = self.abs().to_rational();
        let scaled = |k: i64| -> BigInt {
            let p = digits as i64 - 1 - k;
            let ten = BigInt::from(10);
            let v = if p >= 0 {
                &q * BigRational::from_integer(num_traits::pow(ten, p as usize))
            } else {
                &q / BigRational::from_integer(num_traits::pow(ten, (-p) as usize))
            };
            (v + BigRational::new(1.into(), 2.into())).floor().to_integer()
        };
        let mut s = scaled(k).to_string();
        while s.len() > digits {
            k += 1;
            s = scaled(k).to_string();
        }
        while s.len() < digits {
            k -= 1;
            s = scaled(k).to_string();
        }
        let (head, tail) = s.split_at(1);
        let sign = if neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{k}")
        } else {
            format!("{sign}{head}.{tail}e{k}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mag_rounding_brackets() {
        let a = Mag::from_f64(0.1);
        let b = Mag::from_f64(0.2);
        let up = a.add(b, Dir::Up).to_f64_up();
        let down = a.add(b, Dir::Down).to_f64(Dir::Down);
        assert!(down <= 0.1 + 0.2 && 0.1 + 0.2 <= up);
        let tiny = Mag::pow2(-5000);
        assert!(!tiny.is_zero());
        assert_eq!(tiny.to_f64_up(), f64::from_bits(1));
        assert!(tiny.mul(Mag::pow2(4990), Dir::Up).to_f64_up() >= 2f64.powi(-10));
    }

    #[test]
    fn dyadic_div_and_sqrt() {
        let one = Dyadic::from_int(1);
        let three = Dyadic::from_int(3);
        let (q, err) = one.div(&three, 200);
        let back = q.mul(&three).sub(&one).abs();
        assert!(back.mag_upper().log2() < -195.0);
        assert!(err.log2() < -198.0);
        let (s, _) = Dyadic::from_int(2).sqrt(200);
        let sq = s.mul(&s).sub(&Dyadic::from_int(2)).abs();
        assert!(sq.mag_upper().log2() < -195.0);
    }

    #[test]
    fn from_rational_power_of_two_exact() {
        let q = BigRational::new(3.into(), 8.into());
        let (d, err) = Dyadic::from_rational(&q, 64);
        assert!(err.is_zero());
        assert_eq!(d.to_rational(), q);
    }

    #[test]
    fn sci_formatting() {
        assert_eq!(Dyadic::from_f64(1.5).to_sci_string(3), "1.50e0");
        assert_eq!(Dyadic::from_f64(-0.125).to_sci_string(2), "-1.3e-1");
        assert_eq!(Dyadic::from_int(1000).to_sci_string(1), "1e3");
    }
}
