//! Exact arithmetic in the Gaussian rationals Q(i).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `re + i*im` with both parts exact rationals. `BigRational` keeps its
/// values reduced with a positive denominator, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        GaussianRational { re, im: BigRational::zero() }
    }

    /// `(re_num/re_den) + i*(im_num/im_den)`; panics on a zero denominator.
    pub fn from_ratios(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        GaussianRational { re: rat(re_num, re_den), im: rat(im_num, im_den) }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_real(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_real(rat(n, d))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re^2 + im^2`, the squared modulus.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(GaussianRational { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        GaussianRational { re: &self.re * k, im: &self.im * k }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// lcm of the denominators of the real and imaginary parts.
    pub fn denominator_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    /// Total bit size of numerators and denominators; the cost measure used
    /// when ranking candidate witnesses.
    pub fn height_bits(&self) -> u64 {
        self.re.numer().bits() + self.re.denom().bits() + self.im.numer().bits() + self.im.denom().bits()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// Natural log of the modulus, robust to numbers far outside the f64 range.
    pub fn ln_abs(&self) -> f64 {
        let a = ln_abs_rational(&self.re);
        let b = ln_abs_rational(&self.im);
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if hi == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        hi + 0.5 * (2.0 * (lo - hi)).exp().ln_1p()
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let l = ln_abs_rational(q);
    if l > 709.0 {
        return if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    if l < -744.0 {
        return 0.0;
    }
    // shift into a range where the integer conversion is exact enough
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = 60 - (nb - db);
    let scaled = if shift >= 0 {
        (q.numer() << shift as usize) / q.denom()
    } else {
        q.numer() / (q.denom() << (-shift) as usize)
    };
    ldexp(scaled.to_f64().unwrap_or(0.0), -shift)
}

/// `x * 2^e` without intermediate overflow or underflow of the power.
pub(crate) fn ldexp(x: f64, e: i64) -> f64 {
    let e = e.clamp(-2200, 2200) as i32;
    let half = e / 2;
    x * 2f64.powi(half) * 2f64.powi(e - half)
}

pub(crate) fn ln_abs_bigint(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift as usize).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn ln_abs_rational(q: &BigRational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_abs_bigint(q.numer()) - ln_abs_bigint(q.denom())
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: &'a GaussianRational) -> GaussianRational {
                let f: fn(&GaussianRational, &GaussianRational) -> GaussianRational = $body;
                f(self, rhs)
            }
        }
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: &'a GaussianRational) -> GaussianRational {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| GaussianRational { re: &a.re + &b.re, im: &a.im + &b.im });
forward_binop!(Sub, sub, |a, b| GaussianRational { re: &a.re - &b.re, im: &a.im - &b.im });
forward_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussianRational::from_real(&a.re * &b.re);
    }
    GaussianRational {
        re: &a.re * &b.re - &a.im * &b.im,
        im: &a.re * &b.im + &a.im * &b.re,
    }
});
forward_binop!(Div, div, |a, b| {
    if b.im.is_zero() {
        return GaussianRational { re: &a.re / &b.re, im: &a.im / &b.re };
    }
    a * &b.inv().expect("division by zero in Q(i)")
});

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        GaussianRational::from_int(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(q: BigRational) -> Self {
        GaussianRational::from_real(q)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{} - {}*i", self.re, -&self.im)
                } else {
                    write!(f, "{} + {}*i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    re: [String; 2],
    im: [String; 2],
}

fn rational_strings(q: &BigRational) -> [String; 2] {
    [q.numer().to_string(), q.denom().to_string()]
}

pub(crate) fn parse_rational_strings(parts: &[String; 2]) -> Result<BigRational, String> {
    let n: BigInt = parts[0].parse().map_err(|_| format!("bad integer {:?}", parts[0]))?;
    let d: BigInt = parts[1].parse().map_err(|_| format!("bad integer {:?}", parts[1]))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(n, d))
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Repr { re: rational_strings(&self.re), im: rational_strings(&self.im) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        let re = parse_rational_strings(&r.re).map_err(D::Error::custom)?;
        let im = parse_rational_strings(&r.im).map_err(D::Error::custom)?;
        Ok(GaussianRational { re, im })
    }
}

/// Gaussian integer used by the integer-scaled kernels (no gcd per operation).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn mul(&self, o: &GaussInt) -> GaussInt {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussInt { re: &self.re * &o.re, im: BigInt::zero() };
        }
        if o.im.is_zero() {
            return GaussInt { re: &self.re * &o.re, im: &self.im * &o.re };
        }
        // three products: (a + bi)(c + di) = ac - bd + ((a + b)(c + d) - ac - bd) i
        let ac = &self.re * &o.re;
        let bd = &self.im * &o.im;
        let cross = (&self.re + &self.im) * (&o.re + &o.im);
        GaussInt { im: cross - &ac - &bd, re: ac - bd }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn one() -> Self {
        GaussInt { re: BigInt::one(), im: BigInt::zero() }
    }

    pub fn scale_int(&self, k: &BigInt) -> GaussInt {
        GaussInt { re: &self.re * k, im: &self.im * k }
    }

    pub fn add_assign(&mut self, o: &GaussInt) {
        self.re += &o.re;
        self.im += &o.im;
    }

    pub fn sub_assign(&mut self, o: &GaussInt) {
        self.re -= &o.re;
        self.im -= &o.im;
    }

    pub fn to_rational(&self) -> GaussianRational {
        GaussianRational::new(BigRational::from_integer(self.re.clone()), BigRational::from_integer(self.im.clone()))
    }

    /// Splits `q` as `g / d` with `g` a Gaussian integer and `d` a positive integer.
    pub fn from_rational(q: &GaussianRational) -> (GaussInt, BigInt) {
        let d = q.denominator_lcm();
        let re = (q.re() * BigRational::from_integer(d.clone())).to_integer();
        let im = (q.im() * BigRational::from_integer(d.clone())).to_integer();
        (GaussInt { re, im }, d)
    }
}
