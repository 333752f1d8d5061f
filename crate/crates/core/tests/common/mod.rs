//! Oracle values from astro-float, converted exactly.

use astro_float::{BigFloat, RoundingMode, Sign};
use gfunc::arith::{Ball, ComplexBall};
use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;

pub const ORACLE_BITS: usize = 512;
pub const RM: RoundingMode = RoundingMode::ToEven;

/// Exact value of a finite astro-float number.
pub fn oracle_rational(x: &BigFloat) -> BigRational {
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite oracle");
    let digits: Vec<u32> = words.iter().flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32]).collect();
    let m = BigInt::from_slice(if sign == Sign::Neg { BigSign::Minus } else { BigSign::Plus }, &digits);
    let shift = e as i64 - 64 * words.len() as i64;
    let two = BigInt::from(2);
    if shift >= 0 {
        BigRational::from_integer(m * two.pow(shift as u32))
    } else {
        BigRational::new(m, two.pow((-shift) as u32))
    }
}

#[allow(dead_code)]
pub fn oracle_ball(x: &BigFloat, prec: u32) -> ComplexBall {
    ComplexBall::from_real(&Ball::from_rational(&oracle_rational(x), prec))
}

#[allow(dead_code)]
pub fn big_ratio(n: i64, d: i64) -> BigFloat {
    BigFloat::from_i64(n, ORACLE_BITS).div(&BigFloat::from_i64(d, ORACLE_BITS), ORACLE_BITS, RM)
}
