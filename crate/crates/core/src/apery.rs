//! Rational approximation sequences from partial sums, denominator growth,
//! and the irrationality-exponent bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{BallJson, ComplexBall, GaussianRational};
use crate::error::{Error, Result};
use crate::series::GSeries;

/// `a_n`, `b_n` prefix sums of `U`, `V` with `a_n / b_n -> U(1) / V(1)`.
#[derive(Clone, Debug)]
pub struct AperyPair {
    pub a: Vec<GaussianRational>,
    pub b: Vec<GaussianRational>,
    pub target: ComplexBall,
    /// `U(z) / (1 - z)`.
    pub a_series: GSeries,
    /// `V(z) / (1 - z)`.
    pub b_series: GSeries,
    /// `|a_n - target b_n| = O(error_rate^-n)`, up to a constant factor.
    pub error_rate: f64,
}

impl Serialize for AperyPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AperyPair", 4)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("target", &BallJson::from(&self.target))?;
        st.serialize_field("error_rate", &if self.error_rate.is_finite() { Some(self.error_rate) } else { None })?;
        st.end()
    }
}

fn prefix_sums(s: &GSeries) -> Vec<GaussianRational> {
    let mut acc = GaussianRational::zero();
    s.coeffs()
        .iter()
        .map(|c| {
            acc += c;
            acc.clone()
        })
        .collect()
}

fn checked_radius(s: &GSeries) -> Result<f64> {
    match s.radius_hint() {
        Some(r) if r > 1.0 => Ok(r),
        Some(r) => Err(Error::RadiusTooSmall { radius: r }),
        None => Err(Error::RadiusTooSmall { radius: f64::NAN }),
    }
}

pub fn partial_sum_pair(u: &GSeries, v: &GSeries, prec: u32) -> Result<AperyPair> {
    let ru = checked_radius(u)?;
    let rv = checked_radius(v)?;
    let one = ComplexBall::one(prec);
    let target = u.evaluate(&one, None)?.div(&v.evaluate(&one, None)?).ok_or(Error::DivisionByNonUnit)?;
    let geo_u = GSeries::geometric(u.order()).with_radius_hint(Some(1.0));
    let geo_v = GSeries::geometric(v.order()).with_radius_hint(Some(1.0));
    Ok(AperyPair {
        a: prefix_sums(u),
        b: prefix_sums(v),
        target,
        a_series: u.mul(&geo_u),
        b_series: v.mul(&geo_v),
        error_rate: ru.min(rv),
    })
}

/// Denominator of a Gaussian rational for lcm purposes: the lcm of the
/// denominators of its two parts.
fn denominator(x: &GaussianRational) -> BigInt {
    x.denominator_lcm()
}

fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return num_traits::ToPrimitive::to_f64(n).unwrap().ln();
    }
    let shift = bits - 64;
    num_traits::ToPrimitive::to_f64(&(n >> shift)).unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `log D_n` for `D_n` the lcm of the denominators of `x_0..x_n`.
pub fn log_common_denominators(x: &[GaussianRational]) -> Vec<f64> {
    let mut d = BigInt::one();
    x.iter()
        .map(|v| {
            d = d.lcm(&denominator(v));
            ln_big(&d)
        })
        .collect()
}

/// Regression slope of `log D_n` against `n` over the upper half: an estimate of `log C`.
pub fn denominator_growth(x: &[GaussianRational]) -> Result<f64> {
    if x.len() < 64 {
        return Err(Error::InvalidArgument(format!("denominator growth needs at least 64 terms, got {}", x.len())));
    }
    let logs = log_common_denominators(x);
    let half = x.len() / 2;
    let ns: Vec<f64> = (half..x.len()).map(|n| n as f64).collect();
    Ok(slope(&ns, &logs[half..]))
}

/// `1 / lcm(1..n)^k` for `n = 0..len`, with `lcm(1..0) = 1`.
pub fn reciprocal_lcm_powers(len: usize, k: u32) -> Vec<GaussianRational> {
    let mut l = BigInt::one();
    (0..len)
        .map(|n| {
            if n > 0 {
                l = l.lcm(&BigInt::from(n));
            }
            GaussianRational::from_real(BigRational::new(BigInt::one(), l.pow(k)))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuBoundInput {
    #[serde(rename = "C")]
    pub c: f64,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MuBound {
    Bound { mu: f64, consistency_violation: bool },
    NoConclusion,
}

/// `1 - log(C/r) / log(C/R)` when `C < R`.
pub fn mu_bound(inp: &MuBoundInput) -> Result<MuBound> {
    let MuBoundInput { c, r, big_r } = *inp;
    if !(c > 0.0 && r > 0.0 && big_r > r) || !(c.is_finite() && big_r.is_finite()) {
        return Err(Error::InvalidArgument("need C > 0 and 0 < r < R".into()));
    }
    if c >= big_r {
        return Ok(MuBound::NoConclusion);
    }
    let (num, den) = ((c / r).ln(), (c / big_r).ln());
    // C^2 = R r makes the two logarithms opposite
    let boundary = (c * c - big_r * r).abs() <= 4.0 * f64::EPSILON * c * c;
    let mu = if boundary { 2.0 } else { 1.0 - num / den };
    Ok(MuBound::Bound { mu, consistency_violation: !boundary && c * c < big_r * r })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub checks: Vec<Check>,
}

impl LimitReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LimitSchedule {
    /// Rate to test against; defaults to the pair's own error rate.
    pub rate: Option<f64>,
    pub start: usize,
    pub stride: usize,
}

impl Default for LimitSchedule {
    fn default() -> Self {
        LimitSchedule { rate: None, start: 0, stride: 1 }
    }
}

/// Slack allowed for the normalized error growing between the two halves.
const NORMALIZED_SLACK: f64 = 10.0;

pub fn limit_check(pair: &AperyPair, schedule: &LimitSchedule) -> LimitReport {
    let prec = pair.target.prec();
    let n = pair.a.len().min(pair.b.len());
    let mut checks = Vec::new();

    let threshold = (0..n).rev().find(|&k| pair.b[k].is_zero()).map_or(0, |k| k + 1);
    checks.push(Check {
        name: "b_nonzero".into(),
        pass: threshold < n / 2 + 1,
        detail: format!("b_n != 0 for n >= {threshold}"),
    });

    let stride = schedule.stride.max(1);
    let points: Vec<usize> = (schedule.start.max(threshold)..n).step_by(stride).collect();
    let rate = schedule.rate.unwrap_or(pair.error_rate);
    // (n, |a_n - xi b_n| upper bound, resolution floor)
    let mut errs = Vec::new();
    for &k in &points {
        let a = ComplexBall::from_qi(&pair.a[k], prec);
        let b = ComplexBall::from_qi(&pair.b[k], prec);
        let xb = &pair.target * &b;
        let diff = &a - &xb;
        let floor = 4.0 * xb.rad_f64() + 4.0 * a.rad_f64() + f64::MIN_POSITIVE;
        errs.push((k, diff.abs_upper().to_f64_up(), floor));
    }
    let resolved: Vec<(usize, f64)> = errs.iter().filter(|(_, e, f)| e > f).map(|&(k, e, _)| (k, e)).collect();

    let mut ratio_ok = true;
    let mut prev = f64::INFINITY;
    let mut last = f64::NAN;
    for &k in &points {
        let b = ComplexBall::from_qi(&pair.b[k], prec);
        let ratio = ComplexBall::from_qi(&pair.a[k], prec).div(&b);
        let e = match ratio {
            Some(q) => (&q - &pair.target).abs_upper().to_f64_up(),
            None => f64::INFINITY,
        };
        let floor = 4.0 * pair.target.rad_f64() / b.abs_lower().to_f64(crate::arith::Dir::Down).max(f64::MIN_POSITIVE);
        if e > prev * (1.0 + 1e-9) && e > floor {
            ratio_ok = false;
        }
        prev = prev.min(e);
        last = e;
    }
    checks.push(Check {
        name: "ratio_converges".into(),
        pass: ratio_ok && !points.is_empty(),
        detail: format!("|a_n/b_n - xi| non-increasing over {} checkpoints, last {last:.3e}", points.len()),
    });

    let (pass, detail) = if !rate.is_finite() {
        let ok = errs.iter().skip(errs.len() / 2).all(|(_, e, f)| e <= f);
        (ok, "polynomial series: errors vanish up to ball resolution".to_string())
    } else if resolved.len() < 4 {
        (false, format!("only {} checkpoints above ball resolution", resolved.len()))
    } else {
        let ln_rate = rate.ln();
        let lq: Vec<f64> = resolved.iter().map(|&(k, e)| e.ln() + k as f64 * ln_rate).collect();
        let half = lq.len() / 2;
        let early = lq[..half].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let late = lq[half..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (
            late <= early + NORMALIZED_SLACK.ln(),
            format!(
                "max log(|a_n - xi b_n| rate^n): {early:.3} early, {late:.3} late, resolved to n = {}",
                resolved.last().unwrap().0
            ),
        )
    };
    checks.push(Check { name: "normalized_error_bounded".into(), pass, detail });
    LimitReport { checks }
}

/// Apery's sequences for `zeta(3)`: `b_n` integers and `a_n` rationals with
/// `(n+1)^3 u_(n+1) = (34n^3 + 51n^2 + 27n + 5) u_n - n^3 u_(n-1)`,
/// `b_0 = 1, b_1 = 5, a_0 = 0, a_1 = 6`. External demo data.
pub fn apery_zeta3_sequences(len: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut a = vec![BigRational::zero(), BigRational::from_integer(6.into())];
    let mut b = vec![BigRational::one(), BigRational::from_integer(5.into())];
    for n in 1..len.saturating_sub(1) {
        let nn = BigInt::from(n);
        let p = BigInt::from(34) * &nn * &nn * &nn + BigInt::from(51) * &nn * &nn + BigInt::from(27) * &nn + BigInt::from(5);
        let n3 = BigRational::from_integer(&nn * &nn * &nn);
        let p = BigRational::from_integer(p);
        let d = BigRational::from_integer(BigInt::from(n + 1).pow(3));
        let next = |u: &Vec<BigRational>| (&p * &u[n] - &n3 * &u[n - 1]) / &d;
        let an = next(&a);
        let bn = next(&b);
        a.push(an);
        b.push(bn);
    }
    a.truncate(len);
    b.truncate(len);
    (a, b)
}

/// Summary of the zeta(3) demo.
#[derive(Clone, Debug, Serialize)]
pub struct AperyDemo {
    pub terms: usize,
    /// Last approximant `a_n / b_n` as a decimal string.
    pub approximant: String,
    /// `|a_n/b_n - a_(n-1)/b_(n-1)|`.
    pub last_step: f64,
    /// Slope of `log D_n` for the denominators of `a_n`.
    pub denominator_slope: f64,
    /// Slope of `log b_n`, close to `4 log(1 + sqrt 2)`.
    pub growth_slope: f64,
    pub mu: MuBound,
}

pub fn apery_demo(len: usize) -> Result<AperyDemo> {
    if len < 64 {
        return Err(Error::InvalidArgument("the demo needs at least 64 terms".into()));
    }
    let (a, b) = apery_zeta3_sequences(len);
    let ax: Vec<GaussianRational> = a.iter().cloned().map(GaussianRational::from_real).collect();
    let denominator_slope = denominator_growth(&ax)?;
    let half = len / 2;
    let ns: Vec<f64> = (half..len).map(|n| n as f64).collect();
    let lb: Vec<f64> = b[half..].iter().map(|x| ln_big(&x.to_integer())).collect();
    let growth_slope = slope(&ns, &lb);
    let prec = 256;
    let q = |k: usize| ComplexBall::from_qi(&GaussianRational::from_real(&a[k] / &b[k]), prec);
    let last = q(len - 1);
    let last_step = (&last - &q(len - 2)).abs_upper().to_f64_up();
    let l = (1.0 + 2f64.sqrt()).ln();
    let mu = mu_bound(&MuBoundInput { c: 3f64.exp(), r: (-4.0 * l).exp(), big_r: (4.0 * l).exp() })?;
    Ok(AperyDemo { terms: len, approximant: last.to_sci_strings(40).0, last_step, denominator_slope, growth_slope, mu })
}
