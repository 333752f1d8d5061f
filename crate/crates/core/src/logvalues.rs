//! Logarithms of algebraic numbers as sums of series values at `z = 1`.
//!
//! For a root `alpha` of `Q`, pick `m = 2^k` with `alpha^(1/m)` close to 1,
//! expand `beta = alpha^(1/m)` as `Phi_u(1)` for `Q(X^m)`, and split
//! `log(beta) = log(1 + Psi_u(1)) + log(u)` with `Psi_u = (Phi_u - u) / u`.
//! The second term is `log|u| + i arg(u)`, each a series in a small rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algroots::{build_root_series_with, Radius, RootSeries, WitnessSearch};
use crate::arith::{complex_roots, Ball, BallJson, ComplexBall, GaussianRational, QiPolynomial};
use crate::error::{Error, Result};
use crate::series::GSeries;

/// `log(1 + psi)` as `integral(psi' / (1 + psi))`; needs `psi(0) = 0`.
///
/// Coefficients with geometrically growing denominators are handled in the
/// rescaled variable `z = B w`, with `B` the denominator of `psi_1`, where the
/// denominators stay small and rational arithmetic avoids large gcds.
pub fn series_log1p(psi: &GSeries) -> Result<GSeries> {
    if !psi.coeff(0).is_zero() {
        return Err(Error::InvalidArgument("log1p needs a series with zero constant term".into()));
    }
    let n = psi.order();
    let scale = if n >= 1 { psi.coeff(1).denominator_lcm() } else { BigInt::one() };
    if scale.is_one() {
        return log1p_plain(psi);
    }
    let b = GaussianRational::from_real(BigRational::from_integer(scale));
    let binv = b.inv().expect("denominators are nonzero");
    let mut p = GaussianRational::one();
    let scaled = GSeries::from_fn(n, |k| {
        let c = psi.coeff(k) * &p;
        p = &p * &b;
        c
    });
    let log = log1p_plain(&scaled)?;
    let mut p = GaussianRational::one();
    Ok(GSeries::from_fn(n, |k| {
        let c = log.coeff(k) * &p;
        p = &p * &binv;
        c
    }))
}

fn log1p_plain(psi: &GSeries) -> Result<GSeries> {
    if let Some(out) = log1p_integer(psi) {
        return Ok(out);
    }
    let one_plus = psi.add(&GSeries::one(psi.order()));
    let ratio = psi.differentiate().divide(&one_plus.truncate(psi.order().saturating_sub(1)))?;
    Ok(ratio.antiderivative().with_radius_hint(None))
}

/// Denominators of the common scale beyond this many bits fall back to rationals.
const COMMON_DENOMINATOR_BITS: u64 = 8192;

/// `log1p` with every coefficient over one common denominator `E`.
///
/// With `psi = s / E` and `M_k = k L_k = Y_k / E^k`, the recurrence
/// `M_k = k psi_k - sum_(j<k) psi_(k-j) M_j` becomes integral:
/// `Y_k = k s_k E^(k-1) - sum_(j<k) s_(k-j) Y_j E^(k-1-j)`.
fn log1p_integer(psi: &GSeries) -> Option<GSeries> {
    use crate::arith::qi::GaussInt;
    let n = psi.order();
    let e = (1..=n).fold(BigInt::one(), |acc, k| num_integer::Integer::lcm(&acc, &psi.coeff(k).denominator_lcm()));
    if e.bits() > COMMON_DENOMINATOR_BITS {
        return None;
    }
    let eq = BigRational::from_integer(e.clone());
    let s: Vec<GaussInt> = (0..=n).map(|k| GaussInt::from_rational(&psi.coeff(k).scale(&eq)).0).collect();
    let mut powers = vec![BigInt::one()];
    for k in 1..=n {
        let next = &powers[k - 1] * &e;
        powers.push(next);
    }
    let mut y: Vec<GaussInt> = vec![GaussInt::zero()];
    let mut coeffs = vec![GaussianRational::zero()];
    for k in 1..=n {
        let mut acc = s[k].scale_int(&(BigInt::from(k) * &powers[k - 1]));
        for j in 1..k {
            if s[k - j].re.is_zero() && s[k - j].im.is_zero() {
                continue;
            }
            acc.sub_assign(&s[k - j].mul(&y[j]).scale_int(&powers[k - 1 - j]));
        }
        let den = BigRational::from_integer(BigInt::from(k) * &powers[k]);
        coeffs.push(GaussianRational::new(BigRational::from_integer(acc.re.clone()) / &den, BigRational::from_integer(acc.im.clone()) / &den));
        y.push(acc);
    }
    Some(GSeries::new(coeffs))
}

/// `sum_{n>=1} (-1)^(n-1) w^n / n`, radius 1.
fn log1p_base(order: usize) -> GSeries {
    GSeries::from_fn(order, |n| match n {
        0 => GaussianRational::zero(),
        _ if n % 2 == 1 => GaussianRational::ratio(1, n as i64),
        _ => GaussianRational::ratio(-1, n as i64),
    })
    .with_radius_hint(Some(1.0))
}

/// `sum_k (-1)^k w^(2k+1) / (2k+1)`, radius 1.
fn arctan_base(order: usize) -> GSeries {
    GSeries::from_fn(order, |n| match n % 4 {
        1 => GaussianRational::ratio(1, n as i64),
        3 => GaussianRational::ratio(-1, n as i64),
        _ => GaussianRational::zero(),
    })
    .with_radius_hint(Some(1.0))
}

fn rational_of(r: f64) -> Result<BigRational> {
    BigRational::from_float(r).ok_or_else(|| Error::InvalidArgument(format!("target radius {r} is not finite")))
}

/// Checks `Re u > 0`, `|Re(u)^2 + Im(u)^2 - 1| < 1/R` and `|Im u / Re u| < 1/R`.
fn admissible(u: &GaussianRational, inv_r: &BigRational) -> Option<(BigRational, BigRational)> {
    let (a, b) = (u.re(), u.im());
    if !a.is_positive() {
        return None;
    }
    let x = u.norm() - BigRational::from_integer(1.into());
    let y = b / a;
    (x.abs() < *inv_r && y.abs() < *inv_r).then_some((x, y))
}

/// Series whose values at 1 are `log|u|` and `i arg(u)`: `(1/2) log(1 + x)`
/// at `x = |u|^2 - 1`, and `i arctan(y)` at `y = Im u / Re u`.
pub fn log_gaussian_rational(u: &GaussianRational, r_target: f64, order: usize) -> Result<Vec<GSeries>> {
    let inv_r = rational_of(r_target)?.recip();
    let (x, y) = admissible(u, &inv_r).ok_or_else(|| {
        Error::InadmissibleWitness(format!("u = {u} needs Re u > 0, ||u|^2 - 1| < 1/R and |Im u / Re u| < 1/R for R = {r_target}"))
    })?;
    let zero = GaussianRational::zero();
    let half_log = log1p_base(order)
        .affine_compose(&zero, &-GaussianRational::from_real(x))
        .scale(&GaussianRational::ratio(1, 2))
        .with_center_label(Some("half_log_norm".into()));
    let arg = arctan_base(order)
        .affine_compose(&zero, &-GaussianRational::from_real(y))
        .scale(&GaussianRational::i())
        .with_center_label(Some("i_arctan".into()));
    Ok(vec![half_log, arg])
}

/// One summand of a logarithm.
#[derive(Clone, Debug, Serialize)]
pub struct LogComponent {
    pub label: String,
    pub branch: String,
    pub series: GSeries,
    /// Enclosure of the series value at 1.
    #[serde(serialize_with = "ser_ball")]
    pub value: ComplexBall,
}

fn ser_ball<S: serde::Serializer>(b: &ComplexBall, s: S) -> std::result::Result<S::Ok, S::Error> {
    BallJson::from(b).serialize(s)
}

/// `log(alpha) = m * sum(components)` with every component a series of radius
/// greater than the target.
#[derive(Clone, Debug)]
pub struct LogRealization {
    pub components: Vec<LogComponent>,
    pub m: u64,
    pub u: GaussianRational,
    pub value: ComplexBall,
    pub root_series: RootSeries,
    /// Series order actually used, at most the requested one.
    pub order_used: usize,
    /// `exp(value)` meets the input root ball.
    pub exp_consistent: bool,
}

/// Terms past the point where `R^(-n)` drops below `2^-(wp + 16)` cannot
/// tighten the ball, since every component has radius greater than `R`.
pub fn log_terms_needed(r_target: f64, wp: u32) -> usize {
    ((wp as f64 + 16.0) * std::f64::consts::LN_2 / r_target.ln()).ceil() as usize + 8
}

/// Largest shrink exponent `log2(m)` tried.
const MAX_SHRINK: u32 = 24;

/// Radius on which `|Psi_u| < 1` is certified, `R (rho/R)^t` for the largest
/// `t in {1/2, 1/4, 1/8}` that works. The bound is `sum |psi_n| r^n` plus a
/// geometric tail with ratio `sqrt(r / rho)`.
fn psi_certified_radius(phi: &GSeries, rho: f64, r_target: f64) -> Option<f64> {
    let u_ln = phi.coeff(0).ln_abs();
    let n = phi.order();
    for t in [0.5, 0.25, 0.125] {
        let r = if rho.is_infinite() { 2.0 * r_target } else { r_target * (rho / r_target).powf(t) };
        if !(r > r_target) {
            continue;
        }
        let ln_r = r.ln();
        let terms: Vec<f64> = (1..=n).map(|k| (phi.coeff(k).ln_abs() - u_ln + k as f64 * ln_r).exp()).collect();
        let mut total: f64 = terms.iter().sum();
        if rho.is_finite() && n >= 1 {
            let q = (r / rho).sqrt();
            let worst = (0..n.min(4)).map(|k| terms[n - 1 - k] * q.powi(k as i32)).fold(0.0, f64::max);
            total += worst * q / (1.0 - q);
        }
        if total * (1.0 + 1e-9) < 1.0 {
            return Some(r);
        }
    }
    None
}

/// Enclosures of every root of `Q(X^m)`: all `m`-th roots of the roots of `Q`.
fn shrunk_roots(q: &QiPolynomial, m: u64, prec: u32) -> Result<Vec<ComplexBall>> {
    let wp = prec + 16;
    let pi = Ball::pi(wp);
    let turn = ComplexBall::from_parts(&Ball::from_int(0, wp), &pi.mul_2exp(1));
    let mut out = Vec::new();
    for root in complex_roots(q, prec)? {
        let b = root.ball.with_prec(wp);
        if b.contains_zero() {
            let r = b.abs_upper().to_f64_up().powf(1.0 / m as f64) * (1.0 + 1e-9);
            out.push(ComplexBall::from_complex64(num_complex::Complex64::new(0.0, 0.0), r, prec));
            continue;
        }
        let log = match b.ln() {
            Some(l) => l,
            None => {
                let l = (-&b).ln().ok_or(Error::PrecisionExhausted { bits: prec })?;
                &l + &ComplexBall::from_parts(&Ball::from_int(0, wp), &pi)
            }
        };
        let inv_m = ComplexBall::from_real(&Ball::from_int(1, wp).div(&Ball::from_int(m as i64, wp)).unwrap());
        let base = (&log * &inv_m).exp();
        for j in 0..m {
            let rot = (&(&turn * &inv_m) * &ComplexBall::from_int(j as i64, wp)).exp();
            out.push((&base * &rot).with_prec(prec));
        }
    }
    Ok(out)
}

/// Principal `log(alpha)` for a simple nonzero root `alpha` of `q`.
pub fn log_algebraic(q: &QiPolynomial, alpha: &ComplexBall, r_target: f64, order: usize, prec: u32) -> Result<LogRealization> {
    if !(r_target >= 1.0) {
        return Err(Error::InvalidArgument(format!("target radius must be at least 1, got {r_target}")));
    }
    let wp = prec + 32;
    let order = if r_target > 1.0 { order.min(log_terms_needed(r_target, wp)) } else { order };
    let log_alpha = alpha.with_prec(wp).ln().ok_or(Error::BranchCut)?;
    let quarter = Ball::from_int(1, wp).div(&Ball::from_f64(4.0 * r_target, wp)).unwrap();
    let mut shrink = None;
    for k in 0..=MAX_SHRINK {
        let m = 1u64 << k;
        let inv_m = ComplexBall::from_real(&Ball::from_int(1, wp).div(&Ball::from_int(m as i64, wp)).unwrap());
        let beta = (&log_alpha * &inv_m).exp();
        if (&beta - &ComplexBall::one(wp)).abs_upper().lt(&quarter.abs_lower()) {
            shrink = Some((m, beta.with_prec(prec)));
            break;
        }
    }
    let (m, beta) = shrink.ok_or(Error::NoWitnessFound { max_bits: MAX_SHRINK })?;
    let qm = q.compose_power(m as usize);
    let inv_r = rational_of(r_target)?.recip();
    let pre = |u: &GaussianRational, _: &Radius| admissible(u, &inv_r).is_some();
    let post = |phi: &GSeries, rho: &Radius| psi_certified_radius(phi, rho.lower_f64(), r_target).is_some();
    let search = WitnessSearch { others: Some(shrunk_roots(q, m, prec)?), pre: &pre, post: &post };
    let rs = build_root_series_with(&qm, &beta, r_target, order, prec, search)?;
    let u = rs.u.clone();
    let r_cert = psi_certified_radius(&rs.phi, rs.radius.lower_f64(), r_target).expect("checked during the witness search");

    let u_inv = u.inv().expect("admissible witnesses have Re u > 0");
    let psi = GSeries::from_fn(order, |k| if k == 0 { GaussianRational::zero() } else { rs.phi.coeff(k) * &u_inv });
    let log1p = series_log1p(&psi)?.with_radius_hint(Some(r_cert)).with_center_label(Some("log1p_psi".into()));
    let one = GaussianRational::one();
    let mut components = vec![LogComponent {
        label: "log1p_psi".into(),
        branch: "principal".into(),
        value: log1p.evaluate_qi(&one, wp, None)?,
        series: log1p,
    }];
    let (x, y) = admissible(&u, &inv_r).expect("checked during the witness search");
    for (series, ratio) in log_gaussian_rational(&u, r_target, order)?.into_iter().zip([x, y]) {
        // |a_(n+1) / a_n| <= |x| exactly for these series
        let q = crate::arith::qi::rational_to_f64(&ratio.abs()).next_up();
        let value = series.evaluate_qi(&one, wp, Some(q))?;
        let label = series.center_label().unwrap_or_default().to_string();
        components.push(LogComponent { label, branch: "principal".into(), series, value });
    }
    let sum = components.iter().fold(ComplexBall::zero(wp), |acc, c| &acc + &c.value);
    let value = (&sum * &ComplexBall::from_int(m as i64, wp)).with_prec(prec);
    let exp_consistent = value.with_prec(wp).exp().overlaps(alpha);
    Ok(LogRealization { components, m, u, value, root_series: rs, order_used: order, exp_consistent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> GaussianRational {
        GaussianRational::ratio(n, d)
    }

    #[test]
    fn log1p_examples() {
        let n = 10;
        let z = GSeries::from_fn(n, |k| if k == 1 { q(1, 1) } else { q(0, 1) });
        let l = series_log1p(&z).unwrap();
        for k in 1..=n {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(l.coeff(k), &q(sign, k as i64));
        }
        let mz = z.neg();
        let l = series_log1p(&mz).unwrap();
        assert_eq!(l.coeff(7), &q(-1, 7));
        let sq = GSeries::from_fn(n, |k| match k {
            1 => q(2, 1),
            2 => q(1, 1),
            _ => q(0, 1),
        });
        let l2 = series_log1p(&sq).unwrap();
        assert_eq!(l2, series_log1p(&z).unwrap().scale(&q(2, 1)));
        assert_eq!(l2.order(), n);
    }

    fn eval_sum(parts: &[GSeries], prec: u32) -> ComplexBall {
        parts
            .iter()
            .map(|s| s.evaluate_qi(&GaussianRational::one(), prec, None).unwrap())
            .fold(ComplexBall::zero(prec), |a, b| &a + &b)
    }

    #[test]
    fn gaussian_rational_logs() {
        let one = log_gaussian_rational(&q(1, 1), 3.0, 20).unwrap();
        assert!(one.iter().all(|s| s.is_zero()));
        let v = eval_sum(&log_gaussian_rational(&GaussianRational::from_ratios(1, 1, 1, 10), 9.0, 60).unwrap(), 128);
        let oracle = ComplexBall::from_qi(&GaussianRational::from_ratios(1, 1, 1, 10), 128).ln().unwrap();
        assert!(v.overlaps(&oracle));
        assert!((v.to_complex64().re - 0.00497517).abs() < 1e-8);
        assert!((v.to_complex64().im - 0.09966865).abs() < 1e-8);
        let w = eval_sum(&log_gaussian_rational(&q(99, 100), 50.0, 40).unwrap(), 128);
        assert!((w.to_complex64().re + 0.01005034).abs() < 1e-8);
        assert!(matches!(log_gaussian_rational(&q(3, 2), 10.0, 10), Err(Error::InadmissibleWitness(_))));
        assert!(matches!(log_gaussian_rational(&q(-1, 1), 1.0, 10), Err(Error::InadmissibleWitness(_))));
    }

    #[test]
    fn log_of_one() {
        let poly = QiPolynomial::from_ints(&[-1, 1]);
        let r = log_algebraic(&poly, &ComplexBall::one(128), 4.0, 20, 128).unwrap();
        assert!(r.value.contains_zero());
        assert_eq!(r.m, 1);
    }

    #[test]
    fn log_two_and_sqrt_two() {
        let two = QiPolynomial::from_ints(&[-2, 1]);
        let alpha = ComplexBall::from_int(2, 160);
        let r = log_algebraic(&two, &alpha, 10.0, 48, 160).unwrap();
        assert_eq!(r.m, 32);
        assert!(r.exp_consistent);
        let ln2 = ComplexBall::from_real(&Ball::ln2(160));
        assert!(r.value.overlaps(&ln2));
        assert!(r.value.rad_f64() < 1e-20, "{}", r.value.rad_f64());
        for c in &r.components {
            assert!(c.series.radius_hint().unwrap() > 10.0);
        }
        let sq = QiPolynomial::from_ints(&[-2, 0, 1]);
        let root = complex_roots(&sq, 160).unwrap().remove(0).ball;
        let h = log_algebraic(&sq, &root, 10.0, 48, 160).unwrap();
        assert_eq!(h.m, 16);
        let half = &r.value * &ComplexBall::from_f64(0.5, 0.0, 160);
        assert!(h.value.overlaps(&half));
        assert!(h.exp_consistent);
    }

    #[test]
    fn shrink_changes_components_not_value() {
        let two = QiPolynomial::from_ints(&[-2, 1]);
        let alpha = ComplexBall::from_int(2, 160);
        let small = log_algebraic(&two, &alpha, 2.0, 48, 160).unwrap();
        let large = log_algebraic(&two, &alpha, 10.0, 48, 160).unwrap();
        assert!(small.m < large.m);
        assert_ne!(small.u, large.u);
        assert!(small.value.overlaps(&large.value));
        // empirical radius of the main component clears the target
        let est = large.components[0].series.radius_estimate().unwrap();
        assert!(est >= 0.9 * 10.0, "{est}");
    }
}
