//! Algebraic numbers as values at `z = 1` of series `Phi_u` with
//! `Q(Phi_u(z)) = (1 - z) Q(u)`, the local inverse of `Q` around a witness `u`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arith::dyadic::{Dir, Dyadic};
use crate::arith::qi::{rational_to_f64, GaussInt};
use crate::arith::{complex_roots, Ball, ComplexBall, GaussianRational, QiPolynomial};
use crate::error::{Error, Result};
use crate::series::GSeries;

/// Radius of convergence of `Phi_u`: the distance from 0 to the nearest
/// critical value of `z = 1 - Q(x)/Q(u)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Radius {
    Infinite,
    Exact(BigRational),
    Approx(Ball),
}

impl Radius {
    /// Certified lower bound as an f64.
    pub fn lower_f64(&self) -> f64 {
        match self {
            Radius::Infinite => f64::INFINITY,
            Radius::Exact(q) => rational_to_f64(q).next_down().max(0.0),
            Radius::Approx(b) => b.abs_lower().to_f64(Dir::Down),
        }
    }

    pub fn approx_f64(&self) -> f64 {
        match self {
            Radius::Infinite => f64::INFINITY,
            Radius::Exact(q) => rational_to_f64(q),
            Radius::Approx(b) => b.to_f64(),
        }
    }

    /// Certified `radius > r`.
    pub fn exceeds(&self, r: f64) -> bool {
        match self {
            Radius::Infinite => true,
            Radius::Exact(q) => BigRational::from_float(r).is_some_and(|x| *q > x),
            Radius::Approx(_) => self.lower_f64() > r,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Infinite => write!(f, "inf"),
            Radius::Exact(q) => write!(f, "{q}"),
            Radius::Approx(b) => write!(f, "{} +/- {:.3e}", b.mid().to_sci_string(20), b.rad_f64()),
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            Radius::Infinite => m.serialize_entry("kind", "infinite")?,
            Radius::Exact(q) => {
                m.serialize_entry("kind", "exact")?;
                m.serialize_entry("value", &q.to_string())?;
            }
            Radius::Approx(b) => {
                m.serialize_entry("kind", "ball")?;
                m.serialize_entry("lower", &self.lower_f64())?;
                m.serialize_entry("mid", &b.mid().to_sci_string(20))?;
                m.serialize_entry("err", &b.rad_f64())?;
            }
        }
        m.end()
    }
}

/// The series `Phi_u` for a root `alpha` of `Q`, with its certified radius.
#[derive(Clone, Debug)]
pub struct RootSeries {
    pub poly: QiPolynomial,
    pub u: GaussianRational,
    pub phi: GSeries,
    pub radius: Radius,
    pub target_root: ComplexBall,
    /// Enclosure of `Phi_u(1)`, which equals the target root.
    pub value: ComplexBall,
}

impl RootSeries {
    pub fn verify_functional_equation(&self) -> bool {
        verify_functional_equation(&self.poly, &self.u, &self.phi)
    }
}

/// Coefficients `phi_1..phi_n` of `Phi_u - u`, from
/// `phi_k = ((-Q(u))^k / k) [t^(k-1)] P(t)^(-k)` with `P(t) = (Q(t+u) - Q(u)) / t`.
///
/// After clearing denominators of `P` by `D`, each `[t^j] P~^(-k)` comes from
/// Miller's power recurrence carried over the Gaussian integers:
/// `h_j = j! p0^(k+j) [t^j] P~^(-k)` satisfies
/// `h_j = sum_(i>=1) (i(1-k) - j) (j-1)!/(j-i)! p_i p0^(i-1) h_(j-i)`.
pub fn lagrange_coefficients(q: &QiPolynomial, u: &GaussianRational, n: usize) -> Result<Vec<GaussianRational>> {
    let shifted = q.taylor_shift(u);
    let d = shifted.degree().unwrap_or(0);
    let p0 = shifted.coeff(1);
    if d == 0 || p0.is_zero() {
        return Err(Error::DegenerateWitness);
    }
    let qu = shifted.coeff(0);
    if qu.is_zero() {
        return Ok(vec![GaussianRational::zero(); n]);
    }
    let p: Vec<GaussianRational> = (1..=d).map(|k| shifted.coeff(k)).collect();
    let den = p.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, &c.denominator_lcm()));
    let dq = BigRational::from_integer(den.clone());
    let pt: Vec<GaussInt> = p.iter().map(|c| GaussInt::from_rational(&c.scale(&dq)).0).collect();
    // weights[i-1] = p_i p0^(i-1) for i >= 1
    let mut weights = Vec::with_capacity(pt.len());
    let mut pow = GaussInt::one();
    for pi in pt.iter().skip(1) {
        weights.push(pi.mul(&pow));
        pow = pow.mul(&pt[0]);
    }
    let p0t = GaussInt::to_rational(&pt[0]);
    // scale_k = (-Q(u) D)^k / p0~^(2k-1)
    let step = &(-&qu.scale(&dq)) / &(&p0t * &p0t);
    let mut scale = &(-&qu.scale(&dq)) / &p0t;
    let mut factorial = BigInt::one();
    let mut out = Vec::with_capacity(n);
    let mut h: Vec<GaussInt> = Vec::with_capacity(n);
    for k in 1..=n {
        factorial *= k;
        h.clear();
        h.push(GaussInt::one());
        for j in 1..k {
            let mut acc = GaussInt::zero();
            // falling = (j-1)! / (j-i)!
            let mut falling = BigInt::one();
            for (idx, w) in weights.iter().enumerate() {
                let i = idx + 1;
                if i > j {
                    break;
                }
                if i > 1 {
                    falling *= j + 1 - i;
                }
                let c = BigInt::from(i as i64 * (1 - k as i64) - j as i64) * &falling;
                acc.add_assign(&w.mul(&h[j - i]).scale_int(&c));
            }
            h.push(acc);
        }
        let top = GaussianRational::from_real(BigRational::from_integer(factorial.clone())).inv().expect("k! > 0");
        out.push(&(&scale * &h[k - 1].to_rational()) * &top);
        scale = &scale * &step;
    }
    Ok(out)
}

/// `Phi_u` as a series of order `n`, without a radius hint.
pub fn phi_series(q: &QiPolynomial, u: &GaussianRational, n: usize) -> Result<GSeries> {
    let mut coeffs = vec![u.clone()];
    coeffs.extend(lagrange_coefficients(q, u, n)?);
    Ok(GSeries::new(coeffs).with_center_label(Some("z".into())))
}

/// Critical points of `Q`, exact where a factor of `Q'` is linear.
enum Critical {
    Exact(GaussianRational),
    Approx(ComplexBall),
}

fn critical_points(q: &QiPolynomial, prec: u32) -> Result<Vec<Critical>> {
    let dq = q.derivative();
    if dq.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (factor, _) in dq.squarefree_factors() {
        match factor.degree() {
            Some(1) => out.push(Critical::Exact(-(&factor.coeff(0) / &factor.coeff(1)))),
            Some(_) => {
                for r in complex_roots(&factor, prec)? {
                    out.push(Critical::Approx(r.ball));
                }
            }
            None => {}
        }
    }
    Ok(out)
}

fn exact_sqrt(q: &BigRational) -> Option<BigRational> {
    let (n, d) = (q.numer(), q.denom());
    if n.is_negative() {
        return None;
    }
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

struct RadiusContext {
    q: QiPolynomial,
    critical: Vec<(Critical, Option<ComplexBall>)>,
    prec: u32,
}

impl RadiusContext {
    fn new(q: &QiPolynomial, prec: u32) -> Result<Self> {
        let critical = critical_points(q, prec)?
            .into_iter()
            .map(|c| {
                let qw = match &c {
                    Critical::Exact(_) => None,
                    Critical::Approx(w) => Some(eval_ball(q, w, prec)),
                };
                (c, qw)
            })
            .collect();
        Ok(RadiusContext { q: q.clone(), critical, prec })
    }

    fn radius(&self, u: &GaussianRational) -> Result<Radius> {
        if self.q.derivative().eval(u).is_zero() {
            return Err(Error::DegenerateWitness);
        }
        let qu = self.q.eval(u);
        if qu.is_zero() || self.critical.is_empty() {
            return Ok(Radius::Infinite);
        }
        let prec = self.prec;
        let qu_inv = qu.inv().unwrap();
        let mut best_exact: Option<BigRational> = None;
        let mut balls: Vec<Ball> = Vec::new();
        for (c, qw) in &self.critical {
            match (c, qw) {
                (Critical::Exact(w), _) => {
                    let v = &GaussianRational::one() - &(&self.q.eval(w) * &qu_inv);
                    let n2 = v.norm();
                    match exact_sqrt(&n2) {
                        Some(r) => {
                            if best_exact.as_ref().is_none_or(|b| r < *b) {
                                best_exact = Some(r);
                            }
                        }
                        None => balls.push(Ball::from_rational(&n2, prec + 16).sqrt().unwrap().with_prec(prec)),
                    }
                }
                (Critical::Approx(_), Some(qw)) => {
                    let v = &ComplexBall::one(prec) - &(qw * &ComplexBall::from_qi(&qu_inv, prec));
                    balls.push(v.abs());
                }
                _ => unreachable!(),
            }
        }
        if let Some(r) = &best_exact {
            let rb = Ball::from_rational(r, prec);
            // exact minimum only when certified below every approximate value
            if balls.iter().all(|b| (b - &rb).is_positive()) {
                return Ok(Radius::Exact(r.clone()));
            }
            balls.push(rb);
        }
        // enclosure of the minimum: [min lower, min upper]
        let lo = balls.iter().map(|b| b.mid().sub(&Dyadic::from_f64(b.rad_f64()))).min_by(|a, b| a.cmp(b)).unwrap();
        let hi = balls.iter().map(|b| b.mid().add(&Dyadic::from_f64(b.rad_f64()))).min_by(|a, b| a.cmp(b)).unwrap();
        let mid = lo.add(&hi).mul_2exp(-1);
        let half = hi.sub(&lo).mul_2exp(-1);
        Ok(Radius::Approx(Ball::new(mid, half.mag_upper(), prec)))
    }
}

fn eval_ball(q: &QiPolynomial, x: &ComplexBall, prec: u32) -> ComplexBall {
    let mut acc = ComplexBall::zero(prec);
    for c in q.coeffs().iter().rev() {
        acc = &(&acc * x) + &ComplexBall::from_qi(c, prec);
    }
    acc
}

/// Exact radius of convergence of `Phi_u`: `min |1 - Q(w)/Q(u)|` over the
/// critical points `w` of `Q`; infinite for linear `Q` or `Q(u) = 0`.
pub fn certified_radius(q: &QiPolynomial, u: &GaussianRational, prec: u32) -> Result<Radius> {
    RadiusContext::new(q, prec)?.radius(u)
}

/// `Q(phi) == (1 - z) Q(u)` through the order of `phi`, exactly.
pub fn verify_functional_equation(q: &QiPolynomial, u: &GaussianRational, phi: &GSeries) -> bool {
    if let Some(verdict) = verify_scaled(q, u, phi) {
        return verdict;
    }
    let n = phi.order();
    let mut acc = GSeries::zero(n);
    for c in q.coeffs().iter().rev() {
        acc = acc.mul(phi);
        let mut coeffs = acc.into_coeffs();
        coeffs[0] += c;
        acc = GSeries::new(coeffs);
    }
    let qu = q.eval(u);
    acc.coeffs().iter().enumerate().all(|(k, c)| match k {
        0 => *c == qu,
        1 => *c == -&qu,
        _ => c.is_zero(),
    })
}

/// Common denominators beyond this many bits go to the rational check.
const SCALED_DENOMINATOR_BITS: u64 = 8192;

/// Truncated Cauchy product of Gaussian integer series.
fn int_series_mul(a: &[GaussInt], b: &[GaussInt]) -> Vec<GaussInt> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| {
            let mut acc = GaussInt::zero();
            for j in 0..=k {
                if !a[j].is_zero() && !b[k - j].is_zero() {
                    acc.add_assign(&a[j].mul(&b[k - j]));
                }
            }
            acc
        })
        .collect()
}

/// The functional equation in the variable `w = z / B`, where `B` clears the
/// geometric part of the denominators of `Phi_u`. With `phi_k B^k = s_k / E`
/// and `C` clearing `Q`, it reads
/// `sum_j C q_j E^(d-j) s^j = C E^d Q(u) (1 - B w)` over the Gaussian integers.
/// `None` when the scaled denominators stay large (never for a true `Phi_u`).
fn verify_scaled(q: &QiPolynomial, u: &GaussianRational, phi: &GSeries) -> Option<bool> {
    let d = q.degree()?;
    let shifted = q.taylor_shift(u);
    let (qu, p0) = (shifted.coeff(0), shifted.coeff(1));
    if d == 0 || qu.is_zero() || p0.is_zero() {
        return None;
    }
    let den = (1..=d).fold(BigInt::one(), |acc, k| num_integer::Integer::lcm(&acc, &shifted.coeff(k).denominator_lcm()));
    let dq = BigRational::from_integer(den);
    let p0t = p0.scale(&dq);
    let rho = &(-&qu.scale(&dq)) / &(&p0t * &p0t);
    let b = GaussianRational::from_real(BigRational::from_integer(rho.denominator_lcm()));
    let mut pow = GaussianRational::one();
    let scaled: Vec<GaussianRational> = phi
        .coeffs()
        .iter()
        .map(|c| {
            let x = c * &pow;
            pow = &pow * &b;
            x
        })
        .collect();
    let e = scaled.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, &c.denominator_lcm()));
    if e.bits() > SCALED_DENOMINATOR_BITS {
        return None;
    }
    let eq = BigRational::from_integer(e.clone());
    let s: Vec<GaussInt> = scaled.iter().map(|c| GaussInt::from_rational(&c.scale(&eq)).0).collect();
    let c = q.coeffs().iter().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, &x.denominator_lcm()));
    let cq = BigRational::from_integer(c.clone());
    let n = s.len();
    let mut e_pow = BigInt::one();
    let mut acc = vec![GaussInt::zero(); n];
    // Horner: acc = acc * s + C q_j E^(d-j)
    for (i, qj) in q.coeffs().iter().rev().enumerate() {
        if i > 0 {
            acc = int_series_mul(&acc, &s);
            e_pow *= &e;
        }
        acc[0].add_assign(&GaussInt::from_rational(&qj.scale(&cq)).0.scale_int(&e_pow));
    }
    // right side: C E^d Q(u) (1 - B w)
    let rhs0 = GaussInt::from_rational(&q.eval(u).scale(&cq).scale(&BigRational::from_integer(e_pow)));
    if !rhs0.1.is_one() {
        return Some(false);
    }
    let rhs1 = rhs0.0.scale_int(&-b.re().to_integer());
    Some(acc.iter().enumerate().all(|(k, x)| match k {
        0 => *x == rhs0.0,
        1 => *x == rhs1,
        _ => x.is_zero(),
    }))
}

/// Nearest dyadic with `k` fractional bits to each coordinate.
fn dyadic_round(x: &Dyadic, k: u32) -> BigRational {
    let scale = BigRational::from_integer(BigInt::one() << k as usize);
    let half = BigRational::new(1.into(), 2.into());
    ((x.to_rational() * &scale) + half).floor() / scale
}

fn candidates(center: (&Dyadic, &Dyadic), bits: std::ops::RangeInclusive<u32>, q: &QiPolynomial) -> Vec<GaussianRational> {
    let dq = q.derivative();
    let mut out: Vec<GaussianRational> = Vec::new();
    for k in bits {
        let d = GaussianRational::new(dyadic_round(center.0, k), dyadic_round(center.1, k));
        let qd = dq.eval(&d);
        let newton = (!qd.is_zero()).then(|| &d - &(&q.eval(&d) / &qd));
        for c in std::iter::once(d).chain(newton) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// Order of the screening series built for each witness candidate.
const PROBE_ORDER: usize = 32;

/// Largest fractional bit count tried by the witness search.
pub const WITNESS_BITS_CAP: u32 = 1024;

/// Knobs for the witness search beyond the basic construction.
pub(crate) struct WitnessSearch<'a> {
    /// Enclosures of every root of `q` other than the target; computed from
    /// `q` when absent.
    pub others: Option<Vec<ComplexBall>>,
    /// Checked on `(u, radius)` before the series is built.
    pub pre: &'a dyn Fn(&GaussianRational, &Radius) -> bool,
    /// Checked on the built series before identification.
    pub post: &'a dyn Fn(&GSeries, &Radius) -> bool,
}

impl Default for WitnessSearch<'_> {
    fn default() -> Self {
        WitnessSearch { others: None, pre: &|_, _| true, post: &|_, _| true }
    }
}

/// Builds `Phi_u` for the simple root of `q` enclosed by `alpha`.
///
/// Witnesses are dyadic roundings of the ball center (with `k` fractional
/// bits) and one exact Newton step from each, examined in batches
/// `k in 1..=4, 5..=8, 9..=16, ...`. Within a batch the admissible witness
/// with the smallest `Q(u)` (in bit size) wins. A witness is admissible when
/// its radius exceeds `r_target` and the enclosure of `Phi_u(1)` meets `alpha`
/// while missing every other root of `q`.
pub fn build_root_series(q: &QiPolynomial, alpha: &ComplexBall, r_target: f64, order: usize, prec: u32) -> Result<RootSeries> {
    build_root_series_with(q, alpha, r_target, order, prec, WitnessSearch::default())
}

pub(crate) fn build_root_series_with(
    q: &QiPolynomial,
    alpha: &ComplexBall,
    r_target: f64,
    order: usize,
    prec: u32,
    search: WitnessSearch<'_>,
) -> Result<RootSeries> {
    if !(r_target >= 1.0) {
        return Err(Error::InvalidArgument(format!("target radius must be at least 1, got {r_target}")));
    }
    let deg = q.degree().unwrap_or(0);
    if deg == 0 {
        return Err(Error::InvalidArgument("constant polynomial has no roots".into()));
    }
    if deg == 1 {
        // any witness works for a linear polynomial; prefer u = 0
        let u = GaussianRational::zero();
        let phi = phi_series(q, &u, order)?.with_radius_hint(Some(f64::INFINITY));
        if (search.pre)(&u, &Radius::Infinite) && (search.post)(&phi, &Radius::Infinite) {
            let value = phi.evaluate_qi(&GaussianRational::one(), prec, None)?;
            if !value.overlaps(alpha) {
                return Err(Error::NoWitnessFound { max_bits: 0 });
            }
            return Ok(RootSeries { poly: q.clone(), u, phi, radius: Radius::Infinite, target_root: alpha.clone(), value });
        }
    }
    let ctx = RadiusContext::new(q, prec)?;
    let others: Vec<ComplexBall> = match search.others {
        Some(o) => o,
        None => complex_roots(q, prec)?.into_iter().map(|r| r.ball).collect(),
    }
    .into_iter()
    .filter(|b| !b.overlaps(alpha))
    .collect();
    let mut lo = 1u32;
    let mut hi = 4u32;
    while lo <= WITNESS_BITS_CAP {
        let mut admissible: Vec<(GaussianRational, Radius)> = candidates((alpha.re_mid(), alpha.im_mid()), lo..=hi, q)
            .into_iter()
            .filter_map(|u| {
                let r = ctx.radius(&u).ok()?;
                (r.exceeds(r_target) && (search.pre)(&u, &r)).then_some((u, r))
            })
            .collect();
        admissible.sort_by_key(|(u, _)| (q.eval(u).height_bits(), u.height_bits()));
        for (u, radius) in admissible {
            // screen with a short series; coefficient heights grow linearly with the order
            let mut orders = vec![order.min(PROBE_ORDER)];
            if order > PROBE_ORDER {
                orders.push(order);
            }
            let mut found = None;
            for n in orders {
                let phi = phi_series(q, &u, n)?.with_radius_hint(Some(radius.lower_f64()));
                if !(search.post)(&phi, &radius) {
                    break;
                }
                let Ok(value) = phi.evaluate_qi(&GaussianRational::one(), prec, None) else { break };
                if !(value.overlaps(alpha) && others.iter().all(|o| !value.overlaps(o))) {
                    break;
                }
                found = Some((phi, value));
            }
            if let Some((phi, value)) = found.filter(|(phi, _)| phi.order() == order) {
                return Ok(RootSeries { poly: q.clone(), u, phi, radius, target_root: alpha.clone(), value });
            }
        }
        lo = hi + 1;
        hi *= 2;
    }
    Err(Error::NoWitnessFound { max_bits: WITNESS_BITS_CAP })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> GaussianRational {
        GaussianRational::ratio(n, d)
    }

    /// Independent oracle: solve `sum_k c_k y^k = -Q(u) z` for `y = Phi_u - u`
    /// coefficient by coefficient, with `c_k = Q^(k)(u) / k!`.
    fn undetermined(poly: &QiPolynomial, u: &GaussianRational, n: usize) -> Vec<GaussianRational> {
        let c = poly.taylor_shift(u);
        let mut y = vec![GaussianRational::zero(); n + 1];
        for m in 1..=n {
            // [z^m] of sum_{k>=2} c_k y^k using y_1..y_{m-1}
            let ys = GSeries::new(y.clone());
            let mut pow = ys.clone();
            let mut rest = GaussianRational::zero();
            for k in 2..=c.degree().unwrap() {
                pow = pow.mul(&ys);
                rest += &(&c.coeff(k) * pow.coeff(m));
            }
            let rhs = if m == 1 { -c.coeff(0) } else { GaussianRational::zero() };
            y[m] = &(&rhs - &rest) / &c.coeff(1);
        }
        y[1..].to_vec()
    }

    #[test]
    fn matches_undetermined_coefficients() {
        let cases = [
            (QiPolynomial::from_ints(&[-2, 0, 1]), q(3, 2)),
            (QiPolynomial::from_ints(&[-1, 1, 0, 0, 0, 1]), q(1, 10)),
            (
                QiPolynomial::new(vec![GaussianRational::from_ratios(1, 3, -2, 1), q(0, 1), GaussianRational::from_ratios(0, 1, 1, 2), q(1, 1)]),
                GaussianRational::from_ratios(1, 2, 1, 3),
            ),
        ];
        for (poly, u) in cases {
            assert_eq!(lagrange_coefficients(&poly, &u, 12).unwrap(), undetermined(&poly, &u, 12));
        }
    }

    #[test]
    fn sqrt_two_at_three_halves() {
        let poly = QiPolynomial::from_ints(&[-2, 0, 1]);
        let c = lagrange_coefficients(&poly, &q(3, 2), 2).unwrap();
        assert_eq!(c, vec![q(-1, 12), q(-1, 432)]);
    }

    #[test]
    fn degenerate_cases() {
        let lin = QiPolynomial::from_ints(&[-1, 2]);
        let c = lagrange_coefficients(&lin, &q(0, 1), 5).unwrap();
        assert_eq!(c[0], q(1, 2));
        assert!(c[1..].iter().all(|x| x.is_zero()));
        let sq = QiPolynomial::from_ints(&[-1, 0, 1]);
        assert!(lagrange_coefficients(&sq, &q(1, 1), 5).unwrap().iter().all(|x| x.is_zero()));
        assert_eq!(lagrange_coefficients(&sq, &q(0, 1), 5), Err(Error::DegenerateWitness));
    }

    #[test]
    fn radii() {
        let poly = QiPolynomial::from_ints(&[-2, 0, 1]);
        assert_eq!(certified_radius(&poly, &q(3, 2), 128).unwrap(), Radius::Exact(BigRational::from_integer(9.into())));
        assert_eq!(certified_radius(&poly, &q(17, 12), 128).unwrap(), Radius::Exact(BigRational::from_integer(289.into())));
        assert_eq!(certified_radius(&poly, &q(7, 5), 128).unwrap(), Radius::Exact(BigRational::from_integer(49.into())));
        assert_eq!(certified_radius(&QiPolynomial::from_ints(&[-1, 2]), &q(5, 1), 128).unwrap(), Radius::Infinite);
    }

    #[test]
    fn witness_selection() {
        let poly = QiPolynomial::from_ints(&[-2, 0, 1]);
        let roots = complex_roots(&poly, 256).unwrap();
        let alpha = &roots[0].ball;
        let a = build_root_series(&poly, alpha, 8.0, 24, 256).unwrap();
        assert_eq!(a.u, q(3, 2));
        let b = build_root_series(&poly, alpha, 20.0, 24, 256).unwrap();
        assert_eq!(b.u, q(17, 12));
        assert_eq!(b.radius, Radius::Exact(BigRational::from_integer(289.into())));
        assert!(b.value.rad_f64() < 1e-30);
        assert!(b.verify_functional_equation());
        let lin = QiPolynomial::from_ints(&[-1, 2]);
        let r = build_root_series(&lin, &ComplexBall::from_qi(&q(1, 2), 128), 5.0, 6, 128).unwrap();
        assert_eq!(r.u, q(0, 1));
        assert_eq!(r.phi.coeff(1), &q(1, 2));
        assert!(r.value.contains_qi(&q(1, 2)));
        assert!(r.verify_functional_equation());
    }

    #[test]
    fn perturbed_phi_fails() {
        let poly = QiPolynomial::from_ints(&[-2, 0, 1]);
        let u = q(3, 2);
        let phi = phi_series(&poly, &u, 16).unwrap();
        assert!(verify_functional_equation(&poly, &u, &phi));
        let mut c = phi.into_coeffs();
        c[5] += &q(1, 1_000_000);
        assert!(!verify_functional_equation(&poly, &u, &GSeries::new(c)));
        let root = q(1, 1);
        let sq = QiPolynomial::from_ints(&[-1, 0, 1]);
        assert!(verify_functional_equation(&sq, &root, &phi_series(&sq, &root, 8).unwrap()));
    }

    #[test]
    fn radius_estimate_agrees() {
        let poly = QiPolynomial::from_ints(&[-2, 0, 1]);
        let phi = phi_series(&poly, &q(3, 2), 256).unwrap();
        let est = phi.radius_estimate().unwrap();
        assert!((est / 9.0 - 1.0).abs() < 0.1, "{est}");
        // |phi_n| 9^n grows at most polynomially
        let logs: Vec<f64> = (1..=256).map(|k| phi.coeff(k).ln_abs() + k as f64 * 9f64.ln()).collect();
        assert!(logs[255] - logs[127] < 10.0);
    }
}
