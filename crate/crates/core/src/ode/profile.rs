//! Leading terms of log-monomial sums and numeric singular profiles.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{BallJson, ComplexBall, GaussianRational};
use crate::error::{Error, Result};
use crate::series::GSeries;

/// `log(zeta - z)^s (zeta - z)^t F(zeta - z)`.
#[derive(Clone, Debug)]
pub struct LogMonomial {
    pub s: u32,
    pub t: BigRational,
    pub f: GSeries,
}

#[derive(Clone, Debug, Default)]
pub struct LogMonomialSum {
    terms: Vec<LogMonomial>,
}

impl LogMonomialSum {
    /// Terms sharing an `(s, t)` pair are merged by adding their series.
    pub fn new(terms: Vec<LogMonomial>) -> Result<Self> {
        let mut merged: Vec<LogMonomial> = Vec::new();
        for m in terms {
            match merged.iter_mut().find(|x| x.s == m.s && x.t == m.t) {
                Some(x) => x.f = x.f.add(&m.f),
                None => merged.push(m),
            }
        }
        Ok(LogMonomialSum { terms: merged })
    }

    pub fn terms(&self) -> &[LogMonomial] {
        &self.terms
    }
}

/// `c log(zeta - z)^sigma (zeta - z)^tau (1 + o(1))`, or an identically zero sum.
#[derive(Clone, Debug, PartialEq)]
pub enum LeadingTerm {
    Zero,
    Term { c: GaussianRational, sigma: u32, tau: BigRational },
}

fn is_exact(f: &GSeries) -> bool {
    f.radius_hint().is_some_and(f64::is_infinite)
}

/// Coefficient of `(zeta - z)^(theta - t)` in `F`, `None` if past a truncation.
fn coefficient_at(term: &LogMonomial, theta: &BigRational) -> Option<GaussianRational> {
    let shift = theta - &term.t;
    if !shift.is_integer() || shift.is_negative_value() {
        return Some(GaussianRational::zero());
    }
    let n = shift.to_integer().to_usize()?;
    if n <= term.f.order() {
        Some(term.f.coeff(n).clone())
    } else if is_exact(&term.f) {
        Some(GaussianRational::zero())
    } else {
        None
    }
}

trait NegativeCheck {
    fn is_negative_value(&self) -> bool;
}

impl NegativeCheck for BigRational {
    fn is_negative_value(&self) -> bool {
        self < &BigRational::zero()
    }
}

/// The smallest `theta` with some `c_(s,theta) != 0`, the largest such `s`,
/// and that coefficient, where `c_(s,theta) = sum_t a_(s,t,theta-t)`.
pub fn leading_term(sum: &LogMonomialSum) -> Result<LeadingTerm> {
    let thetas: BTreeSet<BigRational> = sum
        .terms
        .iter()
        .flat_map(|m| (0..=m.f.order()).map(move |n| &m.t + BigRational::from_integer(BigInt::from(n))))
        .collect();
    let s_values: BTreeSet<u32> = sum.terms.iter().map(|m| m.s).collect();
    for theta in &thetas {
        let mut best: Option<(u32, GaussianRational)> = None;
        for &s in s_values.iter().rev() {
            let mut acc = GaussianRational::zero();
            for m in sum.terms.iter().filter(|m| m.s == s) {
                match coefficient_at(m, theta) {
                    Some(a) => acc += &a,
                    None => return Err(Error::TruncationInconclusive),
                }
            }
            if !acc.is_zero() {
                best = Some((s, acc));
                break;
            }
        }
        if let Some((sigma, c)) = best {
            return Ok(LeadingTerm::Term { c, sigma, tau: theta.clone() });
        }
    }
    if sum.terms.iter().all(|m| is_exact(&m.f)) {
        Ok(LeadingTerm::Zero)
    } else {
        Err(Error::TruncationInconclusive)
    }
}

/// Numeric fit of `f(z) ~ c log(zeta - z)^sigma (zeta - z)^tau`.
#[derive(Clone, Debug)]
pub struct SingularFit {
    pub c: ComplexBall,
    pub sigma: u32,
    /// Snapped exponent, if a rational with denominator at most 16 lies
    /// within the fit tolerance.
    pub tau: Option<BigRational>,
    pub tau_raw: f64,
    /// Spread of the last slope estimates for the chosen `sigma`.
    pub spread: f64,
}

impl Serialize for SingularFit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SingularFit", 5)?;
        st.serialize_field("c", &BallJson::from(&self.c))?;
        st.serialize_field("sigma", &self.sigma)?;
        st.serialize_field("tau", &self.tau.as_ref().map(|t| t.to_string()))?;
        st.serialize_field("tau_raw", &self.tau_raw)?;
        st.serialize_field("spread", &self.spread)?;
        st.end()
    }
}

const MAX_SIGMA: u32 = 3;
const TAU_DENOMINATOR_CAP: i64 = 16;
const SNAP_TOLERANCE: f64 = 0.02;
const MIN_SAMPLES: usize = 8;

fn slopes(u: &[Complex64], f: &[Complex64], sigma: u32) -> Vec<f64> {
    let g: Vec<Complex64> = f.iter().zip(u).map(|(fk, uk)| fk / uk.ln().powu(sigma)).collect();
    (1..g.len()).map(|k| (g[k] / g[k - 1]).norm().ln() / (u[k].norm() / u[k - 1].norm()).ln()).collect()
}

fn spread_of(t: &[f64]) -> f64 {
    let n = t.len();
    (t[n - 1] - t[n - 2]).abs() + (t[n - 2] - t[n - 3]).abs()
}

fn snap(x: f64, tol: f64) -> Option<BigRational> {
    (1..=TAU_DENOMINATOR_CAP).find_map(|d| {
        let k = (x * d as f64).round();
        ((x - k / d as f64).abs() <= tol).then(|| BigRational::new(BigInt::from(k as i64), BigInt::from(d)))
    })
}

/// Fits the leading singular behaviour at `zeta` from samples `(z_k, f(z_k))`
/// approaching it geometrically along a ray.
pub fn singular_profile(samples: &[(GaussianRational, ComplexBall)], zeta: &GaussianRational) -> Result<SingularFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_SAMPLES} samples, got {}", samples.len())));
    }
    let (zr, zi) = zeta.to_f64_pair();
    let zeta64 = Complex64::new(zr, zi);
    let u: Vec<Complex64> = samples
        .iter()
        .map(|(z, _)| {
            let (x, y) = z.to_f64_pair();
            zeta64 - Complex64::new(x, y)
        })
        .collect();
    let f: Vec<Complex64> = samples.iter().map(|(_, v)| v.to_complex64()).collect();
    if u.iter().any(|x| x.norm() == 0.0) || f.iter().any(|x| !x.is_finite() || x.norm() == 0.0) {
        return Err(Error::FitDiverged);
    }
    let mut best: Option<(u32, Vec<f64>, f64)> = None;
    for sigma in 0..=MAX_SIGMA {
        let t = slopes(&u, &f, sigma);
        if t.iter().any(|x| !x.is_finite()) {
            continue;
        }
        let s = spread_of(&t);
        if best.as_ref().is_none_or(|b| s < b.2 * (1.0 - 1e-9) && b.2 - s > 1e-13) {
            best = Some((sigma, t, s));
        }
    }
    let (sigma, t, spread) = best.ok_or(Error::FitDiverged)?;
    let early = (t[1] - t[0]).abs() + (t[2] - t[1]).abs();
    if spread > SNAP_TOLERANCE && spread > early {
        return Err(Error::FitDiverged);
    }
    let tau_raw = t[t.len() - 1];
    let tol = (10.0 * spread).clamp(1e-9, SNAP_TOLERANCE);
    let tau = snap(tau_raw, tol);
    let tau_used = tau.as_ref().and_then(|r| r.to_f64()).unwrap_or(tau_raw);
    let cs: Vec<Complex64> =
        f.iter().zip(&u).map(|(fk, uk)| fk / (uk.ln().powu(sigma) * uk.powf(tau_used))).collect();
    let k = cs.len();
    let c = cs[k - 1];
    let err = 2.0 * (cs[k - 1] - cs[k - 2]).norm() + samples[k - 1].1.rad_f64() * (c / f[k - 1]).norm();
    Ok(SingularFit { c: ComplexBall::from_complex64(c, err.max(c.norm() * 1e-15), 64), sigma, tau, tau_raw, spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{sample_toward, FuchsianODE};
    use crate::arith::{Ball, QiPolynomial};

    fn term(s: u32, t: BigRational, coeffs: &[i64], exact: bool) -> LogMonomial {
        let f = GSeries::new(coeffs.iter().map(|&c| GaussianRational::from_int(c)).collect());
        LogMonomial { s, t, f: if exact { f.with_radius_hint(Some(f64::INFINITY)) } else { f.with_radius_hint(Some(1.0)) } }
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn selection_rule() {
        let one = LogMonomialSum::new(vec![term(0, r(0, 1), &[1, 0, 0], false)]).unwrap();
        assert_eq!(leading_term(&one).unwrap(), LeadingTerm::Term { c: GaussianRational::one(), sigma: 0, tau: r(0, 1) });
        // theta = 1/2 beats theta = 1
        let mixed = LogMonomialSum::new(vec![term(1, r(0, 1), &[0, 1, 3], false), term(0, r(1, 2), &[2, 1], false)]).unwrap();
        assert_eq!(leading_term(&mixed).unwrap(), LeadingTerm::Term { c: GaussianRational::from_int(2), sigma: 0, tau: r(1, 2) });
        // at equal theta the larger log power wins
        let logs = LogMonomialSum::new(vec![term(0, r(0, 1), &[5, 1], false), term(2, r(0, 1), &[-3, 1], false)]).unwrap();
        assert_eq!(leading_term(&logs).unwrap(), LeadingTerm::Term { c: GaussianRational::from_int(-3), sigma: 2, tau: r(0, 1) });
    }

    #[test]
    fn cancellation_moves_to_next_exponent() {
        let sum = LogMonomialSum::new(vec![term(0, r(0, 1), &[1, -1, 0], false), term(0, r(0, 1), &[-1, 2, 0], false)]).unwrap();
        assert_eq!(sum.terms().len(), 1);
        assert_eq!(leading_term(&sum).unwrap(), LeadingTerm::Term { c: GaussianRational::one(), sigma: 0, tau: r(1, 1) });
        // shifted exponents combine across terms: w^0 (1 - w) + w^1 (-1 + 2w) = 1 - 2w + 2w^2
        let split = LogMonomialSum::new(vec![term(0, r(0, 1), &[0, -1, 0], false), term(0, r(1, 1), &[1, 2], false)]).unwrap();
        assert_eq!(leading_term(&split).unwrap(), LeadingTerm::Term { c: GaussianRational::from_int(2), sigma: 0, tau: r(2, 1) });
    }

    #[test]
    fn zero_and_inconclusive() {
        let exact = LogMonomialSum::new(vec![term(0, r(0, 1), &[0, 0], true)]).unwrap();
        assert_eq!(leading_term(&exact).unwrap(), LeadingTerm::Zero);
        let short = LogMonomialSum::new(vec![term(0, r(0, 1), &[0, 0], false)]).unwrap();
        assert_eq!(leading_term(&short), Err(Error::TruncationInconclusive));
        assert_eq!(leading_term(&LogMonomialSum::default()).unwrap(), LeadingTerm::Zero);
    }

    fn exact_samples(f: impl Fn(Complex64) -> Complex64) -> Vec<(GaussianRational, ComplexBall)> {
        (1..=16)
            .map(|k| {
                let z = GaussianRational::one() - GaussianRational::from_real(r(1, 1 << k));
                let (x, _) = z.to_f64_pair();
                (z, ComplexBall::from_complex64(f(Complex64::new(x, 0.0)), 0.0, 64))
            })
            .collect()
    }

    #[test]
    fn inverse_square_root_profile() {
        let s = exact_samples(|z| (1.0 - z).powf(-0.5));
        let fit = singular_profile(&s, &GaussianRational::one()).unwrap();
        assert_eq!((fit.sigma, fit.tau.clone()), (0, Some(r(-1, 2))));
        assert!(fit.c.contains_f64(1.0, 0.0));
    }

    #[test]
    fn log_profile() {
        let s = exact_samples(|z| -(1.0 - z).ln());
        let fit = singular_profile(&s, &GaussianRational::one()).unwrap();
        assert_eq!((fit.sigma, fit.tau.clone()), (1, Some(r(0, 1))));
        assert!(fit.c.contains_f64(-1.0, 0.0));
    }

    #[test]
    fn dilogarithm_limit_from_continuation() {
        // z(1 - z) y''' + (2 - 3z) y'' - y' = 0, from Li2 data at 1/2
        let ode = FuchsianODE::from_polynomials(&[
            QiPolynomial::zero(),
            QiPolynomial::from_ints(&[-1]),
            QiPolynomial::from_ints(&[2, -3]),
            QiPolynomial::from_ints(&[0, 1, -1]),
        ])
        .unwrap();
        let p = 128;
        let ln2 = Ball::ln2(p);
        let pi = Ball::pi(p);
        let li2_half = &(&pi.sqr() * &Ball::from_rational(&r(1, 12), p)) - &ln2.sqr().mul_2exp(-1);
        let init = vec![
            ComplexBall::from_real(&li2_half),
            ComplexBall::from_real(&ln2.mul_2exp(1)),
            ComplexBall::from_real(&(&Ball::from_int(4, p) - &ln2.mul_2exp(2))),
        ];
        let half = GaussianRational::ratio(1, 2);
        let samples = sample_toward(&ode, &init, &half, &GaussianRational::one(), 16, 48, 0.5).unwrap();
        let fit = singular_profile(&samples, &GaussianRational::one()).unwrap();
        assert_eq!((fit.sigma, fit.tau.clone()), (0, Some(r(0, 1))));
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((fit.c.to_complex64().re - zeta2).abs() < 1e-3);
        assert!(fit.c.contains_f64(zeta2, 0.0));
    }
}
