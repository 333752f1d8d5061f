//! Canonical solution bases at ordinary points.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::FuchsianODE;
use crate::arith::{ComplexBall, GaussianRational, Mag};
use crate::error::{Error, Result};
use crate::series::GSeries;

/// Stand-in radius for evaluating series of an equation without finite
/// singularities; steps are kept well inside it.
pub(crate) const ENTIRE_RADIUS: f64 = 4.0;

/// Solutions `g_0..g_(mu-1)` at `center` with `g_j^(k)(center) = delta_jk k!`.
#[derive(Clone, Debug, Serialize)]
pub struct LocalBasis {
    pub center: GaussianRational,
    pub series: Vec<GSeries>,
    /// Certified distance from the center to the nearest singularity.
    pub radius: f64,
}

trait Scalar: Clone {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn mul_int(&self, k: &BigInt) -> Self;
    fn div(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
}

impl Scalar for GaussianRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(k.clone()))
    }
    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|inv| self * &inv)
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for ComplexBall {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        let q = GaussianRational::from_real(BigRational::from_integer(k.clone()));
        self * &ComplexBall::from_qi(&q, self.prec())
    }
    fn div(&self, o: &Self) -> Option<Self> {
        ComplexBall::div(self, o)
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// `a (a+1) ... (a+j-1)`.
fn rising(a: usize, j: usize) -> BigInt {
    (a..a + j).fold(BigInt::from(1), |acc, x| acc * BigInt::from(x))
}

/// Taylor coefficients `y_0..y_n` at the center of the solution with
/// `y_k = delta_{k,index}` for `k < mu`. `shifted[j][k]` is the coefficient of
/// `w^k` in `p_j(center + w)`.
fn run_recurrence<S: Scalar>(shifted: &[Vec<S>], zero: &S, one: &S, index: usize, n: usize) -> Result<Vec<S>> {
    let mu = shifted.len() - 1;
    let lead = shifted[mu].first().cloned().ok_or(Error::SingularCenter)?;
    let mut y: Vec<S> = (0..mu.min(n + 1)).map(|k| if k == index { one.clone() } else { zero.clone() }).collect();
    for m in mu..=n {
        let r = m - mu;
        let mut acc = zero.clone();
        for (j, pj) in shifted.iter().enumerate() {
            for (k, c) in pj.iter().enumerate().take(r + 1) {
                if j == mu && k == 0 {
                    continue;
                }
                let idx = r - k + j;
                acc = acc.add(&c.mul(&y[idx]).mul_int(&rising(r - k + 1, j)));
            }
        }
        let den = lead.mul_int(&rising(r + 1, mu));
        y.push(acc.neg().div(&den).ok_or(Error::SingularCenter)?);
    }
    Ok(y)
}

fn shifted_exact(ode: &FuchsianODE, center: &GaussianRational) -> Vec<Vec<GaussianRational>> {
    ode.cleared().iter().map(|p| p.taylor_shift(center).coeffs().to_vec()).collect()
}

/// Exact canonical basis with `n + 1` coefficients per series.
pub fn local_basis(ode: &FuchsianODE, center: &GaussianRational, n: usize) -> Result<LocalBasis> {
    if !ode.is_ordinary(center) {
        return Err(Error::SingularCenter);
    }
    let radius = ode.singular_distance(center);
    if radius <= 0.0 {
        return Err(Error::SingularCenter);
    }
    let shifted = shifted_exact(ode, center);
    let (zero, one) = (GaussianRational::zero(), GaussianRational::one());
    let hint = radius.is_finite().then_some(radius);
    let series = (0..ode.order())
        .map(|j| {
            let mut c = run_recurrence(&shifted, &zero, &one, j, n)?;
            c.resize(n + 1, GaussianRational::zero());
            Ok(GSeries::new(c).with_radius_hint(hint))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalBasis { center: center.clone(), series, radius })
}

impl LocalBasis {
    pub fn order(&self) -> usize {
        self.series.len()
    }

    /// Termwise residual of the cleared equation, exact; `None` when every
    /// series satisfies it through its truncation order.
    pub fn recurrence_defect(&self, ode: &FuchsianODE) -> Option<(usize, usize)> {
        let shifted = shifted_exact(ode, &self.center);
        let mu = ode.order();
        for (s, g) in self.series.iter().enumerate() {
            let y = g.coeffs();
            let top = y.len().saturating_sub(mu);
            for r in 0..top {
                let mut acc = GaussianRational::zero();
                for (j, pj) in shifted.iter().enumerate() {
                    for (k, c) in pj.iter().enumerate().take(r + 1) {
                        acc = acc.add(&c.mul(&y[r - k + j]).mul_int(&rising(r - k + 1, j)));
                    }
                }
                if !acc.is_zero() {
                    return Some((s, r));
                }
            }
        }
        None
    }

    /// `M[k][j] = g_j^(k)(z)` for `k < mu`, as balls.
    pub fn jet(&self, z: &ComplexBall) -> Result<Vec<Vec<ComplexBall>>> {
        let prec = z.prec();
        let coeffs: Vec<Vec<ComplexBall>> =
            self.series.iter().map(|g| g.coeffs().iter().map(|c| ComplexBall::from_qi(c, prec + 16)).collect()).collect();
        let h = z - &ComplexBall::from_qi(&self.center, prec + 16);
        jet_of(&coeffs, &h, self.radius, self.order())
    }
}

/// Ball version of the canonical basis, used for stepping.
pub(crate) struct NumericBasis {
    pub center: GaussianRational,
    pub coeffs: Vec<Vec<ComplexBall>>,
    pub radius: f64,
}

impl NumericBasis {
    pub fn new(ode: &FuchsianODE, center: &GaussianRational, n: usize, prec: u32) -> Result<Self> {
        if !ode.is_ordinary(center) {
            return Err(Error::SingularCenter);
        }
        let radius = ode.singular_distance(center);
        if radius <= 0.0 {
            return Err(Error::SingularCenter);
        }
        let wp = prec + 16;
        let shifted: Vec<Vec<ComplexBall>> = shifted_exact(ode, center)
            .into_iter()
            .map(|p| p.iter().map(|c| ComplexBall::from_qi(c, wp)).collect())
            .collect();
        let (zero, one) = (ComplexBall::zero(wp), ComplexBall::one(wp));
        let coeffs = (0..ode.order())
            .map(|j| run_recurrence(&shifted, &zero, &one, j, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(NumericBasis { center: center.clone(), coeffs, radius })
    }

    pub fn jet(&self, z: &GaussianRational, prec: u32) -> Result<Vec<Vec<ComplexBall>>> {
        let h = ComplexBall::from_qi(&(z - &self.center), prec + 16);
        jet_of(&self.coeffs, &h, self.radius, self.coeffs.len())
    }
}

/// Radius used for tail bounds at distance `h` from the center.
pub(crate) fn effective_radius(radius: f64, h: f64) -> f64 {
    if radius.is_finite() {
        radius
    } else {
        ENTIRE_RADIUS.max(4.0 * h)
    }
}

/// Derivatives `0..mu` of each ball series at offset `h` from its center,
/// each enclosing the infinite sum under the geometric tail rule with ratio
/// `sqrt(|h| / radius)`.
fn jet_of(coeffs: &[Vec<ComplexBall>], h: &ComplexBall, radius: f64, mu: usize) -> Result<Vec<Vec<ComplexBall>>> {
    let ha = h.abs_upper().to_f64_up();
    let radius = effective_radius(radius, ha);
    if ha >= radius {
        return Err(Error::TailUnbounded);
    }
    let q = (ha / radius).sqrt().next_up();
    let mut out = vec![Vec::with_capacity(coeffs.len()); mu];
    for series in coeffs {
        let mut d: Vec<ComplexBall> = series.clone();
        for row in out.iter_mut() {
            row.push(eval_with_tail(&d, h, q));
            d = d.iter().enumerate().skip(1).map(|(i, c)| c.mul_int(&BigInt::from(i))).collect();
            if d.is_empty() {
                d.push(ComplexBall::zero(h.prec()));
            }
        }
    }
    Ok(out)
}

fn eval_with_tail(c: &[ComplexBall], h: &ComplexBall, q: f64) -> ComplexBall {
    let prec = h.prec();
    let mut acc = ComplexBall::zero(prec);
    for a in c.iter().rev() {
        acc = &(&acc * h) + a;
    }
    if q == 0.0 {
        return acc;
    }
    let n = c.len() - 1;
    let ha = h.abs_upper();
    let mut worst = 0.0f64;
    let mut qk = 1.0f64;
    for k in 0..=n.min(3) {
        let idx = n - k;
        let term = c[idx].abs_upper().to_f64_up() * ha.to_f64_up().powi(idx as i32) * qk;
        worst = worst.max(term);
        qk *= q;
    }
    let bound = worst * q / (1.0 - q) * (1.0 + 1e-12);
    acc.add_error(Mag::from_f64(bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::QiPolynomial;

    fn arctan_ode() -> FuchsianODE {
        FuchsianODE::from_polynomials(&[QiPolynomial::zero(), QiPolynomial::from_ints(&[0, 2]), QiPolynomial::from_ints(&[1, 0, 1])]).unwrap()
    }

    /// Undetermined coefficients for `(1 + z^2) y'' + 2z y' = 0`:
    /// `(n+2)(n+1) y_(n+2) + n(n-1) y_n + 2 n y_n = 0`.
    fn arctan_oracle(y0: i64, y1: i64, n: usize) -> Vec<GaussianRational> {
        let mut y = vec![GaussianRational::from_int(y0), GaussianRational::from_int(y1)];
        for k in 0..n - 1 {
            let f = -((k * (k + 1)) as i64);
            let d = ((k + 2) * (k + 1)) as i64;
            let next = y[k].scale(&BigRational::new(f.into(), d.into()));
            y.push(next);
        }
        y
    }

    #[test]
    fn trivial_first_order() {
        let ode = FuchsianODE::from_polynomials(&[QiPolynomial::zero(), QiPolynomial::from_ints(&[1])]).unwrap();
        let b = local_basis(&ode, &GaussianRational::zero(), 8).unwrap();
        assert_eq!(b.series.len(), 1);
        assert!(b.series[0].coeffs().iter().enumerate().all(|(k, c)| if k == 0 { c.is_one() } else { c.is_zero() }));
        assert!(b.radius.is_infinite());
    }

    #[test]
    fn arctan_basis_matches_oracle() {
        let ode = arctan_ode();
        let b = local_basis(&ode, &GaussianRational::zero(), 40).unwrap();
        assert_eq!(b.series[0].coeffs(), &arctan_oracle(1, 0, 40)[..]);
        assert_eq!(b.series[1].coeffs(), &arctan_oracle(0, 1, 40)[..]);
        assert_eq!(*b.series[1].coeff(5), GaussianRational::ratio(1, 5));
        assert!((b.radius - 1.0).abs() < 1e-12);
        assert!(b.recurrence_defect(&ode).is_none());
    }

    #[test]
    fn inverse_square_root_basis() {
        // 2(1 - z) y' - y = 0
        let ode = FuchsianODE::from_polynomials(&[QiPolynomial::from_ints(&[-1]), QiPolynomial::from_ints(&[2, -2])]).unwrap();
        let b = local_basis(&ode, &GaussianRational::zero(), 30).unwrap();
        let mut binom = BigInt::from(1);
        for n in 0..=30usize {
            if n > 0 {
                binom = binom * BigInt::from(2 * n) * BigInt::from(2 * n - 1) / BigInt::from(n * n);
            }
            let want = BigRational::new(binom.clone(), BigInt::from(4).pow(n as u32));
            assert_eq!(*b.series[0].coeff(n), GaussianRational::from_real(want));
        }
    }

    #[test]
    fn canonical_at_shifted_center_and_jet_identity() {
        let ode = arctan_ode();
        let c = GaussianRational::ratio(1, 2);
        let b = local_basis(&ode, &c, 48).unwrap();
        assert!(b.recurrence_defect(&ode).is_none());
        let m = b.jet(&ComplexBall::from_qi(&c, 128)).unwrap();
        assert!(m[0][0].contains_qi(&GaussianRational::one()) && m[1][1].contains_qi(&GaussianRational::one()));
        assert!(m[0][1].contains_zero() && m[1][0].contains_zero());
        // derivative of the second element at the center of the shifted basis is 1 and
        // the arctan derivative is 1 / (1 + z^2)
        let nb = NumericBasis::new(&ode, &GaussianRational::zero(), 64, 128).unwrap();
        let j = nb.jet(&c, 128).unwrap();
        assert!(j[1][1].contains_qi(&GaussianRational::ratio(4, 5)));
    }

    #[test]
    fn tampered_series_is_detected() {
        let ode = arctan_ode();
        let mut b = local_basis(&ode, &GaussianRational::zero(), 20).unwrap();
        let mut c = b.series[1].coeffs().to_vec();
        c[7] = &c[7] + &GaussianRational::ratio(1, 1000);
        b.series[1] = GSeries::new(c);
        assert!(b.recurrence_defect(&ode).is_some());
    }
}
