//! Truncated power series over Q(i).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith::dyadic::{Dir, Mag};
use crate::arith::qi::GaussInt;
use crate::arith::{ComplexBall, GaussianRational, QiPolynomial};
use crate::error::{Error, Result};

/// `coeffs = s / E` with Gaussian integers `s`, when `E` is not much larger
/// than the largest single denominator. Products of such numerators need no gcd.
fn common_denominator(coeffs: &[GaussianRational]) -> Option<(Vec<GaussInt>, num_bigint::BigInt)> {
    let mut e = num_bigint::BigInt::from(1);
    let mut widest = 0;
    for c in coeffs {
        let d = c.denominator_lcm();
        widest = widest.max(d.bits());
        e = num_integer::Integer::lcm(&e, &d);
        if e.bits() > 4 * widest + 1024 {
            return None;
        }
    }
    let eq = num_rational::BigRational::from_integer(e.clone());
    Some((coeffs.iter().map(|c| GaussInt::from_rational(&c.scale(&eq)).0).collect(), e))
}

/// A power series `sum a_n z^n` known exactly up to `z^order`.
///
/// `radius_hint` is a claimed lower bound on the radius of convergence. An
/// infinite hint means the series is a polynomial: every coefficient past the
/// truncation is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct GSeries {
    coeffs: Vec<GaussianRational>,
    radius_hint: Option<f64>,
    center_label: Option<String>,
}

impl GSeries {
    /// Panics on an empty coefficient list (order would be negative).
    pub fn new(coeffs: Vec<GaussianRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant coefficient");
        GSeries { coeffs, radius_hint: None, center_label: None }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> GaussianRational) -> Self {
        GSeries::new((0..=order).map(f).collect())
    }

    pub fn zero(order: usize) -> Self {
        GSeries::from_fn(order, |_| GaussianRational::zero()).with_radius_hint(Some(f64::INFINITY))
    }

    pub fn one(order: usize) -> Self {
        GSeries::constant(GaussianRational::one(), order)
    }

    pub fn constant(c: GaussianRational, order: usize) -> Self {
        let mut coeffs = vec![GaussianRational::zero(); order + 1];
        coeffs[0] = c;
        GSeries::new(coeffs).with_radius_hint(Some(f64::INFINITY))
    }

    /// The polynomial `p` as a series of the given order.
    pub fn from_poly(p: &QiPolynomial, order: usize) -> Self {
        let exact = p.degree().unwrap_or(0) <= order;
        GSeries::from_fn(order, |k| p.coeff(k)).with_radius_hint(exact.then_some(f64::INFINITY))
    }

    /// `sum z^n`.
    pub fn geometric(order: usize) -> Self {
        GSeries::from_fn(order, |_| GaussianRational::one()).with_radius_hint(Some(1.0))
    }

    pub fn with_radius_hint(mut self, hint: Option<f64>) -> Self {
        self.radius_hint = hint;
        self
    }

    pub fn with_center_label(mut self, label: Option<String>) -> Self {
        self.center_label = label;
        self
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<GaussianRational> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &GaussianRational {
        &self.coeffs[n]
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn radius_hint(&self) -> Option<f64> {
        self.radius_hint
    }

    pub fn center_label(&self) -> Option<&str> {
        self.center_label.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Keeps the first `order + 1` coefficients.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        GSeries { coeffs: self.coeffs[..=order].to_vec(), ..self.clone() }
    }

    fn min_hint(a: Option<f64>, b: Option<f64>) -> Option<f64> {
        Some(a?.min(b?))
    }

    pub fn add(&self, g: &GSeries) -> GSeries {
        let n = self.order().min(g.order());
        GSeries::from_fn(n, |k| &self.coeffs[k] + &g.coeffs[k]).with_radius_hint(Self::min_hint(self.radius_hint, g.radius_hint))
    }

    pub fn sub(&self, g: &GSeries) -> GSeries {
        let n = self.order().min(g.order());
        GSeries::from_fn(n, |k| &self.coeffs[k] - &g.coeffs[k]).with_radius_hint(Self::min_hint(self.radius_hint, g.radius_hint))
    }

    pub fn neg(&self) -> GSeries {
        GSeries { coeffs: self.coeffs.iter().map(|c| -c).collect(), ..self.clone() }
    }

    pub fn scale(&self, k: &GaussianRational) -> GSeries {
        GSeries { coeffs: self.coeffs.iter().map(|c| c * k).collect(), ..self.clone() }
    }

    /// Cauchy product, truncated to the smaller order.
    pub fn mul(&self, g: &GSeries) -> GSeries {
        let n = self.order().min(g.order());
        let hint = Self::min_hint(self.radius_hint, g.radius_hint);
        if let (Some((sa, ea)), Some((sb, eb))) = (common_denominator(&self.coeffs[..=n]), common_denominator(&g.coeffs[..=n])) {
            let den = num_rational::BigRational::from_integer(ea * eb);
            let coeffs = (0..=n)
                .map(|k| {
                    let mut acc = GaussInt::zero();
                    for j in 0..=k {
                        if !sa[j].is_zero() && !sb[k - j].is_zero() {
                            acc.add_assign(&sa[j].mul(&sb[k - j]));
                        }
                    }
                    GaussianRational::new(num_rational::BigRational::from_integer(acc.re) / &den, num_rational::BigRational::from_integer(acc.im) / &den)
                })
                .collect();
            return GSeries::new(coeffs).with_radius_hint(hint);
        }
        let a = &self.coeffs;
        let b = &g.coeffs;
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = GaussianRational::zero();
                for j in 0..=k {
                    if !a[j].is_zero() && !b[k - j].is_zero() {
                        acc += &(&a[j] * &b[k - j]);
                    }
                }
                acc
            })
            .collect();
        GSeries::new(coeffs).with_radius_hint(hint)
    }

    /// Coefficientwise product.
    pub fn hadamard(&self, g: &GSeries) -> GSeries {
        let n = self.order().min(g.order());
        let hint = match (self.radius_hint, g.radius_hint) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        GSeries::from_fn(n, |k| &self.coeffs[k] * &g.coeffs[k]).with_radius_hint(hint)
    }

    /// Termwise derivative; the order drops by one (stays 0 for constants).
    pub fn differentiate(&self) -> GSeries {
        if self.order() == 0 {
            return GSeries { coeffs: vec![GaussianRational::zero()], ..self.clone() };
        }
        let coeffs = (1..=self.order()).map(|k| self.coeffs[k].scale(&crate::arith::qi::rat(k as i64, 1))).collect();
        GSeries { coeffs, ..self.clone() }
    }

    /// Antiderivative with zero constant term; the order rises by one.
    pub fn antiderivative(&self) -> GSeries {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(GaussianRational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.scale(&crate::arith::qi::rat(1, k as i64 + 1)));
        }
        GSeries { coeffs, ..self.clone() }
    }

    /// `self / g`; requires `g(0) != 0`.
    pub fn divide(&self, g: &GSeries) -> Result<GSeries> {
        let g0inv = g.coeffs[0].inv().ok_or(Error::DivisionByNonUnit)?;
        let n = self.order().min(g.order());
        let mut q: Vec<GaussianRational> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                if !g.coeffs[j].is_zero() && !q[k - j].is_zero() {
                    acc -= &(&g.coeffs[j] * &q[k - j]);
                }
            }
            q.push(&acc * &g0inv);
        }
        // zeros of g bound the quotient's radius and are not tracked
        Ok(GSeries::new(q))
    }

    pub fn reciprocal(&self) -> Result<GSeries> {
        GSeries::one(self.order()).divide(self)
    }

    /// Substitution `w = (zeta - z0) z`: for `self` representing
    /// `g(z) = h(zeta - z)` in the variable `w`, the result evaluated at
    /// `z = 1` gives `g(z0)`.
    pub fn affine_compose(&self, zeta: &GaussianRational, z0: &GaussianRational) -> GSeries {
        let s = zeta - z0;
        if s.is_zero() {
            return GSeries::constant(self.coeffs[0].clone(), self.order());
        }
        let mut p = GaussianRational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * &p;
                p = &p * &s;
                out
            })
            .collect();
        let (re, im) = s.to_f64_pair();
        let scale = re.hypot(im);
        let hint = self.radius_hint.map(|r| if r.is_infinite() { r } else { r / scale });
        GSeries::new(coeffs).with_radius_hint(hint)
    }

    pub fn conj(&self) -> GSeries {
        GSeries { coeffs: self.coeffs.iter().map(|c| c.conj()).collect(), ..self.clone() }
    }

    /// Partial sum `sum_{n <= order} a_n z^n` as a ball, without any tail.
    pub fn partial_sum(&self, z: &ComplexBall) -> ComplexBall {
        let prec = z.prec();
        let mut acc = ComplexBall::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + &ComplexBall::from_qi(c, prec);
        }
        acc
    }

    /// Value at `z` enclosing the full infinite sum.
    ///
    /// The tail past the truncation is bounded geometrically: with ratio `q`,
    /// it is at most `max_k |a_{N-k} z^{N-k}| q^k * q / (1 - q)` over the last
    /// four stored terms. When `tail_ratio` is absent, `q = sqrt(|z| / radius_hint)`.
    pub fn evaluate(&self, z: &ComplexBall, tail_ratio: Option<f64>) -> Result<ComplexBall> {
        let sum = self.partial_sum(z);
        let q = match (tail_ratio, self.radius_hint) {
            (Some(q), _) => {
                if !(0.0..1.0).contains(&q) {
                    return Err(Error::InvalidArgument(format!("tail ratio {q} outside [0, 1)")));
                }
                q
            }
            (None, Some(r)) if r.is_infinite() => return Ok(sum),
            (None, Some(r)) => {
                let za = z.abs_upper().to_f64_up();
                if za >= r {
                    return Err(Error::TailUnbounded);
                }
                (za / r).sqrt().next_up()
            }
            (None, None) => return Err(Error::TailUnbounded),
        };
        Ok(sum.add_error(self.tail_bound(z, q)))
    }

    pub fn evaluate_qi(&self, z: &GaussianRational, prec: u32, tail_ratio: Option<f64>) -> Result<ComplexBall> {
        self.evaluate(&ComplexBall::from_qi(z, prec + 8), tail_ratio).map(|b| b.with_prec(prec))
    }

    fn tail_bound(&self, z: &ComplexBall, q: f64) -> Mag {
        if q == 0.0 {
            return Mag::ZERO;
        }
        let n = self.order();
        let za = z.abs_upper();
        let qm = Mag::from_f64(q);
        let mut worst = Mag::ZERO;
        let mut qk = Mag::from_f64(1.0);
        for k in 0..=n.min(3) {
            let idx = n - k;
            let a = ComplexBall::from_qi(&self.coeffs[idx], 64).abs_upper();
            let mut zp = Mag::from_f64(1.0);
            let mut base = za;
            let mut e = idx;
            while e > 0 {
                if e & 1 == 1 {
                    zp = zp.mul(base, Dir::Up);
                }
                base = base.mul(base, Dir::Up);
                e >>= 1;
            }
            worst = worst.max(a.mul(zp, Dir::Up).mul(qk, Dir::Up));
            qk = qk.mul(qm, Dir::Up);
        }
        let factor = Mag::from_f64(q).div(Mag::from_f64(1.0 - q).mul(Mag::from_f64(1.0 - 1e-15), Dir::Down), Dir::Up);
        worst.mul(factor, Dir::Up)
    }

    /// Empirical radius of convergence: `exp(-slope)` of a least-squares fit
    /// of `log|a_n|` against `n` over the nonzero top half of the coefficients.
    /// Heuristic; needs `order >= 32`.
    pub fn radius_estimate(&self) -> Result<f64> {
        let n = self.order();
        if n < 32 {
            return Err(Error::InvalidArgument(format!("radius estimate needs order >= 32, got {n}")));
        }
        let pts: Vec<(f64, f64)> = (n / 2..=n)
            .filter(|&k| !self.coeffs[k].is_zero())
            .map(|k| (k as f64, self.coeffs[k].ln_abs()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::AllZeroTail);
        }
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
        Ok((-sxy / sxx).exp())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re_num,re_den,im_num,im_den\n");
        for (k, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{k},{},{},{},{}", c.re().numer(), c.re().denom(), c.im().numer(), c.im().denom());
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HintRepr {
    Finite(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesRepr {
    order: usize,
    radius_hint: Option<HintRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center_label: Option<String>,
    coeffs: Vec<GaussianRational>,
}

/// JSON: `{"order": N, "radius_hint": float | "inf" | null, "coeffs": [...]}`.
impl Serialize for GSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            order: self.order(),
            radius_hint: self.radius_hint.map(|r| if r.is_infinite() { HintRepr::Text("inf".into()) } else { HintRepr::Finite(r) }),
            center_label: self.center_label.clone(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SeriesRepr::deserialize(d)?;
        if r.coeffs.len() != r.order + 1 {
            return Err(D::Error::custom(format!("order {} but {} coefficients", r.order, r.coeffs.len())));
        }
        let hint = match r.radius_hint {
            None => None,
            Some(HintRepr::Finite(x)) if x > 0.0 => Some(x),
            Some(HintRepr::Text(t)) if t == "inf" => Some(f64::INFINITY),
            Some(_) => return Err(D::Error::custom("radius_hint must be a positive number, \"inf\" or null")),
        };
        Ok(GSeries { coeffs: r.coeffs, radius_hint: hint, center_label: r.center_label })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qi::rat;
    use crate::arith::Ball;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> GaussianRational {
        GaussianRational::ratio(n, d)
    }

    fn series(v: &[i64]) -> GSeries {
        GSeries::new(v.iter().map(|&x| GaussianRational::from_int(x)).collect())
    }

    #[test]
    fn ring_examples() {
        let n = 8;
        let a = series(&[1, 1, 0, 0, 0, 0, 0, 0, 0]);
        let b = series(&[1, -1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(a.mul(&b), series(&[1, 0, -1, 0, 0, 0, 0, 0, 0]));
        let ones = GSeries::geometric(n);
        assert_eq!(ones.mul(&b).coeffs(), GSeries::one(n).coeffs());
        let sq = ones.mul(&ones);
        for k in 0..=n {
            assert_eq!(sq.coeff(k), &GaussianRational::from_int(k as i64 + 1));
        }
    }

    #[test]
    fn order_mismatch_takes_minimum() {
        let a = GSeries::geometric(10);
        let b = GSeries::geometric(4);
        assert_eq!(a.add(&b).order(), 4);
        assert_eq!(a.mul(&b).order(), 4);
        assert_eq!(a.hadamard(&b).order(), 4);
    }

    #[test]
    fn calculus_examples() {
        let n = 12;
        let log = GSeries::geometric(n).antiderivative();
        for k in 1..=n + 1 {
            assert_eq!(log.coeff(k), &q(1, k as i64));
        }
        let alt = GSeries::from_fn(n, |k| if k % 2 == 1 { GaussianRational::zero() } else if k % 4 == 0 { q(1, 1) } else { q(-1, 1) });
        let atan = alt.antiderivative();
        assert_eq!(atan.coeff(3), &q(-1, 3));
        assert_eq!(atan.coeff(5), &q(1, 5));
        assert_eq!(atan.differentiate(), alt);
    }

    #[test]
    fn hadamard_examples() {
        let f = GSeries::from_fn(10, |k| q(k as i64 * 3 - 1, 7));
        assert_eq!(f.hadamard(&GSeries::geometric(10)).coeffs(), f.coeffs());
        assert!(f.hadamard(&GSeries::zero(10)).is_zero());
    }

    #[test]
    fn division() {
        let one = GSeries::one(10);
        let g = series(&[1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(one.divide(&g).unwrap().coeffs(), GSeries::geometric(10).coeffs());
        let h = series(&[1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let alt = one.divide(&h).unwrap();
        assert_eq!(alt.coeff(7), &q(-1, 1));
        assert_eq!(one.divide(&series(&[0, 1])), Err(Error::DivisionByNonUnit));
    }

    #[test]
    fn affine_examples() {
        let h = GSeries::geometric(10);
        let c = h.affine_compose(&q(0, 1), &q(-1, 2));
        assert_eq!(c.coeff(3), &q(1, 8));
        assert_eq!(c.radius_hint(), Some(2.0));
        let d = h.affine_compose(&q(3, 4), &q(3, 4));
        assert!(d.coeffs()[1..].iter().all(|x| x.is_zero()));
        assert_eq!(d.radius_hint(), Some(f64::INFINITY));
    }

    #[test]
    fn geometric_evaluation_contains_limit() {
        let s = GSeries::geometric(60);
        let v = s.evaluate_qi(&q(1, 2), 128, Some(0.5)).unwrap();
        assert!(v.contains_qi(&q(2, 1)));
        assert!(v.rad_f64() < 1e-15);
        let v = s.evaluate_qi(&q(1, 2), 128, None).unwrap();
        assert!(v.contains_qi(&q(2, 1)));
        assert_eq!(GSeries::new(vec![q(1, 1)]).evaluate_qi(&q(1, 2), 64, None), Err(Error::TailUnbounded));
    }

    #[test]
    fn radius_estimates() {
        let s = GSeries::geometric(256);
        let r = s.radius_estimate().unwrap();
        assert!((r - 1.0).abs() < 0.05);
        let s = GSeries::from_fn(256, |k| GaussianRational::from_real(rat(1, 1) / num_rational::BigRational::from_integer(num_bigint::BigInt::from(1) << k)));
        assert!((s.radius_estimate().unwrap() - 2.0).abs() < 0.1);
        let p = GSeries::from_fn(64, |k| if k < 3 { q(1, 1) } else { GaussianRational::zero() });
        assert_eq!(p.radius_estimate(), Err(Error::AllZeroTail));
    }

    #[test]
    fn json_roundtrip_and_csv() {
        let s = GSeries::from_fn(3, |k| GaussianRational::from_ratios(k as i64, 3, -1, k as i64 + 2)).with_radius_hint(Some(2.5));
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.starts_with("{\"order\":3,\"radius_hint\":2.5,"));
        assert_eq!(serde_json::from_str::<GSeries>(&j).unwrap(), s);
        let inf = GSeries::one(2);
        let j = serde_json::to_string(&inf).unwrap();
        assert!(j.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<GSeries>(&j).unwrap(), inf);
        assert!(serde_json::from_str::<GSeries>(r#"{"order":2,"radius_hint":null,"coeffs":[]}"#).is_err());
        let csv = s.to_csv();
        assert_eq!(csv.lines().nth(2).unwrap(), "1,1,3,-1,3");
    }

    #[test]
    fn ramanujan_inverse_pi() {
        use num_bigint::BigInt;
        use num_integer::binomial;
        let terms = GSeries::from_fn(19, |n| {
            let c = binomial(BigInt::from(2 * n), BigInt::from(n));
            let num = &c * &c * &c * BigInt::from(42 * n as i64 + 5);
            let den = BigInt::from(1) << (12 * n + 4);
            GaussianRational::from_real(num_rational::BigRational::new(num, den))
        });
        let v = terms.evaluate_qi(&GaussianRational::one(), 128, Some(1.0 / 32.0)).unwrap();
        let inv_pi = Ball::pi(128).recip().unwrap();
        let diff = (&v.re() - &inv_pi).abs_upper().to_f64_up();
        assert!(diff < 1e-15, "{diff}");
    }

    fn arb_series(n: usize) -> impl Strategy<Value = GSeries> {
        prop::collection::vec((-9i64..10, 1i64..6, -9i64..10, 1i64..6), n + 1)
            .prop_map(|v| GSeries::new(v.into_iter().map(|(a, b, c, d)| GaussianRational::from_ratios(a, b, c, d)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ring_laws(a in arb_series(10), b in arb_series(10), c in arb_series(10)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn leibniz(a in arb_series(10), b in arb_series(10)) {
            let lhs = a.mul(&b).differentiate();
            let rhs = a.differentiate().mul(&b).add(&a.mul(&b.differentiate()));
            prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
        }

        #[test]
        fn divide_roundtrip(a in arb_series(10), b in arb_series(10)) {
            prop_assume!(!b.coeff(0).is_zero());
            let q = a.divide(&b).unwrap();
            let back = q.mul(&b);
            prop_assert_eq!(back.coeffs(), a.coeffs());
        }

        #[test]
        fn conjugation_commutes(a in arb_series(8), b in arb_series(8)) {
            prop_assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
            prop_assert_eq!(a.hadamard(&b).conj(), a.conj().hadamard(&b.conj()));
            prop_assert_eq!(a.differentiate().conj(), a.conj().differentiate());
        }
    }
}
