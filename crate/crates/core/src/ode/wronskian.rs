//! Wronskians of local bases: exact Abel check and closed-form fit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use super::basis::effective_radius;
use super::{FuchsianODE, LocalBasis};
use crate::arith::{complex_roots, BallJson, ComplexBall, GaussianRational, QiPolynomial};
use crate::error::{Error, Result};
use crate::series::GSeries;

/// Largest denominator accepted for a local exponent.
const EXPONENT_DENOMINATOR_CAP: i64 = 16;

/// `W(z) = nu * exp(-int_c^z P) * prod_j ((z - p_j) / (c - p_j))^(-r_j)`
/// where `a_(mu-1) = P + sum_j r_j / (z - p_j)` and `c` is the basis center.
#[derive(Clone, Debug)]
pub struct WronskianFit {
    pub nu: ComplexBall,
    /// Pole of `a_(mu-1)` with its residue.
    pub exponents: Vec<(ComplexBall, BigRational)>,
    /// Number of leading coefficients of `W' + a_(mu-1) W` checked to vanish.
    pub abel_terms: usize,
    /// `W` evaluated at each test point.
    pub values: Vec<ComplexBall>,
}

impl Serialize for WronskianFit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct Exp {
            pole: BallJson,
            exponent: String,
        }
        let mut st = s.serialize_struct("WronskianFit", 4)?;
        st.serialize_field("nu", &BallJson::from(&self.nu))?;
        st.serialize_field(
            "exponents",
            &self.exponents.iter().map(|(p, r)| Exp { pole: p.into(), exponent: r.to_string() }).collect::<Vec<_>>(),
        )?;
        st.serialize_field("abel_terms", &self.abel_terms)?;
        st.serialize_field("values", &self.values.iter().map(BallJson::from).collect::<Vec<_>>())?;
        st.end()
    }
}

fn series_det(m: &[Vec<GSeries>]) -> GSeries {
    match m.len() {
        1 => m[0][0].clone(),
        n => {
            let mut acc: Option<GSeries> = None;
            for col in 0..n {
                let minor: Vec<Vec<GSeries>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| x.clone()).collect()).collect();
                let term = m[0][col].mul(&series_det(&minor));
                acc = Some(match acc {
                    None => term,
                    Some(a) if col % 2 == 0 => a.add(&term),
                    Some(a) => a.sub(&term),
                });
            }
            acc.unwrap()
        }
    }
}

/// Wronskian `det[g_j^(k)]` of the basis, as a series at its center.
pub fn wronskian_series(basis: &LocalBasis) -> GSeries {
    let mu = basis.order();
    let mut rows: Vec<Vec<GSeries>> = vec![basis.series.clone()];
    for k in 1..mu {
        let next = rows[k - 1].iter().map(GSeries::differentiate).collect();
        rows.push(next);
    }
    series_det(&rows)
}

/// Coefficients `0..=top` of `poly(c + w) * s(w)`.
fn poly_times(poly: &QiPolynomial, s: &[GaussianRational], top: usize) -> Vec<GaussianRational> {
    (0..=top)
        .map(|k| {
            let mut acc = GaussianRational::zero();
            for (j, p) in poly.coeffs().iter().enumerate().take(k + 1) {
                if let Some(c) = s.get(k - j) {
                    acc += &(p * c);
                }
            }
            acc
        })
        .collect()
}

fn snap_exponent(r: &ComplexBall) -> Option<BigRational> {
    let x = r.to_complex64().re;
    (1..=EXPONENT_DENOMINATOR_CAP).find_map(|d| {
        let cand = BigRational::new(BigInt::from((x * d as f64).round() as i64), BigInt::from(d));
        r.contains_qi(&GaussianRational::from_real(cand.clone())).then_some(cand)
    })
}

pub fn wronskian_certify(ode: &FuchsianODE, basis: &LocalBasis, test_points: &[GaussianRational]) -> Result<WronskianFit> {
    let mu = ode.order();
    if basis.order() != mu {
        return Err(Error::InvalidArgument("basis size differs from the equation order".into()));
    }
    if test_points.is_empty() {
        return Err(Error::InvalidArgument("need at least one test point".into()));
    }
    let c = &basis.center;
    let w = wronskian_series(basis);
    let a = &ode.coeffs()[mu - 1];

    // W' + (num / den) W = 0  <=>  den W' + num W = 0, exactly through the truncation
    let top = w.order().saturating_sub(1);
    let dw = w.differentiate();
    let lhs = poly_times(&a.den().taylor_shift(c), dw.coeffs(), top);
    let rhs = poly_times(&a.num().taylor_shift(c), w.coeffs(), top);
    if let Some(index) = lhs.iter().zip(&rhs).position(|(x, y)| !(x + y).is_zero()) {
        return Err(Error::AbelViolation { index });
    }

    let prec = 128u32;
    let (poly_part, rem) = a.num().div_rem(a.den());
    let dden = a.den().derivative();
    let mut exponents = Vec::new();
    if a.den().degree().unwrap_or(0) > 0 && !rem.is_zero() {
        for root in complex_roots(a.den(), prec)? {
            if root.multiplicity > 1 {
                return Err(Error::FitInconsistent("coefficient has a pole of order above one".into()));
            }
            let p = &root.ball;
            let r = eval_ball(&rem, p).div(&eval_ball(&dden, p)).ok_or(Error::NearSingular)?;
            let e = snap_exponent(&r)
                .ok_or_else(|| Error::FitInconsistent(format!("residue {r} is not a rational with small denominator")))?;
            if e.is_positive() || e.is_negative() {
                exponents.push((p.clone(), e));
            }
        }
    }
    let integral = poly_part.antiderivative_poly();
    let closed = |z: &GaussianRational| -> Result<ComplexBall> {
        let shift = &integral.eval(z) - &integral.eval(c);
        let mut v = (-&ComplexBall::from_qi(&shift, prec)).exp();
        for (p, e) in &exponents {
            let ratio = (&ComplexBall::from_qi(z, prec) - p).div(&(&ComplexBall::from_qi(c, prec) - p)).ok_or(Error::NearSingular)?;
            v = &v * &ratio.pow_rational(&-e).ok_or(Error::BranchCut)?;
        }
        Ok(v)
    };

    let mut values = Vec::new();
    let mut nus: Vec<ComplexBall> = Vec::new();
    for t in test_points {
        if !ode.is_ordinary(t) {
            return Err(Error::SingularCenter);
        }
        let h = t - c;
        let ratio = w.radius_hint().is_none().then(|| {
            let (x, y) = h.to_f64_pair();
            let ha = x.hypot(y);
            (ha / effective_radius(basis.radius, ha)).sqrt().next_up()
        });
        let wt = w.evaluate_qi(&h, prec, ratio)?;
        let nu = wt.div(&closed(t)?).ok_or(Error::NearSingular)?;
        values.push(wt);
        nus.push(nu);
    }
    let nu = nus[0].clone();
    if nus.iter().any(|x| !x.overlaps(&nu)) {
        return Err(Error::FitInconsistent(format!(
            "nu estimates disagree: {}",
            nus.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(WronskianFit { nu, exponents, abel_terms: top + 1, values })
}

fn eval_ball(p: &QiPolynomial, x: &ComplexBall) -> ComplexBall {
    let prec = x.prec();
    p.coeffs().iter().rev().fold(ComplexBall::zero(prec), |acc, c| &(&acc * x) + &ComplexBall::from_qi(c, prec))
}

trait Antiderivative {
    fn antiderivative_poly(&self) -> QiPolynomial;
}

impl Antiderivative for QiPolynomial {
    fn antiderivative_poly(&self) -> QiPolynomial {
        let mut c = vec![GaussianRational::zero()];
        for (k, a) in self.coeffs().iter().enumerate() {
            c.push(a.scale(&BigRational::new(1.into(), BigInt::from(k + 1))));
        }
        QiPolynomial::new(c)
    }
}
