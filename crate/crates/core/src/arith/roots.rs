//! Certified isolation of the complex roots of a polynomial over Q(i).

use num_complex::Complex64;

use super::ball::ComplexBall;
use super::dyadic::{Dir, Mag};
use super::poly::QiPolynomial;
use crate::error::{Error, Result};

/// One root of a polynomial: an isolating disk and its multiplicity.
#[derive(Clone, Debug)]
pub struct RootBall {
    pub ball: ComplexBall,
    pub multiplicity: u32,
}

/// All distinct roots of `q`, each enclosed in a disk of radius at most
/// `2^(-prec/2)` that contains exactly that root.
///
/// Roots are ordered by `|Im|` ascending, then `Re` descending, so real roots
/// come first, largest first.
pub fn complex_roots(q: &QiPolynomial, prec: u32) -> Result<Vec<RootBall>> {
    let deg = q.degree().ok_or_else(|| Error::InvalidArgument("zero polynomial has no isolated roots".into()))?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (factor, mult) in q.squarefree_factors() {
        for ball in squarefree_roots(&factor, prec)? {
            out.push(RootBall { ball, multiplicity: mult });
        }
    }
    out.sort_by(|a, b| {
        let (za, zb) = (a.ball.to_complex64(), b.ball.to_complex64());
        let ia = (za.im.abs() * 1e12).round();
        let ib = (zb.im.abs() * 1e12).round();
        ia.partial_cmp(&ib)
            .unwrap()
            .then(zb.re.partial_cmp(&za.re).unwrap())
            .then(zb.im.partial_cmp(&za.im).unwrap())
    });
    Ok(out)
}

fn squarefree_roots(f: &QiPolynomial, prec: u32) -> Result<Vec<ComplexBall>> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        let r = -(&f.coeff(0) / &f.coeff(1));
        return Ok(vec![ComplexBall::from_qi(&r, prec)]);
    }
    let target = Mag::pow2(-(prec as i64) / 2);
    // a fixed asymmetric nudge keeps conjugate pairs of a real polynomial
    // from staying locked together when the true roots are real
    let start: Vec<Complex64> = aberth(&f.to_complex64())
        .into_iter()
        .enumerate()
        .map(|(k, z)| z + Complex64::new(0.3 + k as f64, 0.7 + 0.5 * k as f64) * z.norm().max(1.0) * 2f64.powi(-44))
        .collect();
    let mut wp = prec + 32;
    let mut z: Vec<ComplexBall> = start.iter().map(|c| ComplexBall::from_complex64(*c, 0.0, wp)).collect();
    for _attempt in 0..4 {
        z = z.iter().map(|c| c.with_prec(wp).center()).collect();
        weierstrass_refine(f, &mut z, wp);
        if let Some(radii) = certify(f, &z, wp) {
            if radii.iter().all(|r| r.lt(&target) || r.cmp_mag(&target).is_eq()) {
                return Ok(z
                    .iter()
                    .zip(radii)
                    .map(|(c, r)| ComplexBall::new(c.re_mid().clone(), c.im_mid().clone(), r, prec).add_error(r.mul_2exp(-40)))
                    .collect());
            }
        }
        wp *= 2;
    }
    Err(Error::PrecisionExhausted { bits: wp / 2 })
}

/// Simultaneous Aberth iteration in double precision.
fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    // Fujiwara-type bound on the root moduli
    let bound = (0..n)
        .map(|k| monic[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let bound = if bound > 0.0 { bound } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(bound * 0.7, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let dmonic: Vec<Complex64> = (1..=n).map(|k| monic[k] * k as f64).collect();
    let eval = |p: &[Complex64], x: Complex64| p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let p = eval(&monic, z[i]);
            let dp = eval(&dmonic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn eval_ball(f: &QiPolynomial, x: &ComplexBall, prec: u32) -> ComplexBall {
    let mut acc = ComplexBall::zero(prec);
    for c in f.coeffs().iter().rev() {
        acc = &(&acc * x) + &ComplexBall::from_qi(c, prec);
    }
    acc
}

/// Weierstrass corrections `f(z_i) / (lc * prod_{j != i} (z_i - z_j))`.
fn corrections(f: &QiPolynomial, z: &[ComplexBall], prec: u32) -> Option<Vec<ComplexBall>> {
    let lead = ComplexBall::from_qi(f.leading()?, prec);
    (0..z.len())
        .map(|i| {
            let mut den = lead.clone();
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    den = &den * &(&z[i] - zj);
                }
            }
            eval_ball(f, &z[i], prec).div(&den)
        })
        .collect()
}

fn weierstrass_refine(f: &QiPolynomial, z: &mut [ComplexBall], prec: u32) {
    let eps = Mag::pow2(-(prec as i64) + 8);
    for _ in 0..400 {
        let Some(w) = corrections(f, z, prec) else { return };
        let mut done = true;
        for (zi, wi) in z.iter_mut().zip(&w) {
            let step = wi.center();
            if !step.abs_upper().lt(&eps.mul(zi.abs_upper().max(Mag::from_f64(1.0)), Dir::Up)) {
                done = false;
            }
            *zi = (&*zi - &step).center();
        }
        if done {
            return;
        }
    }
}

/// Radii `n |W_i|`; `None` unless the resulting disks are pairwise disjoint,
/// in which case each holds exactly one root.
fn certify(f: &QiPolynomial, z: &[ComplexBall], prec: u32) -> Option<Vec<Mag>> {
    let n = z.len();
    let w = corrections(f, z, prec)?;
    let radii: Vec<Mag> = w.iter().map(|wi| wi.abs_upper().mul(Mag::from_f64(n as f64), Dir::Up)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let a = ComplexBall::new(z[i].re_mid().clone(), z[i].im_mid().clone(), radii[i], prec);
            let b = ComplexBall::new(z[j].re_mid().clone(), z[j].im_mid().clone(), radii[j], prec);
            if a.overlaps(&b) {
                return None;
            }
        }
    }
    Some(radii)
}
