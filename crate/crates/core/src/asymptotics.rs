//! Coefficient asymptotics from singular profiles, profile fitting, and
//! amplitude recovery for sums of unimodular exponentials.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::arith::{BallJson, ComplexBall, GaussianRational, Mag};
use crate::error::{Error, Result};
use crate::ode::determinant;

/// One dominant singularity `rho * zeta` on the circle of convergence with
/// its amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub zeta: Complex64,
    pub c: Complex64,
}

/// `a_n ~ (-1)^sigma / Gamma(-tau) * log(n)^sigma / (rho^n n^(tau+1)) * sum_i c_i zeta_i^(-n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularProfile {
    pub rho: f64,
    pub sigma: u32,
    pub tau: f64,
    #[serde(default)]
    pub fronts: Vec<Front>,
}

const UNIMODULAR_TOL: f64 = 1e-9;

impl SingularProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("rho must be positive, got {}", self.rho)));
        }
        for (i, f) in self.fronts.iter().enumerate() {
            if (f.zeta.norm() - 1.0).abs() > UNIMODULAR_TOL {
                return Err(Error::InvalidArgument(format!("front {i} is not on the unit circle")));
            }
            if self.fronts[..i].iter().any(|g| (g.zeta - f.zeta).norm() <= UNIMODULAR_TOL) {
                return Err(Error::InvalidArgument(format!("front {i} repeats an earlier one")));
            }
        }
        Ok(())
    }

    fn gamma_factor(&self) -> Result<f64> {
        let x = -self.tau;
        if x <= 0.0 && (x - x.round()).abs() < 1e-12 {
            return Err(Error::DegenerateGamma { tau: self.tau });
        }
        Ok(gamma(x))
    }

    /// `log2` of the modulus and the sign of the real factor
    /// `(-1)^sigma log(n)^sigma / (Gamma(-tau) rho^n n^(tau+1))`.
    fn scale_log2(&self, n: u64, g: f64) -> (f64, f64) {
        let nf = n as f64;
        let ln = nf.ln();
        let l2 = f64::from(self.sigma) * ln.ln() / LN_2 - nf * self.rho.log2() - (self.tau + 1.0) * nf.log2() - g.abs().log2();
        let sign = if self.sigma % 2 == 1 { -1.0 } else { 1.0 } * g.signum();
        (l2, sign)
    }
}

/// Main term of the transfer for each `n` in `range`, without the `o(1)`.
pub fn predict_coeffs(profile: &SingularProfile, range: std::ops::RangeInclusive<u64>) -> Result<Vec<ComplexBall>> {
    profile.validate()?;
    if *range.start() < 2 {
        return Err(Error::InvalidArgument("predictions start at n = 2".into()));
    }
    let g = profile.gamma_factor()?;
    let fronts: &[Front] =
        if profile.fronts.is_empty() { &[Front { zeta: Complex64::new(1.0, 0.0), c: Complex64::new(1.0, 0.0) }] } else { &profile.fronts };
    Ok(range
        .map(|n| {
            let (l2, sign) = profile.scale_log2(n, g);
            let chi: Complex64 = fronts.iter().map(|f| f.c * f.zeta.powi(-(n as i32))).sum();
            let e = l2.floor();
            let v = chi * (sign * (l2 - e).exp2());
            let rel = 1e-13 + 4e-16 * l2.abs();
            let err = v.norm() * rel + fronts.len() as f64 * 1e-15 * (l2 - e).exp2();
            ComplexBall::from_complex64(v, err, 64).mul_2exp(e as i64)
        })
        .collect())
}

/// Natural log of `|b|` for balls of any magnitude; `None` for zero.
fn ln_abs(b: &ComplexBall) -> Option<(f64, f64)> {
    let e = match (b.re_mid().is_zero(), b.im_mid().is_zero()) {
        (true, true) => return None,
        (false, true) => b.re_mid().top_exp(),
        (true, false) => b.im_mid().top_exp(),
        (false, false) => b.re_mid().top_exp().max(b.im_mid().top_exp()),
    };
    let z = b.center().mul_2exp(-e).to_complex64();
    (z.norm() > 0.0).then(|| (z.norm().ln() + e as f64 * LN_2, z.arg()))
}

/// Options for [`fit_profile`].
#[derive(Clone, Debug, Default)]
pub struct FitOptions {
    /// Unimodular directions of the dominant singularities, if known.
    pub candidates: Option<Vec<Complex64>>,
}

/// Least squares for `y ~ X beta` by normal equations on centered columns.
fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64, f64)> {
    let m = y.len() as f64;
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / m).collect();
    let ymean = y.iter().sum::<f64>() / m;
    let k = cols.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, z)| (x - means[i]) * (z - means[j])).sum();
        }
        a[i][k] = cols[i].iter().zip(y).map(|(x, v)| (x - means[i]) * (v - ymean)).sum();
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        a.swap(col, piv);
        if a[col][col] == 0.0 {
            return None;
        }
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let intercept = ymean - beta.iter().zip(&means).map(|(b, mu)| b * mu).sum::<f64>();
    let rss = y
        .iter()
        .enumerate()
        .map(|(r, v)| {
            let pred = intercept + (0..k).map(|i| beta[i] * cols[i][r]).sum::<f64>();
            (v - pred).powi(2)
        })
        .sum::<f64>();
    Some((beta, intercept, (rss / m).sqrt()))
}

/// Complex least squares `chi_n ~ sum_i c_i w_i^n`.
fn fit_amplitudes(ns: &[u64], chi: &[Complex64], zetas: &[Complex64]) -> Option<Vec<Complex64>> {
    let t = zetas.len();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); t + 1]; t];
    for (&n, &v) in ns.iter().zip(chi) {
        let row: Vec<Complex64> = zetas.iter().map(|z| z.powi(-(n as i32))).collect();
        for i in 0..t {
            for j in 0..t {
                a[i][j] += row[i].conj() * row[j];
            }
            a[i][t] += row[i].conj() * v;
        }
    }
    for col in 0..t {
        let piv = (col..t).max_by(|&r, &s| a[r][col].norm().total_cmp(&a[s][col].norm()))?;
        a.swap(col, piv);
        if a[col][col].norm() == 0.0 {
            return None;
        }
        for r in 0..t {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=t {
                    let d = f * a[col][c];
                    a[r][c] -= d;
                }
            }
        }
    }
    Some((0..t).map(|i| a[i][t] / a[i][i]).collect())
}

const MIN_FIT_COEFFS: usize = 512;
const OSCILLATION_TOL: f64 = 0.05;

/// Fits `rho`, `tau` and `sigma` to the upper half of `coeffs`; fronts are
/// fitted only against the supplied candidate directions.
pub fn fit_profile(coeffs: &[ComplexBall], opts: &FitOptions) -> Result<SingularProfile> {
    let n_total = coeffs.len();
    if n_total < MIN_FIT_COEFFS {
        return Err(Error::InvalidArgument(format!("fitting needs at least {MIN_FIT_COEFFS} coefficients, got {n_total}")));
    }
    let window: Vec<u64> = ((n_total / 2) as u64..n_total as u64).collect();
    let logs: Vec<Option<(f64, f64)>> = window.iter().map(|&n| ln_abs(&coeffs[n as usize])).collect();
    let oscillating = logs.iter().any(Option::is_none) || {
        let l: Vec<(f64, f64)> = logs.iter().map(|x| x.unwrap()).collect();
        let curvature = l.windows(3).map(|w| (w[2].0 - 2.0 * w[1].0 + w[0].0).abs()).fold(0.0, f64::max);
        let steps: Vec<Complex64> = l.windows(2).map(|w| Complex64::from_polar(1.0, w[1].1 - w[0].1)).collect();
        let mean = steps.iter().sum::<Complex64>() / steps.len() as f64;
        let phase_spread = steps.iter().map(|s| (s - mean).norm()).fold(0.0, f64::max);
        curvature > OSCILLATION_TOL || phase_spread > OSCILLATION_TOL
    };
    let candidates = match (&opts.candidates, oscillating) {
        (None, true) => return Err(Error::OscillationUnresolved),
        (c, _) => c.clone(),
    };
    // envelope: log of the root mean square over blocks when oscillating
    let block = if oscillating { 4 * candidates.as_ref().map_or(1, Vec::len).max(2) } else { 1 };
    let mut ns = Vec::new();
    let mut ys = Vec::new();
    for chunk in window.chunks(block) {
        if chunk.len() < block {
            break;
        }
        let mut acc = Vec::new();
        for &n in chunk {
            if let Some((l, _)) = ln_abs(&coeffs[n as usize]) {
                acc.push(l);
            }
        }
        if acc.is_empty() {
            continue;
        }
        let top = acc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let rms = top + 0.5 * (acc.iter().map(|l| (2.0 * (l - top)).exp()).sum::<f64>() / chunk.len() as f64).ln();
        ns.push(chunk.iter().sum::<u64>() as f64 / chunk.len() as f64);
        ys.push(rms);
    }
    let col_n: Vec<f64> = ns.clone();
    let col_ln: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    // absorbs the first-order correction so that rho and tau are not biased by it
    let col_inv: Vec<f64> = ns.iter().map(|n| 1.0 / n).collect();
    let mut best: Option<(u32, Vec<f64>, f64)> = None;
    for sigma in 0..=3u32 {
        let y: Vec<f64> = ys.iter().zip(&ns).map(|(y, n)| y - f64::from(sigma) * n.ln().ln()).collect();
        let Some((beta, _, rms)) = least_squares(&[col_n.clone(), col_ln.clone(), col_inv.clone()], &y) else { continue };
        if best.as_ref().is_none_or(|b| rms * 1.5 < b.2) {
            best = Some((sigma, beta, rms));
        }
    }
    let (sigma, beta, _) = best.ok_or(Error::FitDiverged)?;
    let rho = (-beta[0]).exp();
    let tau = -beta[1] - 1.0;
    let mut profile = SingularProfile { rho, sigma, tau, fronts: Vec::new() };
    if let Some(zetas) = candidates {
        let g = profile.gamma_factor()?;
        let mut chi = Vec::new();
        for &n in &window {
            let (l, phase) = ln_abs(&coeffs[n as usize]).unwrap_or((f64::NEG_INFINITY, 0.0));
            let (l2, sign) = profile.scale_log2(n, g);
            chi.push(Complex64::from_polar((l - l2 * LN_2).exp() * sign, phase));
        }
        let amps = fit_amplitudes(&window, &chi, &zetas).ok_or(Error::NearSingular)?;
        profile.fronts = zetas.into_iter().zip(amps).map(|(zeta, c)| Front { zeta, c }).collect();
    }
    Ok(profile)
}

/// Samples `s_n..s_(n+t-1)` of `sum_j kappa_j omega_j^n` with the `omega_j`.
#[derive(Clone, Debug)]
pub struct AmplitudeSystem {
    pub omegas: Vec<ComplexBall>,
    pub window_start: u32,
    pub samples: Vec<ComplexBall>,
}

#[derive(Clone, Debug)]
pub struct Amplitudes {
    pub kappas: Vec<ComplexBall>,
    /// Vandermonde determinant of the `omega_j` (`det M_0`).
    pub delta0: ComplexBall,
    /// `det M_n` at the window start; same modulus as `delta0`.
    pub delta_n: ComplexBall,
    pub exact: bool,
    /// The solution in Q(i) when every input is an exact point.
    pub exact_kappas: Option<Vec<GaussianRational>>,
}

impl Serialize for Amplitudes {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Amplitudes", 5)?;
        st.serialize_field("kappas", &self.kappas.iter().map(BallJson::from).collect::<Vec<_>>())?;
        st.serialize_field("delta0", &BallJson::from(&self.delta0))?;
        st.serialize_field("delta_n", &BallJson::from(&self.delta_n))?;
        st.serialize_field("exact", &self.exact)?;
        if let Some(k) = &self.exact_kappas {
            st.serialize_field("exact_kappas", k)?;
        }
        st.end()
    }
}

/// `M_n[k][j] = omega_j^(n+k)`.
pub fn window_matrix_exact(omegas: &[GaussianRational], n: u32) -> Vec<Vec<GaussianRational>> {
    (0..omegas.len() as u32).map(|k| omegas.iter().map(|w| w.pow(n + k)).collect()).collect()
}

/// Determinant and solution of `m x = rhs` over Q(i) by elimination.
fn solve_exact(mut m: Vec<Vec<GaussianRational>>, mut rhs: Vec<GaussianRational>) -> (GaussianRational, Option<Vec<GaussianRational>>) {
    let t = m.len();
    let mut det = GaussianRational::one();
    for col in 0..t {
        let Some(piv) = (col..t).find(|&r| !m[r][col].is_zero()) else {
            return (GaussianRational::zero(), None);
        };
        if piv != col {
            m.swap(col, piv);
            rhs.swap(col, piv);
            det = -det;
        }
        let inv = m[col][col].inv().unwrap();
        det = &det * &m[col][col];
        for r in col + 1..t {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &inv;
            for c in col..t {
                let d = &f * &m[col][c];
                m[r][c] -= &d;
            }
            let d = &f * &rhs[col];
            rhs[r] -= &d;
        }
    }
    let mut x = vec![GaussianRational::zero(); t];
    for r in (0..t).rev() {
        let mut acc = rhs[r].clone();
        for c in r + 1..t {
            acc -= &(&m[r][c] * &x[c]);
        }
        x[r] = &acc / &m[r][r];
    }
    (det, Some(x))
}

pub fn window_determinant_exact(omegas: &[GaussianRational], n: u32) -> GaussianRational {
    let t = omegas.len();
    solve_exact(window_matrix_exact(omegas, n), vec![GaussianRational::zero(); t]).0
}

/// Solves `M_n kappa = s` over Q(i); balls are rounded to `prec` bits.
pub fn recover_amplitudes_exact(omegas: &[GaussianRational], window_start: u32, samples: &[GaussianRational], prec: u32) -> Result<Amplitudes> {
    let t = omegas.len();
    if t == 0 || samples.len() != t {
        return Err(Error::InvalidArgument(format!("need {t} samples for {t} frequencies, got {}", samples.len())));
    }
    let one = num_rational::BigRational::from_integer(1.into());
    for (i, w) in omegas.iter().enumerate() {
        if w.norm() != one {
            return Err(Error::InvalidArgument(format!("omega {i} is not unimodular")));
        }
        if omegas[..i].contains(w) {
            return Err(Error::NearSingular);
        }
    }
    let (det_n, x) = solve_exact(window_matrix_exact(omegas, window_start), samples.to_vec());
    let x = x.ok_or(Error::NearSingular)?;
    let det0 = window_determinant_exact(omegas, 0);
    Ok(Amplitudes {
        kappas: x.iter().map(|k| ComplexBall::from_qi(k, prec)).collect(),
        delta0: ComplexBall::from_qi(&det0, prec),
        delta_n: ComplexBall::from_qi(&det_n, prec),
        exact: true,
        exact_kappas: Some(x),
    })
}

/// Solves `M_n kappa = s`; exactly when every input ball is an exact point.
pub fn recover_amplitudes(sys: &AmplitudeSystem) -> Result<Amplitudes> {
    let t = sys.omegas.len();
    if t == 0 || sys.samples.len() != t {
        return Err(Error::InvalidArgument(format!("need {t} samples for {t} frequencies, got {}", sys.samples.len())));
    }
    for (i, w) in sys.omegas.iter().enumerate() {
        if !w.abs().contains_rational(&num_rational::BigRational::from_integer(1.into())) && (w.to_complex64().norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::InvalidArgument(format!("omega {i} is not unimodular")));
        }
        if sys.omegas[..i].iter().any(|v| v.overlaps(w)) {
            return Err(Error::NearSingular);
        }
    }
    let n = sys.window_start;
    if sys.omegas.iter().chain(&sys.samples).all(ComplexBall::is_exact) {
        let om: Vec<GaussianRational> = sys.omegas.iter().map(ComplexBall::center_qi).collect();
        let s: Vec<GaussianRational> = sys.samples.iter().map(ComplexBall::center_qi).collect();
        return recover_amplitudes_exact(&om, n, &s, sys.omegas[0].prec().max(64));
    }
    let prec = sys.omegas.iter().chain(&sys.samples).map(ComplexBall::prec).max().unwrap();
    let matrix = |start: u32| -> Vec<Vec<ComplexBall>> {
        (0..t as u32).map(|k| sys.omegas.iter().map(|w| w.pow_u32(start + k)).collect()).collect()
    };
    let m = matrix(n);
    let det_n = determinant(&m, prec);
    if det_n.contains_zero() {
        return Err(Error::NearSingular);
    }
    let kappas = (0..t)
        .map(|j| {
            let replaced: Vec<Vec<ComplexBall>> = m
                .iter()
                .zip(&sys.samples)
                .map(|(row, s)| row.iter().enumerate().map(|(c, x)| if c == j { s.clone() } else { x.clone() }).collect())
                .collect();
            determinant(&replaced, prec).div(&det_n).expect("determinant excludes zero")
        })
        .collect();
    Ok(Amplitudes { kappas, delta0: determinant(&matrix(0), prec), delta_n: det_n, exact: false, exact_kappas: None })
}

/// Adds `err` to every ball; used to model noisy samples.
pub fn with_noise(samples: &[ComplexBall], err: f64) -> Vec<ComplexBall> {
    samples.iter().map(|s| s.add_error(Mag::from_f64(err))).collect()
}
