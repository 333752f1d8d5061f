//! Analytic continuation along broken lines and connection to local bases.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::basis::{NumericBasis, ENTIRE_RADIUS};
use super::{FuchsianODE, LocalBasis, Path};
use crate::arith::{BallJson, ComplexBall, GaussianRational};
use crate::error::{Error, Result};

/// Steps shorter than this fraction of a segment count as grazing a singularity.
const MIN_STEP_BITS: u32 = 48;
const MAX_STEPS: usize = 100_000;
/// Matching points are rounded to this many fractional bits.
const MATCH_BITS: u32 = 10;

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, x| a * BigInt::from(x))
}

fn check_fraction(step_fraction: f64) -> Result<()> {
    if step_fraction > 0.0 && step_fraction < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("step fraction {step_fraction} outside (0, 1)")))
    }
}

/// Transports `(f, f', ..., f^(mu-1))` from the start of `path` to its end.
pub fn continue_along_path(
    ode: &FuchsianODE,
    initial: &[ComplexBall],
    path: &Path,
    n: usize,
    step_fraction: f64,
) -> Result<Vec<ComplexBall>> {
    check_fraction(step_fraction)?;
    let mu = ode.order();
    if initial.len() != mu {
        return Err(Error::InvalidArgument(format!("expected {mu} initial values, got {}", initial.len())));
    }
    if n < mu {
        return Err(Error::InvalidArgument(format!("series order {n} below equation order {mu}")));
    }
    path.validate(ode)?;
    let prec = initial.iter().map(ComplexBall::prec).max().unwrap();
    let inv_fact: Vec<GaussianRational> =
        (0..mu).map(|j| GaussianRational::from_real(BigRational::new(BigInt::one(), factorial(j)))).collect();
    let mut state = initial.to_vec();
    let mut steps = 0usize;
    for pair in path.waypoints.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let delta = b - a;
        let (dx, dy) = delta.to_f64_pair();
        let len = dx.hypot(dy) * (1.0 + 1e-12);
        if len == 0.0 {
            continue;
        }
        let mut t = BigRational::zero();
        while t < BigRational::one() {
            let p = a + &delta.scale(&t);
            let limit = step_fraction * ode.singular_distance(&p).min(ENTIRE_RADIUS);
            let mut bits = 0u32;
            while len / f64::from(bits).exp2() > limit {
                bits += 1;
                if bits > MIN_STEP_BITS {
                    return Err(Error::StepTooClose);
                }
            }
            t = (&t + BigRational::new(BigInt::one(), BigInt::one() << bits)).min(BigRational::one());
            let q = a + &delta.scale(&t);
            let basis = NumericBasis::new(ode, &p, n, prec)?;
            let jet = basis.jet(&q, prec)?;
            let weights: Vec<ComplexBall> = state.iter().zip(&inv_fact).map(|(s, f)| s.scale_qi(f)).collect();
            state = jet
                .iter()
                .map(|row| row.iter().zip(&weights).fold(ComplexBall::zero(prec), |acc, (g, w)| &acc + &(g * w)))
                .map(|b| b.with_prec(prec))
                .collect();
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepTooClose);
            }
        }
    }
    Ok(state)
}

/// Coefficients of `f = sum_j constants[j] g_j` in a target basis.
#[derive(Clone, Debug)]
pub struct ConnectionResult {
    pub constants: Vec<ComplexBall>,
    /// Determinant of the matching system, i.e. the Wronskian of the target
    /// basis at the matching point.
    pub wronskian_value: ComplexBall,
    pub matching_point: GaussianRational,
    /// Upper bound on `max_k |sum_j M_kj c_j - F_k|` for the ball solution.
    pub residual: f64,
}

impl Serialize for ConnectionResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ConnectionResult", 4)?;
        st.serialize_field("constants", &self.constants.iter().map(BallJson::from).collect::<Vec<_>>())?;
        st.serialize_field("wronskian_value", &BallJson::from(&self.wronskian_value))?;
        st.serialize_field("matching_point", &self.matching_point)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

pub(crate) fn determinant(m: &[Vec<ComplexBall>], prec: u32) -> ComplexBall {
    let n = m.len();
    match n {
        0 => ComplexBall::one(prec),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = ComplexBall::zero(prec);
            for col in 0..n {
                let minor: Vec<Vec<ComplexBall>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| x.clone()).collect()).collect();
                let term = &m[0][col] * &determinant(&minor, prec);
                acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

fn round_to_grid(x: f64) -> BigRational {
    let scale = f64::from(1u32 << MATCH_BITS);
    let k = (x * scale + 0.5).floor();
    BigRational::new(BigInt::from(k.to_i64().unwrap_or(0)), BigInt::from(1u32 << MATCH_BITS))
}

/// Candidate matching points between the path end and the target center,
/// starting from the middle of the overlap of their disks.
fn matching_points(ode: &FuchsianODE, end: &GaussianRational, target: &LocalBasis) -> Result<Vec<GaussianRational>> {
    if end == &target.center {
        return Ok(vec![end.clone()]);
    }
    let (ex, ey) = end.to_f64_pair();
    let (cx, cy) = target.center.to_f64_pair();
    let dist = (cx - ex).hypot(cy - ey);
    if dist >= target.radius {
        return Err(Error::InvalidArgument("path end lies outside the target basis disk".into()));
    }
    let reach = ode.singular_distance(end).min(ENTIRE_RADIUS);
    let lo = (dist - target.radius).max(0.0);
    let hi = reach.min(dist);
    let mut out = Vec::new();
    for frac in [0.5, 0.25, 0.75, 0.375, 0.625] {
        let s = (lo + frac * (hi - lo)) / dist;
        let p = GaussianRational::new(round_to_grid(ex + s * (cx - ex)), round_to_grid(ey + s * (cy - ey)));
        let (px, py) = p.to_f64_pair();
        if ode.is_ordinary(&p) && (px - cx).hypot(py - cy) < target.radius && !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        out.push(target.center.clone());
    }
    Ok(out)
}

/// Continues `f` along `path`, then to a matching point inside the target
/// disk, and solves for the coefficients of `f` in the target basis by
/// Cramer's rule.
pub fn connection_constants(
    ode: &FuchsianODE,
    f_at_start: &[ComplexBall],
    path: &Path,
    target: &LocalBasis,
    n: usize,
    step_fraction: f64,
) -> Result<ConnectionResult> {
    let mu = ode.order();
    if target.order() != mu {
        return Err(Error::InvalidArgument("target basis has the wrong size".into()));
    }
    let prec = f_at_start.iter().map(ComplexBall::prec).max().unwrap_or(64);
    let at_end = continue_along_path(ode, f_at_start, path, n, step_fraction)?;
    for rho in matching_points(ode, path.end(), target)? {
        let f = if &rho == path.end() {
            at_end.clone()
        } else {
            continue_along_path(ode, &at_end, &Path::segment(path.end().clone(), rho.clone()), n, step_fraction)?
        };
        let m = target.jet(&ComplexBall::from_qi(&rho, prec))?;
        let det = determinant(&m, prec);
        if det.contains_zero() {
            continue;
        }
        let constants: Vec<ComplexBall> = (0..mu)
            .map(|j| {
                let replaced: Vec<Vec<ComplexBall>> = m
                    .iter()
                    .zip(&f)
                    .map(|(row, fk)| row.iter().enumerate().map(|(c, x)| if c == j { fk.clone() } else { x.clone() }).collect())
                    .collect();
                determinant(&replaced, prec).div(&det).expect("determinant excludes zero").with_prec(prec)
            })
            .collect();
        let residual = m
            .iter()
            .zip(&f)
            .map(|(row, fk)| {
                let lhs = row.iter().zip(&constants).fold(ComplexBall::zero(prec), |acc, (a, c)| &acc + &(a * c));
                (&lhs - fk).abs_upper().to_f64_up()
            })
            .fold(0.0, f64::max);
        return Ok(ConnectionResult { constants, wronskian_value: det, matching_point: rho, residual });
    }
    Err(Error::WronskianVanishes)
}

/// Values of `f` at `zeta - (zeta - start) 2^-k` for `k = 1..=count`,
/// continued point to point along the ray.
pub fn sample_toward(
    ode: &FuchsianODE,
    initial: &[ComplexBall],
    start: &GaussianRational,
    zeta: &GaussianRational,
    count: usize,
    n: usize,
    step_fraction: f64,
) -> Result<Vec<(GaussianRational, ComplexBall)>> {
    let gap = zeta - start;
    let mut state = initial.to_vec();
    let mut here = start.clone();
    let mut out = Vec::with_capacity(count);
    for k in 1..=count {
        let z = zeta - &gap.scale(&BigRational::new(BigInt::one(), BigInt::one() << k));
        state = continue_along_path(ode, &state, &Path::segment(here, z.clone()), n, step_fraction)?;
        out.push((z.clone(), state[0].clone()));
        here = z;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::local_basis;
    use super::*;
    use crate::arith::{Ball, QiPolynomial};

    const P: u32 = 160;

    fn arctan_ode() -> FuchsianODE {
        FuchsianODE::from_polynomials(&[QiPolynomial::zero(), QiPolynomial::from_ints(&[0, 2]), QiPolynomial::from_ints(&[1, 0, 1])]).unwrap()
    }

    fn arctan_start() -> Vec<ComplexBall> {
        vec![ComplexBall::zero(P), ComplexBall::one(P)]
    }

    fn q(a: i64, b: i64) -> GaussianRational {
        GaussianRational::ratio(a, b)
    }

    #[test]
    fn rational_solution_to_two_i() {
        // (1 - z) y' - y = 0, f = 1 / (1 - z)
        let ode = FuchsianODE::from_polynomials(&[QiPolynomial::from_ints(&[-1]), QiPolynomial::from_ints(&[1, -1])]).unwrap();
        let two_i = GaussianRational::from_ratios(0, 1, 2, 1);
        let out = continue_along_path(&ode, &[ComplexBall::one(P)], &Path::segment(GaussianRational::zero(), two_i), 128, 0.5).unwrap();
        assert!(out[0].contains_qi(&GaussianRational::from_ratios(1, 5, 2, 5)));
        assert!(out[0].rad_f64() < 1e-30);
    }

    #[test]
    fn arctan_at_one_is_quarter_pi() {
        let ode = arctan_ode();
        let out = continue_along_path(&ode, &arctan_start(), &Path::segment(GaussianRational::zero(), GaussianRational::one()), 128, 0.5).unwrap();
        let quarter_pi = ComplexBall::from_real(&Ball::pi(P).mul_2exp(-2));
        assert!(out[0].overlaps(&quarter_pi));
        assert!(out[0].rad_f64() < 1e-30);
        assert!(out[1].contains_qi(&q(1, 2)));
    }

    #[test]
    fn log_to_minus_one() {
        // (1 - z) y'' - y' = 0, f = -log(1 - z)
        let ode = FuchsianODE::from_polynomials(&[QiPolynomial::zero(), QiPolynomial::from_ints(&[-1]), QiPolynomial::from_ints(&[1, -1])]).unwrap();
        let out = continue_along_path(&ode, &arctan_start(), &Path::segment(GaussianRational::zero(), GaussianRational::from_int(-1)), 128, 0.5).unwrap();
        let minus_ln2 = ComplexBall::from_real(&-Ball::ln2(P));
        assert!(out[0].overlaps(&minus_ln2));
        assert!(out[0].rad_f64() < 1e-30);
    }

    #[test]
    fn group_law_and_path_invariance() {
        let ode = arctan_ode();
        let target = GaussianRational::from_ratios(3, 2, 1, 4);
        let direct = continue_along_path(&ode, &arctan_start(), &Path::segment(GaussianRational::zero(), target.clone()), 48, 0.5).unwrap();
        let via = Path::new(vec![GaussianRational::zero(), q(1, 1), target.clone()]);
        let broken = continue_along_path(&ode, &arctan_start(), &via, 48, 0.5).unwrap();
        let below = Path::new(vec![GaussianRational::zero(), GaussianRational::from_ratios(1, 1, -1, 2), target]);
        let other = continue_along_path(&ode, &arctan_start(), &below, 48, 0.5).unwrap();
        for k in 0..2 {
            assert!(direct[k].overlaps(&broken[k]));
            assert!(direct[k].overlaps(&other[k]));
        }
    }

    #[test]
    fn grazing_path_is_rejected() {
        let ode = arctan_ode();
        let path = Path::segment(GaussianRational::from_ratios(-1, 1, 1, 1), GaussianRational::from_ratios(1, 1, 1, 1));
        assert!(matches!(continue_along_path(&ode, &arctan_start(), &path, 32, 0.5), Err(Error::StepTooClose)));
    }

    #[test]
    fn connection_to_basis_at_half() {
        let ode = arctan_ode();
        let target = local_basis(&ode, &q(1, 2), 64).unwrap();
        let path = Path::segment(GaussianRational::zero(), q(1, 2));
        let r = connection_constants(&ode, &arctan_start(), &path, &target, 64, 0.5).unwrap();
        assert_eq!(r.matching_point, q(1, 2));
        let atan_half = ComplexBall::from_real(&Ball::from_rational(&BigRational::new(1.into(), 2.into()), P).atan());
        assert!(r.constants[0].overlaps(&atan_half));
        assert!(r.constants[1].contains_qi(&q(4, 5)));
        assert!(r.wronskian_value.contains_qi(&GaussianRational::one()));
        assert!(r.residual < 1e-30);
    }

    #[test]
    fn connection_through_matching_point() {
        let ode = arctan_ode();
        let target = local_basis(&ode, &q(1, 1), 96).unwrap();
        let path = Path::segment(GaussianRational::zero(), q(3, 4));
        let r = connection_constants(&ode, &arctan_start(), &path, &target, 64, 0.5).unwrap();
        assert_ne!(r.matching_point, q(1, 1));
        let quarter_pi = ComplexBall::from_real(&Ball::pi(P).mul_2exp(-2));
        assert!(r.constants[0].overlaps(&quarter_pi));
        assert!(r.constants[0].rad_f64() < 1e-12);
        assert!(r.constants[1].overlaps(&ComplexBall::from_qi(&q(1, 2), P)));
    }

    #[test]
    fn identity_system_for_a_basis_element() {
        let ode = arctan_ode();
        let target = local_basis(&ode, &q(1, 2), 48).unwrap();
        let start = vec![ComplexBall::one(P), ComplexBall::zero(P)];
        let r = connection_constants(&ode, &start, &Path::new(vec![q(1, 2)]), &target, 48, 0.5).unwrap();
        assert!(r.constants[0].contains_qi(&GaussianRational::one()));
        assert!(r.constants[1].contains_zero());
    }
}
