//! Linear ODEs with rational coefficients over Q(i): local bases at ordinary
//! points, analytic continuation, connection constants, Wronskians and
//! singular behaviour.

mod basis;
mod continuation;
mod profile;
mod wronskian;

pub use basis::{local_basis, LocalBasis};
pub(crate) use continuation::determinant;
pub use continuation::{connection_constants, continue_along_path, sample_toward, ConnectionResult};
pub use profile::{leading_term, singular_profile, LeadingTerm, LogMonomial, LogMonomialSum, SingularFit};
pub use wronskian::{wronskian_certify, wronskian_series, WronskianFit};

use serde::{Deserialize, Serialize};

use crate::arith::{complex_roots, ComplexBall, GaussianRational, QiPolynomial, RationalFunction};
use crate::error::{Error, Result};

/// Precision used to isolate the singularities of an equation.
const SINGULARITY_BITS: u32 = 192;

/// `y^(mu) + a_(mu-1)(z) y^(mu-1) + ... + a_0(z) y = 0`.
#[derive(Clone, Debug)]
pub struct FuchsianODE {
    coeffs: Vec<RationalFunction>,
    /// Cleared form `sum_j p_j(z) y^(j) = 0`, `p_mu` the lcm of the denominators.
    cleared: Vec<QiPolynomial>,
    singularities: Vec<ComplexBall>,
}

impl PartialEq for FuchsianODE {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs
    }
}

impl FuchsianODE {
    /// `coeffs[j]` multiplies `y^(j)`; the order is `coeffs.len()`.
    pub fn new(coeffs: Vec<RationalFunction>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("an equation needs order at least 1".into()));
        }
        let lcm = coeffs.iter().fold(QiPolynomial::constant(GaussianRational::one()), |acc, c| {
            let g = acc.gcd(c.den());
            (&acc * c.den()).div_rem(&g).0
        });
        let lcm = lcm.monic();
        let mut cleared: Vec<QiPolynomial> = coeffs.iter().map(|c| c.num() * &lcm.div_rem(c.den()).0).collect();
        cleared.push(lcm.clone());
        let singularities = if lcm.degree().unwrap_or(0) == 0 {
            Vec::new()
        } else {
            complex_roots(&lcm, SINGULARITY_BITS)?.into_iter().map(|r| r.ball).collect()
        };
        Ok(FuchsianODE { coeffs, cleared, singularities })
    }

    /// From polynomial coefficients `sum_j q_j(z) y^(j) = 0` with `q_mu` the
    /// leading one; divides through by `q_mu`.
    pub fn from_polynomials(polys: &[QiPolynomial]) -> Result<Self> {
        let (lead, rest) = polys.split_last().ok_or_else(|| Error::InvalidArgument("no coefficients".into()))?;
        if lead.is_zero() {
            return Err(Error::InvalidArgument("leading coefficient is zero".into()));
        }
        let coeffs = rest
            .iter()
            .map(|p| RationalFunction::new(p.clone(), lead.clone()).expect("nonzero denominator"))
            .collect();
        FuchsianODE::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn cleared(&self) -> &[QiPolynomial] {
        &self.cleared
    }

    pub fn singularities(&self) -> &[ComplexBall] {
        &self.singularities
    }

    pub fn is_ordinary(&self, z: &GaussianRational) -> bool {
        !self.cleared[self.order()].eval(z).is_zero()
    }

    /// Certified lower bound on the distance from `z` to the nearest singularity.
    pub fn singular_distance(&self, z: &GaussianRational) -> f64 {
        let p = ComplexBall::from_qi(z, SINGULARITY_BITS);
        self.singularities.iter().map(|s| s.distance_lower(&p)).fold(f64::INFINITY, f64::min).max(0.0)
    }

    /// Text form accepted by the parser, e.g. `(1+X^2)*y'' + (2*X)*y' = 0`.
    pub fn to_text(&self) -> String {
        let mut terms = Vec::new();
        for (j, p) in self.cleared.iter().enumerate().rev() {
            if p.is_zero() {
                continue;
            }
            let d = if j == 0 { "y".to_string() } else { format!("y{}", "'".repeat(j)) };
            terms.push(format!("({p})*{d}"));
        }
        format!("{} = 0", terms.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: QiPolynomial,
    den: QiPolynomial,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OdeRepr {
    order: usize,
    coeffs: Vec<RationalRepr>,
}

/// JSON: `{"order": mu, "coeffs": [{"num": poly, "den": poly}, ...]}` with
/// `coeffs[j]` multiplying `y^(j)` in the monic form.
impl Serialize for FuchsianODE {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OdeRepr {
            order: self.order(),
            coeffs: self.coeffs.iter().map(|c| RationalRepr { num: c.num().clone(), den: c.den().clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FuchsianODE {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = OdeRepr::deserialize(d)?;
        if r.coeffs.len() != r.order {
            return Err(D::Error::custom(format!("order {} but {} coefficients", r.order, r.coeffs.len())));
        }
        let coeffs = r
            .coeffs
            .into_iter()
            .enumerate()
            .map(|(j, c)| RationalFunction::new(c.num, c.den).ok_or_else(|| D::Error::custom(format!("coeffs[{j}].den is zero"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        FuchsianODE::new(coeffs).map_err(D::Error::custom)
    }
}

/// Broken-line path through ordinary points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub waypoints: Vec<GaussianRational>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub branch_note: String,
}

impl Path {
    pub fn new(waypoints: Vec<GaussianRational>) -> Self {
        Path { waypoints, branch_note: String::new() }
    }

    pub fn segment(a: GaussianRational, b: GaussianRational) -> Self {
        Path::new(vec![a, b])
    }

    pub fn start(&self) -> &GaussianRational {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &GaussianRational {
        self.waypoints.last().unwrap()
    }

    /// Every waypoint is ordinary and every segment keeps a positive margin
    /// from every singularity ball.
    pub fn validate(&self, ode: &FuchsianODE) -> Result<()> {
        if self.waypoints.is_empty() {
            return Err(Error::InvalidArgument("path has no waypoints".into()));
        }
        for w in &self.waypoints {
            if !ode.is_ordinary(w) || ode.singular_distance(w) <= 0.0 {
                return Err(Error::SingularCenter);
            }
        }
        for pair in self.waypoints.windows(2) {
            let (a, b) = (pair[0].to_f64_pair(), pair[1].to_f64_pair());
            for s in ode.singularities() {
                let c = s.to_complex64();
                let d = segment_distance(a, b, (c.re, c.im));
                if d * (1.0 - 1e-9) - s.rad_f64() <= 0.0 {
                    return Err(Error::StepTooClose);
                }
            }
        }
        Ok(())
    }
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (x, y) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    x.hypot(y)
}
