//! End-to-end runs from parsed text, and invariants across modules.

mod common;

use astro_float::Consts;
use common::{oracle_ball, ORACLE_BITS, RM};
use gfunc::algroots::build_root_series;
use gfunc::arith::{complex_roots, Ball, ComplexBall, GaussianRational};
use gfunc::asymptotics::{fit_profile, predict_coeffs, FitOptions, Front, SingularProfile};
use gfunc::logvalues::series_log1p;
use gfunc::ode::{continue_along_path, Path};
use gfunc::parse::{parse_ode, parse_poly, parse_qi, parse_series};
use gfunc::series::GSeries;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn parsed_ode_reaches_quarter_pi() {
    let ode = parse_ode("(1+X^2)*y'' + 2*X*y' = 0").unwrap();
    let start = [ComplexBall::zero(160), ComplexBall::one(160)];
    let out = continue_along_path(&ode, &start, &Path::segment(parse_qi("0").unwrap(), parse_qi("1").unwrap()), 128, 0.5).unwrap();
    let mut cc = Consts::new().unwrap();
    let quarter_pi = oracle_ball(&cc.pi(ORACLE_BITS, RM), 160).mul_2exp(-2);
    assert!(out[0].overlaps(&quarter_pi));
    assert!(out[0].rad_f64() < 1e-30);
}

#[test]
fn parsed_poly_root_series() {
    let q = parse_poly("X^3 - 2*X - 5").unwrap();
    let alpha = complex_roots(&q, 192).unwrap().into_iter().find(|r| r.ball.to_complex64().im.abs() < 1e-9).unwrap().ball;
    let rs = build_root_series(&q, &alpha, 4.0, 64, 192).unwrap();
    assert!(rs.verify_functional_equation());
    assert!(rs.value.overlaps(&alpha));
    assert!(rs.value.rad_f64() < 1e-20);
}

#[test]
fn parsed_series_round_trip() {
    let s = GSeries::from_fn(6, |k| GaussianRational::from_ratios(k as i64, 3, 1, k as i64 + 1)).with_radius_hint(Some(2.0));
    let text = serde_json::to_string(&s).unwrap();
    assert_eq!(parse_series(&text).unwrap(), s);
}

/// `4 arctan(1 - 2^-20)` by partial sums: a boundary evaluation with no
/// rigorous tail, so only convergence toward `pi` is checked.
#[test]
fn arctan_boundary_approaches_pi() {
    let prec = 96;
    let z = Ball::from_rational(&num_rational::BigRational::new(((1i64 << 20) - 1).into(), (1i64 << 20).into()), prec);
    let z2 = z.sqr();
    let mut cc = Consts::new().unwrap();
    let pi = oracle_ball(&cc.pi(ORACLE_BITS, RM), prec).re();
    let (mut pow, mut sum) = (z.clone(), Ball::from_int(0, prec));
    let mut gaps = Vec::new();
    for k in 0..(1usize << 22) {
        let term = pow.div(&Ball::from_int(2 * k as i64 + 1, prec)).unwrap();
        sum = if k % 2 == 0 { &sum + &term } else { &sum - &term };
        pow = &pow * &z2;
        if (k + 1).is_power_of_two() && k >= 1 << 19 {
            gaps.push((&sum.mul_2exp(2) - &pi).abs_upper().to_f64_up());
        }
    }
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]), "{gaps:?}");
    // the limit is 4 arctan(1 - 2^-20) = pi - 2^-19 + O(2^-40)
    assert!((gaps.last().unwrap() - 2f64.powi(-19)).abs() < 1e-9, "{gaps:?}");
}

fn small_series(n: usize) -> impl Strategy<Value = GSeries> {
    prop::collection::vec((-5i64..6, 1i64..4, -3i64..4, 1i64..4), n).prop_map(|v| {
        let mut c = vec![GaussianRational::zero()];
        c.extend(v.into_iter().map(|(a, b, x, y)| GaussianRational::from_ratios(a, b, x, y)));
        GSeries::new(c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `log(1 + a) + log(1 + b) = log((1 + a)(1 + b))` coefficientwise.
    #[test]
    fn log1p_product_law(a in small_series(10), b in small_series(10)) {
        let ab = a.add(&b).add(&a.mul(&b));
        let lhs = series_log1p(&a).unwrap().add(&series_log1p(&b).unwrap());
        let rhs = series_log1p(&ab).unwrap();
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    /// Real roots of random monic cubics come back as series values.
    #[test]
    fn cubic_roots_are_series_values(b in -4i64..5, c in -4i64..5, d in -6i64..7) {
        let q = parse_poly(&format!("X^3 + ({b})*X^2 + ({c})*X + ({d})")).unwrap();
        prop_assume!(q.squarefree_factors().len() == 1 && q.squarefree_factors()[0].1 == 1);
        let roots = complex_roots(&q, 160).unwrap();
        let alpha = &roots[0].ball;
        let rs = build_root_series(&q, alpha, 2.0, 48, 160).unwrap();
        prop_assert!(rs.verify_functional_equation());
        prop_assert!(rs.value.overlaps(alpha));
    }

    /// Fitting predicted coefficients recovers the profile.
    #[test]
    fn predict_fit_round_trip(rho_num in 1i64..8, tau_idx in 0usize..4) {
        let rho = rho_num as f64 / 2.0;
        let tau = [-0.5, -1.5, -2.0, -1.0 / 3.0][tau_idx];
        let p = SingularProfile { rho, sigma: 0, tau, fronts: vec![Front { zeta: Complex64::new(1.0, 0.0), c: Complex64::new(1.0, 0.0) }] };
        let mut coeffs = vec![ComplexBall::one(64); 2];
        coeffs.extend(predict_coeffs(&p, 2..=1025).unwrap());
        let fit = fit_profile(&coeffs, &FitOptions::default()).unwrap();
        prop_assert!((fit.rho / rho - 1.0).abs() < 1e-3, "{:?}", fit);
        prop_assert!((fit.tau - tau).abs() < 0.02, "{:?}", fit);
    }
}
