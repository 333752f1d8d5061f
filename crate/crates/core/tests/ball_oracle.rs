//! Ball enclosures against a 512-bit reference implementation.

mod common;

use astro_float::Consts;
use common::{big_ratio, oracle_rational, ORACLE_BITS, RM};
use gfunc::arith::Ball;
use num_rational::BigRational;
use proptest::prelude::*;

const P: u32 = 128;

fn ball(n: i64, d: i64) -> Ball {
    Ball::from_rational(&BigRational::new(n.into(), d.into()), P)
}

fn tight_and_contains(b: &Ball, oracle: &BigRational) -> bool {
    b.contains_rational(oracle) && b.rad_f64() < 1e-30
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_encloses(n in -4000i64..4000, d in 1i64..1000) {
        let mut cc = Consts::new().unwrap();
        let want = oracle_rational(&big_ratio(n, d).exp(ORACLE_BITS, RM, &mut cc));
        let got = ball(n, d).exp();
        prop_assert!(got.contains_rational(&want));
    }

    #[test]
    fn ln_encloses(n in 1i64..100_000, d in 1i64..1000) {
        let mut cc = Consts::new().unwrap();
        let want = oracle_rational(&big_ratio(n, d).ln(ORACLE_BITS, RM, &mut cc));
        let got = ball(n, d).ln().unwrap();
        prop_assert!(tight_and_contains(&got, &want), "{n}/{d}: {:?}", got.rad_f64());
    }

    #[test]
    fn atan_encloses(n in -100_000i64..100_000, d in 1i64..1000) {
        let mut cc = Consts::new().unwrap();
        let want = oracle_rational(&big_ratio(n, d).atan(ORACLE_BITS, RM, &mut cc));
        let got = ball(n, d).atan();
        prop_assert!(tight_and_contains(&got, &want), "{n}/{d}: {:?}", got.rad_f64());
    }

    #[test]
    fn sqrt_encloses(n in 0i64..1_000_000, d in 1i64..1000) {
        let want = oracle_rational(&big_ratio(n, d).sqrt(ORACLE_BITS, RM));
        let got = ball(n, d).sqrt().unwrap();
        prop_assert!(got.contains_rational(&want));
    }

    #[test]
    fn field_ops_enclose(a in -10_000i64..10_000, b in 1i64..100, c in -10_000i64..10_000, e in 1i64..100) {
        let (x, y) = (ball(a, b), ball(c, e));
        let (qx, qy) = (BigRational::new(a.into(), b.into()), BigRational::new(c.into(), e.into()));
        prop_assert!((&x + &y).contains_rational(&(&qx + &qy)));
        prop_assert!((&x - &y).contains_rational(&(&qx - &qy)));
        prop_assert!((&x * &y).contains_rational(&(&qx * &qy)));
        if c != 0 {
            prop_assert!(x.div(&y).unwrap().contains_rational(&(&qx / &qy)));
        }
    }
}

#[test]
fn constants_enclose() {
    let mut cc = Consts::new().unwrap();
    assert!(Ball::pi(P).contains_rational(&oracle_rational(&cc.pi(ORACLE_BITS, RM))));
    assert!(Ball::ln2(P).contains_rational(&oracle_rational(&cc.ln_2(ORACLE_BITS, RM))));
    assert!(Ball::pi(P).rad_f64() < 1e-36);
}
