//! Univariate polynomials and rational functions over Q(i).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::qi::GaussianRational;

/// Dense polynomial, `coeffs[k]` multiplies `X^k`. Trailing zeros are
/// trimmed on construction, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QiPolynomial {
    coeffs: Vec<GaussianRational>,
}

impl QiPolynomial {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QiPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        QiPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `X`.
    pub fn x() -> Self {
        Self::new(vec![GaussianRational::zero(), GaussianRational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| GaussianRational::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    /// Coefficient of `X^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, k: &GaussianRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let inv = lc.inv().unwrap();
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division; panics when `d` is zero.
    pub fn div_rem(&self, d: &QiPolynomial) -> (QiPolynomial, QiPolynomial) {
        let dd = d.degree().expect("polynomial division by zero");
        let lc_inv = d.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![GaussianRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let t = &c * dc;
                    rem[k + j] -= &t;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, other: &QiPolynomial) -> QiPolynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree decomposition (Yun): pairs `(f_k, k)` with `self = lc * prod f_k^k`,
    /// every `f_k` monic, squarefree and pairwise coprime.
    pub fn squarefree_factors(&self) -> Vec<(QiPolynomial, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut k = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// `p(X + s)`.
    pub fn taylor_shift(&self, s: &GaussianRational) -> QiPolynomial {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * s;
                c[j] += &t;
            }
        }
        Self::new(c)
    }

    /// `p(X^m)`.
    pub fn compose_power(&self, m: usize) -> QiPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![GaussianRational::zero(); (self.coeffs.len() - 1) * m + 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            c[k * m] = a.clone();
        }
        Self::new(c)
    }

    pub fn to_complex64(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .map(|c| {
                let (re, im) = c.to_f64_pair();
                Complex64::new(re, im)
            })
            .collect()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }
}

impl Add for &QiPolynomial {
    type Output = QiPolynomial;
    fn add(self, rhs: &QiPolynomial) -> QiPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QiPolynomial::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Sub for &QiPolynomial {
    type Output = QiPolynomial;
    fn sub(self, rhs: &QiPolynomial) -> QiPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QiPolynomial::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl Mul for &QiPolynomial {
    type Output = QiPolynomial;
    fn mul(self, rhs: &QiPolynomial) -> QiPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return QiPolynomial::zero();
        }
        let mut c = vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let t = a * b;
                c[i + j] += &t;
            }
        }
        QiPolynomial::new(c)
    }
}

impl Neg for &QiPolynomial {
    type Output = QiPolynomial;
    fn neg(self) -> QiPolynomial {
        QiPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for QiPolynomial {
            type Output = QiPolynomial;
            fn $m(self, rhs: QiPolynomial) -> QiPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl fmt::Display for QiPolynomial {
    /// Renders in the parser's input grammar, so the output parses back.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*X")?,
                _ => write!(f, "({c})*X^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QiPolynomial[{self}]")
    }
}

/// `num / den` reduced so that `den` is monic and coprime to `num`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: QiPolynomial,
    den: QiPolynomial,
}

impl RationalFunction {
    /// Returns `None` when `den` is zero.
    pub fn new(num: QiPolynomial, den: QiPolynomial) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Self::zero());
        }
        let g = num.gcd(&den);
        let num = num.div_rem(&g).0;
        let den = den.div_rem(&g).0;
        let lc = den.leading().unwrap().inv().unwrap();
        Some(RationalFunction { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn zero() -> Self {
        RationalFunction { num: QiPolynomial::zero(), den: QiPolynomial::constant(GaussianRational::one()) }
    }

    pub fn from_poly(p: QiPolynomial) -> Self {
        RationalFunction { num: p, den: QiPolynomial::constant(GaussianRational::one()) }
    }

    pub fn num(&self) -> &QiPolynomial {
        &self.num
    }

    pub fn den(&self) -> &QiPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).unwrap()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) - &(&o.num * &self.den), &self.den * &o.den).unwrap()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }

    /// `None` when dividing by zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(n: i64, d: i64) -> GaussianRational {
        GaussianRational::ratio(n, d)
    }

    #[test]
    fn eval_examples() {
        let p = QiPolynomial::from_ints(&[-2, 0, 1]);
        assert_eq!(p.eval(&g(3, 2)), g(1, 4));
        let p = QiPolynomial::from_ints(&[0, 1, 0, 0, 0, 1]);
        assert_eq!(p.eval(&GaussianRational::zero()), GaussianRational::zero());
        let p = QiPolynomial::from_ints(&[1, 0, 1]);
        assert!(p.eval(&GaussianRational::i()).is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(QiPolynomial::from_ints(&[-2, 0, 1]).derivative(), QiPolynomial::from_ints(&[0, 2]));
        assert!(QiPolynomial::from_ints(&[5]).derivative().is_zero());
        assert_eq!(
            QiPolynomial::from_ints(&[0, 1, 0, 0, 0, 1]).derivative(),
            QiPolynomial::from_ints(&[1, 0, 0, 0, 5])
        );
    }

    #[test]
    fn degree_and_trim() {
        let p = QiPolynomial::new(vec![g(1, 1), g(0, 1), g(0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(QiPolynomial::zero().degree(), None);
    }

    #[test]
    fn squarefree_of_power() {
        // 32 X^31 -> X with multiplicity 31
        let mut c = vec![0i64; 32];
        c[31] = 32;
        let f = QiPolynomial::from_ints(&c).squarefree_factors();
        assert_eq!(f, vec![(QiPolynomial::x(), 31)]);
        // (X-1)^2 (X+i)
        let a = QiPolynomial::from_ints(&[-1, 1]);
        let b = QiPolynomial::new(vec![GaussianRational::i(), GaussianRational::one()]);
        let p = &(&a * &a) * &b;
        let f = p.squarefree_factors();
        assert_eq!(f, vec![(b, 1), (a, 2)]);
    }

    #[test]
    fn shift_and_compose() {
        let p = QiPolynomial::from_ints(&[-2, 0, 1]);
        let s = p.taylor_shift(&g(3, 2));
        for k in -3..4 {
            let x = g(k, 3);
            assert_eq!(s.eval(&x), p.eval(&(&x + &g(3, 2))));
        }
        let q = QiPolynomial::from_ints(&[-2, 1]).compose_power(4);
        assert_eq!(q, QiPolynomial::from_ints(&[-2, 0, 0, 0, 1]));
    }

    #[test]
    fn rational_function_reduces() {
        let num = QiPolynomial::from_ints(&[-1, 0, 1]);
        let den = QiPolynomial::from_ints(&[-2, 2]);
        let r = RationalFunction::new(num, den).unwrap();
        assert_eq!(r.den(), &QiPolynomial::from_ints(&[1]));
        assert_eq!(r.num(), &QiPolynomial::new(vec![g(1, 2), g(1, 2)]));
    }

    fn arb_qi() -> impl Strategy<Value = GaussianRational> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9).prop_map(|(a, b, c, d)| GaussianRational::from_ratios(a, b, c, d))
    }

    proptest! {
        #[test]
        fn horner_matches_monomial_sum(cs in prop::collection::vec(arb_qi(), 0..7), z in arb_qi()) {
            let p = QiPolynomial::new(cs.clone());
            let mut naive = GaussianRational::zero();
            for (k, c) in cs.iter().enumerate() {
                naive += &(c * &z.pow(k as u32));
            }
            prop_assert_eq!(p.eval(&z), naive);
        }

        #[test]
        fn div_rem_reconstructs(a in prop::collection::vec(arb_qi(), 0..7), b in prop::collection::vec(arb_qi(), 1..4)) {
            let a = QiPolynomial::new(a);
            let b = QiPolynomial::new(b);
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b);
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
        }
    }
}
