//! Text and JSON front end. The expression grammar is documented in
//! `docs/grammar.md`; decimal literals are rejected everywhere.

mod syntax;

pub use syntax::{parse_expr, ExprAst, ExprKind, Span};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::de::DeserializeOwned;

use crate::arith::{GaussianRational, QiPolynomial, RationalFunction};
use crate::error::{Error, Result};
use crate::ode::FuchsianODE;
use crate::series::GSeries;
use syntax::syntax;

/// Largest exponent accepted in `base ^ n`.
const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Context {
    Polynomial,
    Rational,
    Equation,
}

/// `constant + sum_k y[k] * y^(k)`.
#[derive(Clone)]
struct Linear {
    constant: RationalFunction,
    y: BTreeMap<usize, RationalFunction>,
}

impl Linear {
    fn scalar(r: RationalFunction) -> Self {
        Linear { constant: r, y: BTreeMap::new() }
    }

    fn combine(self, o: Linear, f: impl Fn(&RationalFunction, &RationalFunction) -> RationalFunction) -> Linear {
        let mut y = self.y;
        for (k, v) in o.y {
            let cur = y.remove(&k).unwrap_or_else(RationalFunction::zero);
            y.insert(k, f(&cur, &v));
        }
        y.retain(|_, v| !v.is_zero());
        Linear { constant: f(&self.constant, &o.constant), y }
    }

    fn map(self, f: impl Fn(&RationalFunction) -> RationalFunction) -> Linear {
        let mut y: BTreeMap<_, _> = self.y.iter().map(|(k, v)| (*k, f(v))).collect();
        y.retain(|_, v| !v.is_zero());
        Linear { constant: f(&self.constant), y }
    }
}

fn non_polynomial(span: Span, message: impl Into<String>) -> Error {
    Error::NonPolynomial { start: span.start, end: span.end, message: message.into() }
}

fn constant(c: GaussianRational) -> RationalFunction {
    RationalFunction::from_poly(QiPolynomial::constant(c))
}

fn integer_exponent(e: &ExprAst) -> Option<BigInt> {
    match (&e.kind, e.children.as_slice()) {
        (ExprKind::Number(n), _) => Some(n.clone()),
        (ExprKind::Neg, [inner]) => integer_exponent(inner).map(|n| -n),
        _ => None,
    }
}

fn rf_pow(base: &RationalFunction, mut e: u32) -> RationalFunction {
    let mut acc = constant(GaussianRational::one());
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b);
        }
        b = b.mul(&b);
        e >>= 1;
    }
    acc
}

fn eval(ast: &ExprAst, ctx: Context) -> Result<Linear> {
    let kids = &ast.children;
    Ok(match &ast.kind {
        ExprKind::Number(n) => Linear::scalar(constant(GaussianRational::from_real(n.clone().into()))),
        ExprKind::ImagUnit => Linear::scalar(constant(GaussianRational::i())),
        ExprKind::Variable => Linear::scalar(RationalFunction::from_poly(QiPolynomial::x())),
        ExprKind::Derivative(k) => {
            if ctx != Context::Equation {
                return Err(syntax(ast.span, "the unknown y may only appear in an equation"));
            }
            let mut y = BTreeMap::new();
            y.insert(*k, constant(GaussianRational::one()));
            Linear { constant: RationalFunction::zero(), y }
        }
        ExprKind::Neg => eval(&kids[0], ctx)?.map(RationalFunction::neg),
        ExprKind::Add => eval(&kids[0], ctx)?.combine(eval(&kids[1], ctx)?, RationalFunction::add),
        ExprKind::Sub => eval(&kids[0], ctx)?.combine(eval(&kids[1], ctx)?, RationalFunction::sub),
        ExprKind::Mul => {
            let (a, b) = (eval(&kids[0], ctx)?, eval(&kids[1], ctx)?);
            match (a.y.is_empty(), b.y.is_empty()) {
                (true, _) => b.map(|v| v.mul(&a.constant)),
                (_, true) => a.map(|v| v.mul(&b.constant)),
                _ => return Err(syntax(ast.span, "equation is not linear in y")),
            }
        }
        ExprKind::Div => {
            let (a, b) = (eval(&kids[0], ctx)?, eval(&kids[1], ctx)?);
            if !b.y.is_empty() {
                return Err(syntax(kids[1].span, "cannot divide by an expression in y"));
            }
            if b.constant.is_zero() {
                return Err(syntax(kids[1].span, "division by zero"));
            }
            if ctx == Context::Polynomial && !b.constant.num().degree().is_some_and(|d| d == 0) {
                return Err(non_polynomial(kids[1].span, "the variable appears in a denominator"));
            }
            a.map(|v| v.div(&b.constant).unwrap())
        }
        ExprKind::Pow => {
            let base = eval(&kids[0], ctx)?;
            if !base.y.is_empty() {
                return Err(syntax(ast.span, "equation is not linear in y"));
            }
            let e = integer_exponent(&kids[1])
                .ok_or_else(|| non_polynomial(kids[1].span, "exponents must be integer literals"))?;
            if e.is_negative() && ctx == Context::Polynomial {
                return Err(non_polynomial(kids[1].span, "negative exponent"));
            }
            let mag = e.abs().to_u32().filter(|&m| m <= MAX_EXPONENT).ok_or_else(|| syntax(kids[1].span, "exponent too large"))?;
            let p = rf_pow(&base.constant, mag);
            let v = if e.is_negative() {
                constant(GaussianRational::one()).div(&p).ok_or_else(|| syntax(ast.span, "division by zero"))?
            } else {
                p
            };
            Linear::scalar(v)
        }
        ExprKind::Equation => {
            return Err(syntax(ast.span, "'=' is only allowed at the top level of an equation"));
        }
    })
}

fn scalar_value(text: &str, ctx: Context) -> Result<RationalFunction> {
    let ast = parse_expr(text, false)?;
    Ok(eval(&ast, ctx)?.constant)
}

/// Polynomial in `X` (also spelled `x` or `z`) over Q(i).
pub fn parse_poly(text: &str) -> Result<QiPolynomial> {
    let r = scalar_value(text, Context::Polynomial)?;
    // the denominator is monic, and constant by construction
    debug_assert!(r.is_polynomial());
    Ok(r.num().clone())
}

/// Quotient of polynomials; negative integer powers allowed.
pub fn parse_rational_function(text: &str) -> Result<RationalFunction> {
    scalar_value(text, Context::Rational)
}

/// Constant expression such as `17/12` or `3/2 - i`.
pub fn parse_qi(text: &str) -> Result<GaussianRational> {
    let ast = parse_expr(text, false)?;
    let r = eval(&ast, Context::Polynomial)?.constant;
    match r.num().degree() {
        None => Ok(GaussianRational::zero()),
        Some(0) => Ok(r.num().coeff(0)),
        Some(_) => Err(syntax(ast.span, "expected a constant")),
    }
}

/// Comma-separated list of constants, e.g. a path `0, 1/2 + i/2, 1`.
pub fn parse_qi_list(text: &str) -> Result<Vec<GaussianRational>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        out.push(parse_qi(part).map_err(|e| shift_span(e, offset))?);
        offset += part.len() + 1;
    }
    Ok(out)
}

fn shift_span(e: Error, by: usize) -> Error {
    match e {
        Error::Syntax { start, end, message } => Error::Syntax { start: start + by, end: end + by, message },
        Error::NonPolynomial { start, end, message } => Error::NonPolynomial { start: start + by, end: end + by, message },
        other => other,
    }
}

fn ode_from_equation(text: &str) -> Result<FuchsianODE> {
    let ast = parse_expr(text, true)?;
    let lin = match ast.kind {
        ExprKind::Equation => {
            eval(&ast.children[0], Context::Equation)?.combine(eval(&ast.children[1], Context::Equation)?, RationalFunction::sub)
        }
        _ => eval(&ast, Context::Equation)?,
    };
    if !lin.constant.is_zero() {
        return Err(syntax(ast.span, "equation must be homogeneous: every term needs a factor y, y', ..."));
    }
    let (&mu, lead) = lin.y.iter().next_back().ok_or_else(|| syntax(ast.span, "equation does not involve y"))?;
    if mu == 0 {
        return Err(syntax(ast.span, "equation must involve a derivative of y"));
    }
    let coeffs = (0..mu).map(|k| lin.y.get(&k).map_or_else(RationalFunction::zero, |v| v.div(lead).unwrap())).collect();
    FuchsianODE::new(coeffs)
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema { path, message: e.into_inner().to_string() }
    })
}

/// Equation text like `(1+X^2)*y'' + 2*X*y' = 0`, normalized to monic form,
/// or the JSON form written by serializing a [`FuchsianODE`].
pub fn parse_ode(text: &str) -> Result<FuchsianODE> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        ode_from_equation(text)
    }
}

/// JSON form written by serializing a [`GSeries`].
pub fn parse_series(text: &str) -> Result<GSeries> {
    from_json(text)
}

/// Polynomial from text, or from JSON `{"coeffs": [...]}`.
pub fn parse_poly_any(text: &str) -> Result<QiPolynomial> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        parse_poly(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> GaussianRational {
        GaussianRational::ratio(n, d)
    }

    #[test]
    fn polynomials() {
        assert_eq!(parse_poly("X^2 - 2").unwrap(), QiPolynomial::from_ints(&[-2, 0, 1]));
        let p = parse_poly("X^5 + X - 1/10").unwrap();
        assert_eq!(p.coeffs(), &[q(-1, 10), q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1)]);
        let p = parse_poly("(3/2 + i)*X + 7").unwrap();
        assert_eq!(p.coeffs(), &[q(7, 1), GaussianRational::from_ratios(3, 2, 1, 1)]);
        assert_eq!(parse_poly(" ( x - 1 ) ^ 2 ").unwrap(), QiPolynomial::from_ints(&[1, -2, 1]));
        assert_eq!(parse_poly("X/2 - X/2").unwrap(), QiPolynomial::zero());
        assert_eq!(parse_poly("-X^2").unwrap(), QiPolynomial::from_ints(&[0, 0, -1]));
    }

    #[test]
    fn polynomial_errors() {
        assert!(matches!(parse_poly("1/X"), Err(Error::NonPolynomial { start: 2, end: 3, .. })));
        assert!(matches!(parse_poly("X^-1"), Err(Error::NonPolynomial { start: 2, end: 4, .. })));
        assert!(matches!(parse_poly("X^(1/2)"), Err(Error::NonPolynomial { start: 2, end: 7, .. })));
        assert!(matches!(parse_poly("X^2 - 0.5"), Err(Error::Syntax { start: 6, end: 9, .. })));
        assert!(matches!(parse_poly("X/(1-1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("y + 1"), Err(Error::Syntax { start: 0, end: 1, .. })));
    }

    #[test]
    fn constants_and_lists() {
        assert_eq!(parse_qi("17/12").unwrap(), q(17, 12));
        assert_eq!(parse_qi("1/2 - i/3").unwrap(), GaussianRational::from_ratios(1, 2, -1, 3));
        assert_eq!(parse_qi("(1+i)^2").unwrap(), GaussianRational::from_ratios(0, 1, 2, 1));
        assert!(parse_qi("X").is_err());
        let l = parse_qi_list("0, 1/2 + i/2,1").unwrap();
        assert_eq!(l.len(), 3);
        assert!(matches!(parse_qi_list("0, 1/2, 0.5"), Err(Error::Syntax { start: 8, end: 11, .. })));
    }

    #[test]
    fn rational_functions() {
        let r = parse_rational_function("2*X/(1+X^2)").unwrap();
        assert_eq!(r.num(), &QiPolynomial::from_ints(&[0, 2]));
        assert_eq!(r.den(), &QiPolynomial::from_ints(&[1, 0, 1]));
        assert_eq!(parse_rational_function("X^-2").unwrap().den(), &QiPolynomial::from_ints(&[0, 0, 1]));
    }

    #[test]
    fn equations() {
        let ode = parse_ode("(1+X^2)*y'' + 2*X*y' = 0").unwrap();
        assert_eq!(ode.order(), 2);
        assert_eq!(ode.coeffs()[1], parse_rational_function("2*X/(1+X^2)").unwrap());
        assert!(ode.coeffs()[0].is_zero());
        let ode = parse_ode("y' = 0").unwrap();
        assert_eq!(ode.order(), 1);
        assert!(ode.coeffs()[0].is_zero());
        // both sides, and a leading coefficient that is not monic
        let ode = parse_ode("2*(1-z)*y' = y").unwrap();
        assert_eq!(ode.coeffs()[0], parse_rational_function("1/(2*z-2)").unwrap());
        assert!(matches!(parse_ode("y' = 1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_ode("y*y' = 0"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_ode("y = 0"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_ode("y'' - y'' + y = 0"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn ode_round_trips() {
        let ode = parse_ode("z*(1-z)*y'' + (1 - 3*z)*y' - y = 0").unwrap();
        assert_eq!(parse_ode(&ode.to_text()).unwrap(), ode);
        let j = serde_json::to_string(&ode).unwrap();
        let back = parse_ode(&j).unwrap();
        assert_eq!(back, ode);
        assert_eq!(serde_json::to_string(&back).unwrap(), j);
    }

    #[test]
    fn schema_errors_carry_paths() {
        match parse_series(r#"{"order": 1, "radius_hint": null, "coeffs": [{"re":["1","1"],"im":["0","1"]}, {"re":["1"],"im":["0","1"]}]}"#) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "coeffs[1].re"),
            other => panic!("{other:?}"),
        }
        match parse_ode(r#"{"order": 1, "coeffs": [{"num": {"coeffs": []}}]}"#) {
            Err(Error::Schema { path, .. }) => assert!(path.starts_with("coeffs[0]"), "{path}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_series(r#"{"order": 0, "radius_hint": 2, "coeffs": [], "extra": 1}"#), Err(Error::Schema { .. })));
    }

    fn arb_qi() -> impl Strategy<Value = GaussianRational> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| GaussianRational::from_ratios(a, b, c, d))
    }

    proptest! {
        #[test]
        fn series_json_round_trip(coeffs in proptest::collection::vec(arb_qi(), 1..12), hint in prop_oneof![Just(None), (1u32..100).prop_map(|h| Some(h as f64 / 7.0)), Just(Some(f64::INFINITY))]) {
            let s = GSeries::new(coeffs).with_radius_hint(hint);
            let j = serde_json::to_string(&s).unwrap();
            let back = parse_series(&j).unwrap();
            prop_assert_eq!(serde_json::to_string(&back).unwrap(), j);
            prop_assert_eq!(back, s);
        }

        #[test]
        fn poly_text_round_trip(coeffs in proptest::collection::vec(arb_qi(), 0..8)) {
            let p = QiPolynomial::new(coeffs);
            prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p.clone());
            let j = serde_json::to_string(&p).unwrap();
            prop_assert_eq!(parse_poly_any(&j).unwrap(), p);
        }
    }
}
