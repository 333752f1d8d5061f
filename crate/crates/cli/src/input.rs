//! Reading flag values: inline text or file paths, numbers, JSON arrays.

use num_complex::Complex64;
use serde_json::Value;

use gfunc::arith::{ComplexBall, GaussianRational};
use gfunc::parse::{parse_qi, parse_qi_list};

use crate::Failure;

/// The flag value itself, or the contents of the file it names.
pub fn inline_or_file(arg: &str) -> Result<String, Failure> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    let path = std::path::Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {arg}: {e}")))
    } else if arg.ends_with(".json") {
        Err(Failure::usage(format!("no such file: {arg}")))
    } else {
        Ok(arg.to_string())
    }
}

/// A positive real given as a decimal or as `p/q`.
pub fn positive_real(text: &str, what: &str) -> Result<f64, Failure> {
    let x = match text.split_once('/') {
        Some((p, q)) => p.trim().parse::<f64>().ok().zip(q.trim().parse::<f64>().ok()).map(|(p, q)| p / q),
        None => text.trim().parse::<f64>().ok(),
    };
    x.filter(|x| *x > 0.0 && x.is_finite()).ok_or_else(|| Failure::usage(format!("{what} must be a positive number, got {text:?}")))
}

pub fn require_positive(x: f64, what: &str) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::usage(format!("{what} must be positive and finite, got {x}")))
    }
}

/// `"re,im"` as floats.
pub fn complex_pair(text: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Failure::usage(format!("bad number {s:?} in {text:?}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Failure::usage(format!("expected \"re,im\", got {text:?}"))),
    }
}

/// `"re,im; re,im; ..."`.
pub fn complex_list(text: &str) -> Result<Vec<Complex64>, Failure> {
    text.split(';').filter(|s| !s.trim().is_empty()).map(complex_pair).collect()
}

pub fn qi(text: &str) -> Result<GaussianRational, Failure> {
    Ok(parse_qi(text)?)
}

pub fn qi_list(text: &str) -> Result<Vec<GaussianRational>, Failure> {
    Ok(parse_qi_list(text)?)
}

fn json_value(text: &str, what: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::usage(format!("{what}: invalid JSON: {e}")))
}

/// Exact values: a JSON array of Gaussian rational objects or of strings such as "3/4 - i".
pub fn exact_array(arg: &str, what: &str) -> Result<Vec<GaussianRational>, Failure> {
    let text = inline_or_file(arg)?;
    let Value::Array(items) = json_value(&text, what)? else {
        return Err(Failure::usage(format!("{what}: expected a JSON array")));
    };
    items
        .into_iter()
        .enumerate()
        .map(|(k, v)| match v {
            Value::String(s) => qi(&s),
            Value::Number(n) if n.is_i64() => Ok(GaussianRational::from_int(n.as_i64().unwrap())),
            other => serde_json::from_value(other).map_err(|e| Failure::usage(format!("{what}[{k}]: {e}"))),
        })
        .collect()
}

/// Coefficient balls from a series JSON, or a JSON array of numbers, strings or [re, im] pairs.
pub fn coefficient_balls(arg: &str, prec: u32) -> Result<Vec<ComplexBall>, Failure> {
    let text = inline_or_file(arg)?;
    let v = json_value(&text, "coeffs")?;
    if v.is_object() {
        let s = gfunc::parse::parse_series(&text)?;
        return Ok(s.coeffs().iter().map(|c| ComplexBall::from_qi(c, prec)).collect());
    }
    let Value::Array(items) = v else {
        return Err(Failure::usage("coeffs: expected a series object or an array"));
    };
    items
        .iter()
        .enumerate()
        .map(|(k, item)| match item {
            Value::Number(x) => Ok(ComplexBall::from_f64(x.as_f64().unwrap(), 0.0, prec)),
            Value::String(s) => Ok(ComplexBall::from_qi(&qi(s)?, prec)),
            Value::Array(p) if p.len() == 2 && p.iter().all(Value::is_number) => {
                Ok(ComplexBall::from_f64(p[0].as_f64().unwrap(), p[1].as_f64().unwrap(), prec))
            }
            _ => serde_json::from_value::<GaussianRational>(item.clone())
                .map(|q| ComplexBall::from_qi(&q, prec))
                .map_err(|_| Failure::usage(format!("coeffs[{k}]: expected a number, a string or [re, im]"))),
        })
        .collect()
}
