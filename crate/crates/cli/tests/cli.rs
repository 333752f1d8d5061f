use std::process::{Command, Output};

use serde_json::Value;

fn gfunc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfunc")).args(args).env_remove("GFUNC_PRECISION_BITS").output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn ball_mid(v: &Value) -> f64 {
    v["re"].as_str().unwrap().parse().unwrap()
}

const ARCTAN: &str = "(1+X^2)*y'' + 2*X*y' = 0";

#[test]
fn root_sqrt_two() {
    let out = gfunc(&["root", "--poly", "X^2-2", "--R", "20", "--order", "64"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["schema"], "gfunc.root/1");
    assert_eq!(v["config"]["order"], 64);
    assert_eq!(v["config"]["R"], 20.0);
    assert_eq!(v["result"]["u_text"], "17/12");
    assert_eq!(v["result"]["radius"]["kind"], "exact");
    assert_eq!(v["result"]["radius"]["value"], "289");
    assert!(v["result"]["value"]["re"].as_str().unwrap().starts_with("1.41421356237309504880"));
    assert!(v["result"]["value"]["err"].as_f64().unwrap() < 1e-30);
    assert_eq!(v["result"]["functional_equation"], true);
}

#[test]
fn mubound_example() {
    let out = gfunc(&["mubound", "--C", "20.0855", "--r", "0.0294373", "--R", "33.9706"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["result"]["bound"]["kind"], "bound");
    assert!((v["result"]["bound"]["mu"].as_f64().unwrap() - 13.4178).abs() < 1e-4);
    let out = gfunc(&["mubound", "--C", "40", "--r", "0.03", "--R", "33"]);
    assert_eq!(json_of(&out)["result"]["bound"]["kind"], "no_conclusion");
}

#[test]
fn series_product_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let one = r#"{"re":["1","1"],"im":["0","1"]}"#;
    let zero = r#"{"re":["0","1"],"im":["0","1"]}"#;
    let minus = r#"{"re":["-1","1"],"im":["0","1"]}"#;
    let ones = format!(r#"{{"order":3,"radius_hint":1,"coeffs":[{one},{one},{one},{one}]}}"#);
    let oneminus = format!(r#"{{"order":3,"radius_hint":"inf","coeffs":[{one},{minus},{zero},{zero}]}}"#);
    let (a, b) = (dir.path().join("ones.json"), dir.path().join("oneminus.json"));
    std::fs::write(&a, ones).unwrap();
    std::fs::write(&b, oneminus).unwrap();
    let out = gfunc(&["series", "--op", "mul", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()]);
    assert!(out.status.success());
    let coeffs = json_of(&out)["result"]["series"]["coeffs"].clone();
    let expect: Value = serde_json::from_str(&format!("[{one},{zero},{zero},{zero}]")).unwrap();
    assert_eq!(coeffs, expect);
}

#[test]
fn arctan_connection() {
    let out = gfunc(&["connect", "--ode", ARCTAN, "--path", "0, 1/2", "--initial", "0, 1", "--target", "1", "--order", "128"]);
    assert!(out.status.success());
    let c = &json_of(&out)["result"]["connection"]["constants"][0];
    assert!((ball_mid(c) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    assert!(c["err"].as_f64().unwrap() < 1e-12);
}

#[test]
fn arctan_wronskian() {
    let out = gfunc(&["wronskian", "--ode", ARCTAN, "--points", "1/4, -1/3, 1/5 + i/5", "--order", "128"]);
    assert!(out.status.success());
    let fit = &json_of(&out)["result"]["fit"];
    assert!((ball_mid(&fit["nu"]) - 1.0).abs() < 1e-20);
    let exps: Vec<&str> = fit["exponents"].as_array().unwrap().iter().map(|e| e["exponent"].as_str().unwrap()).collect();
    assert_eq!(exps, ["1", "1"]);
}

#[test]
fn exit_codes() {
    // malformed inputs are usage errors
    let out = gfunc(&["root", "--poly", "X^2 - 0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["schema"], "gfunc.error/1");
    assert_eq!(v["error"]["code"], "syntax_error");
    assert!(!out.stderr.is_empty());
    assert_eq!(gfunc(&["root", "--poly", "X^2-2", "--order", "0"]).status.code(), Some(2));
    assert_eq!(gfunc(&["bogus"]).status.code(), Some(2));
    // a path through a singularity is a domain error
    let out = gfunc(&["continue", "--ode", ARCTAN, "--path", "0, i", "--initial", "0, 1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"]["code"], "singular_center");
    let out = gfunc(&["asympredict", "--profile", r#"{"rho":1,"sigma":0,"tau":2}"#, "--from", "2", "--to", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"]["code"], "degenerate_gamma");
}

#[test]
fn deterministic_output() {
    let args = ["log", "--poly", "X-2", "--R", "10", "--order", "96"];
    let (a, b) = (gfunc(&args), gfunc(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert!((ball_mid(&v["result"]["value"]) - std::f64::consts::LN_2).abs() < 1e-15);
    assert_eq!(v["result"]["exp_consistent"], true);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_gfunc"))
        .args(["root", "--poly", "X^2-2", "--R", "20", "--order", "24"])
        .env("GFUNC_PRECISION_BITS", "96")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["config"]["precision_bits"], 96);
    assert!(v["result"]["value"]["err"].as_f64().unwrap() > 1e-40);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = gfunc(&["dengrowth", "--builtin", "lcm-cubed", "--n", "400", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema"], "gfunc.dengrowth/1");
    assert!((v["result"]["slope"].as_f64().unwrap() - 3.0).abs() < 0.3);
}

#[test]
fn amplitudes_and_fits() {
    let out = gfunc(&["amplitudes", "--omegas", "1, -1, i, -i", "--kappas", "1/2, 1/4, -1/8, 3/16", "--window-start", "41"]);
    assert!(out.status.success());
    let r = &json_of(&out)["result"];
    assert_eq!(r["amplitudes"]["exact"], true);
    assert_eq!(r["det_norms_equal"], true);
    assert!((ball_mid(&r["amplitudes"]["kappas"][3]) - 0.1875).abs() < 1e-30);

    let out = gfunc(&["asymfit", "--builtin", "central-binomial", "--order", "1024", "--precision-bits", "128"]);
    assert!(out.status.success());
    let p = &json_of(&out)["result"]["profile"];
    assert!((p["rho"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert!((p["tau"].as_f64().unwrap() + 0.5).abs() < 0.02);

    let out = gfunc(&["profile", "--ode", "(1-z)*y' - y = 0", "--initial", "1", "--zeta", "1", "--order", "64"]);
    assert!(out.status.success());
    let fit = &json_of(&out)["result"]["fit"];
    assert_eq!(fit["tau"], "-1");
    assert_eq!(fit["sigma"], 0);
}

#[test]
fn apery_runs() {
    let out = gfunc(&["apery", "--terms", "120"]);
    assert!(out.status.success());
    let d = &json_of(&out)["result"]["demo"];
    assert!(d["approximant"].as_str().unwrap().starts_with("1.2020569031595942"));
    assert!((d["mu"]["mu"].as_f64().unwrap() - 13.41782).abs() < 1e-4);
}
