//! One function per subcommand; each returns the `result` JSON value.

use num_complex::Complex64;
use serde_json::{json, Value};

use gfunc::algroots::build_root_series;
use gfunc::apery::{self, LimitSchedule, MuBoundInput};
use gfunc::arith::{complex_roots, BallJson, ComplexBall, GaussianRational, QiPolynomial};
use gfunc::asymptotics::{self, FitOptions, SingularProfile};
use gfunc::logvalues::{log_algebraic, series_log1p};
use gfunc::ode::{self, FuchsianODE, Path};
use gfunc::parse::{parse_ode, parse_poly_any, parse_series};
use gfunc::series::GSeries;

use crate::input::*;
use crate::*;

type Out = Result<Value, Failure>;

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn ball(b: &ComplexBall) -> Value {
    to_json(&BallJson::from(b))
}

pub fn dispatch(cmd: &Command) -> Out {
    match cmd {
        Command::Root(a) => root(a),
        Command::Log(a) => log(a),
        Command::Series(a) => series(a),
        Command::Continue(a) => continue_path(a),
        Command::Connect(a) => connect(a),
        Command::Wronskian(a) => wronskian(a),
        Command::Profile(a) => profile(a),
        Command::Asymfit(a) => asymfit(a),
        Command::Asympredict(a) => asympredict(a),
        Command::Amplitudes(a) => amplitudes(a),
        Command::Apery(a) => apery_cmd(a),
        Command::Mubound(a) => mubound(a),
        Command::Dengrowth(a) => dengrowth(a),
    }
}

/// The root near `near`, or else the one closest to the real axis with the
/// largest real part.
fn select_root(q: &QiPolynomial, near: Option<&str>, prec: u32) -> Result<ComplexBall, Failure> {
    let roots = complex_roots(q, prec)?;
    if roots.is_empty() {
        return Err(Failure::usage("the polynomial has no roots"));
    }
    let key = |b: &ComplexBall| b.to_complex64();
    let chosen = match near {
        Some(t) => {
            let p = complex_pair(t)?;
            roots.iter().min_by(|x, y| (key(&x.ball) - p).norm().total_cmp(&(key(&y.ball) - p).norm()))
        }
        None => roots.iter().min_by(|x, y| {
            let (a, b) = (key(&x.ball), key(&y.ball));
            let snap = |v: f64| (v.abs() * 1e12).round();
            snap(a.im).total_cmp(&snap(b.im)).then(b.re.total_cmp(&a.re)).then(b.im.total_cmp(&a.im))
        }),
    };
    let r = chosen.unwrap();
    if r.multiplicity > 1 {
        return Err(Failure::Domain(gfunc::Error::InvalidArgument("the selected root is not simple".into())));
    }
    Ok(r.ball.clone())
}

fn poly_arg(text: &str) -> Result<QiPolynomial, Failure> {
    Ok(parse_poly_any(&inline_or_file(text)?)?)
}

fn root(a: &RootArgs) -> Out {
    let c = &a.common;
    let r = require_positive(a.r_target, "R")?;
    let q = poly_arg(&a.poly)?;
    let alpha = select_root(&q, a.near.as_deref(), c.precision_bits)?;
    let rs = build_root_series(&q, &alpha, r, c.order as usize, c.precision_bits)?;
    eprintln!("root of {}: u = {}, radius {}, value {}", q, rs.u, rs.radius, rs.value);
    let mut out = json!({
        "poly": q.to_string(),
        "u": to_json(&rs.u),
        "u_text": rs.u.to_string(),
        "radius": to_json(&rs.radius),
        "target_root": ball(&rs.target_root),
        "value": ball(&rs.value),
        "functional_equation": rs.verify_functional_equation(),
    });
    if a.emit_series {
        out["series"] = to_json(&rs.phi);
    }
    Ok(out)
}

fn log(a: &RootArgs) -> Out {
    let c = &a.common;
    let r = require_positive(a.r_target, "R")?;
    let q = poly_arg(&a.poly)?;
    let alpha = select_root(&q, a.near.as_deref(), c.precision_bits)?;
    let lr = log_algebraic(&q, &alpha, r, c.order as usize, c.precision_bits)?;
    eprintln!("log of root of {}: m = {}, {} components, value {}", q, lr.m, lr.components.len(), lr.value);
    let components: Vec<Value> = lr
        .components
        .iter()
        .map(|comp| {
            let mut v = json!({
                "label": comp.label,
                "branch": comp.branch,
                "radius_hint": comp.series.radius_hint().map(|h| if h.is_finite() { json!(h) } else { json!("inf") }),
                "value": ball(&comp.value),
            });
            if a.emit_series {
                v["series"] = to_json(&comp.series);
            }
            v
        })
        .collect();
    Ok(json!({
        "poly": q.to_string(),
        "root": ball(&alpha),
        "u": to_json(&lr.u),
        "u_text": lr.u.to_string(),
        "m": lr.m,
        "order_used": lr.order_used,
        "components": components,
        "value": ball(&lr.value),
        "exp_consistent": lr.exp_consistent,
    }))
}

fn series_arg(text: &str) -> Result<GSeries, Failure> {
    Ok(parse_series(&inline_or_file(text)?)?)
}

fn series(a: &SeriesArgs) -> Out {
    use SeriesOp::*;
    let prec = a.common.precision_bits;
    let f = series_arg(&a.a)?;
    let second = || -> Result<GSeries, Failure> {
        let b = a.b.as_deref().ok_or_else(|| Failure::usage("this operation needs --b"))?;
        series_arg(b)
    };
    let s = match a.op {
        Add => f.add(&second()?),
        Sub => f.sub(&second()?),
        Mul => f.mul(&second()?),
        Div => f.divide(&second()?)?,
        Hadamard => f.hadamard(&second()?),
        Reciprocal => f.reciprocal()?,
        Derivative => f.differentiate(),
        Antiderivative => f.antiderivative(),
        Log1p => series_log1p(&f)?,
        Eval => {
            let at = qi(a.at.as_deref().ok_or_else(|| Failure::usage("eval needs --at"))?)?;
            let v = f.evaluate_qi(&at, prec, a.tail_ratio)?;
            return Ok(json!({ "at": to_json(&at), "value": ball(&v) }));
        }
        Radius => return Ok(json!({ "radius_estimate": f.radius_estimate()? })),
    };
    Ok(json!({ "series": to_json(&s) }))
}

fn ode_arg(text: &str) -> Result<FuchsianODE, Failure> {
    Ok(parse_ode(&inline_or_file(text)?)?)
}

fn exact_balls(list: &[GaussianRational], prec: u32) -> Vec<ComplexBall> {
    list.iter().map(|q| ComplexBall::from_qi(q, prec)).collect()
}

struct Prepared {
    ode: FuchsianODE,
    path: Path,
    initial: Vec<ComplexBall>,
    step_fraction: f64,
}

fn prepare(o: &OdeInput, prec: u32) -> Result<Prepared, Failure> {
    let ode = ode_arg(&o.ode)?;
    let path = Path::new(qi_list(&o.path)?);
    let initial = exact_balls(&qi_list(&o.initial)?, prec);
    let step_fraction = positive_real(&o.step_fraction, "step fraction")?;
    Ok(Prepared { ode, path, initial, step_fraction })
}

fn continue_path(a: &ContinueArgs) -> Out {
    let c = &a.common;
    let p = prepare(&a.ode, c.precision_bits)?;
    let values = ode::continue_along_path(&p.ode, &p.initial, &p.path, c.order as usize, p.step_fraction)?;
    eprintln!("continued {} values to {}", values.len(), p.path.end());
    Ok(json!({
        "equation": p.ode.to_text(),
        "end": to_json(p.path.end()),
        "values": values.iter().map(ball).collect::<Vec<_>>(),
    }))
}

fn connect(a: &ConnectArgs) -> Out {
    let c = &a.common;
    let p = prepare(&a.ode, c.precision_bits)?;
    let center = match &a.target {
        Some(t) => qi(t)?,
        None => p.path.end().clone(),
    };
    let basis = ode::local_basis(&p.ode, &center, c.order as usize)?;
    let res = ode::connection_constants(&p.ode, &p.initial, &p.path, &basis, c.order as usize, p.step_fraction)?;
    eprintln!("connection constants at {center}: {}", res.constants.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "));
    Ok(json!({
        "equation": p.ode.to_text(),
        "target_center": to_json(&center),
        "target_radius": basis.radius,
        "connection": to_json(&res),
    }))
}

fn wronskian(a: &WronskianArgs) -> Out {
    let c = &a.common;
    let ode = ode_arg(&a.ode)?;
    let center = qi(&a.center)?;
    let points = qi_list(&a.points)?;
    let basis = ode::local_basis(&ode, &center, c.order as usize)?;
    let fit = ode::wronskian_certify(&ode, &basis, &points)?;
    eprintln!("Abel identity holds through {} coefficients; nu = {}", fit.abel_terms, fit.nu);
    Ok(json!({ "equation": ode.to_text(), "center": to_json(&center), "fit": to_json(&fit) }))
}

fn profile(a: &ProfileArgs) -> Out {
    let c = &a.common;
    let ode = ode_arg(&a.ode)?;
    let start = qi(&a.start)?;
    let zeta = qi(&a.zeta)?;
    let initial = exact_balls(&qi_list(&a.initial)?, c.precision_bits);
    let sf = positive_real(&a.step_fraction, "step fraction")?;
    let samples = ode::sample_toward(&ode, &initial, &start, &zeta, a.samples, c.order as usize, sf)?;
    let fit = ode::singular_profile(&samples, &zeta)?;
    eprintln!("profile at {zeta}: sigma = {}, tau = {:?} ({})", fit.sigma, fit.tau.as_ref().map(|t| t.to_string()), fit.tau_raw);
    Ok(json!({ "equation": ode.to_text(), "zeta": to_json(&zeta), "fit": to_json(&fit) }))
}

fn central_binomial(count: usize) -> Vec<GaussianRational> {
    let mut c = GaussianRational::one();
    (0..count)
        .map(|n| {
            let out = c.clone();
            c = &c * &GaussianRational::ratio(2 * n as i64 + 1, 2 * n as i64 + 2);
            out
        })
        .collect()
}

fn asymfit(a: &AsymfitArgs) -> Out {
    let c = &a.common;
    let coeffs = match (&a.coeffs, a.builtin) {
        (Some(text), _) => coefficient_balls(text, c.precision_bits)?,
        (None, Some(CoeffBuiltin::CentralBinomial)) => exact_balls(&central_binomial(c.order as usize + 1), c.precision_bits),
        (None, None) => return Err(Failure::usage("give --coeffs or --builtin")),
    };
    let candidates = a.candidates.as_deref().map(complex_list).transpose()?;
    let fit = asymptotics::fit_profile(&coeffs, &FitOptions { candidates })?;
    eprintln!("fit: rho = {}, sigma = {}, tau = {}", fit.rho, fit.sigma, fit.tau);
    Ok(json!({ "count": coeffs.len(), "profile": to_json(&fit) }))
}

fn asympredict(a: &AsympredictArgs) -> Out {
    let text = inline_or_file(&a.profile)?;
    let profile: SingularProfile = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("profile: {e}")))?;
    if a.from > a.to {
        return Err(Failure::usage("--from exceeds --to"));
    }
    let values = asymptotics::predict_coeffs(&profile, a.from..=a.to)?;
    let values: Vec<Value> = values
        .iter()
        .zip(a.from..)
        .map(|(v, n)| {
            let z: Complex64 = v.to_complex64();
            json!({ "n": n, "value": ball(v), "approx": [z.re, z.im] })
        })
        .collect();
    Ok(json!({ "coefficients": values }))
}

fn amplitudes(a: &AmplitudesArgs) -> Out {
    let prec = a.common.precision_bits;
    let omegas = qi_list(&a.omegas)?;
    let t = omegas.len() as u32;
    let samples: Vec<GaussianRational> = match (&a.kappas, &a.samples) {
        (Some(k), _) => {
            let kappas = qi_list(k)?;
            if kappas.len() != omegas.len() {
                return Err(Failure::usage("--kappas and --omegas differ in length"));
            }
            (a.window_start..a.window_start + t)
                .map(|n| kappas.iter().zip(&omegas).fold(GaussianRational::zero(), |acc, (k, w)| &acc + &(k * &w.pow(n))))
                .collect()
        }
        (None, Some(s)) => exact_array(s, "samples")?,
        (None, None) => return Err(Failure::usage("give --kappas or --samples")),
    };
    let amp = asymptotics::recover_amplitudes_exact(&omegas, a.window_start, &samples, prec)?;
    let det0 = asymptotics::window_determinant_exact(&omegas, 0);
    let detn = asymptotics::window_determinant_exact(&omegas, a.window_start);
    eprintln!("amplitudes recovered ({})", if amp.exact { "exact" } else { "ball" });
    Ok(json!({
        "amplitudes": to_json(&amp),
        "det_norm_0": det0.norm().to_string(),
        "det_norm_n": detn.norm().to_string(),
        "det_norms_equal": det0.norm() == detn.norm(),
    }))
}

fn apery_cmd(a: &AperyArgs) -> Out {
    let prec = a.common.precision_bits;
    match (&a.u, &a.v) {
        (Some(u), Some(v)) => {
            let pair = apery::partial_sum_pair(&series_arg(u)?, &series_arg(v)?, prec)?;
            let rate = a.rate.map(|r| require_positive(r, "rate")).transpose()?;
            let report = apery::limit_check(&pair, &LimitSchedule { rate, ..Default::default() });
            eprintln!("limit checks {}", if report.pass() { "pass" } else { "fail" });
            let n = pair.a.len();
            Ok(json!({
                "terms": n,
                "target": ball(&pair.target),
                "error_rate": if pair.error_rate.is_finite() { json!(pair.error_rate) } else { json!("inf") },
                "last": { "a": to_json(&pair.a[n - 1]), "b": to_json(&pair.b[n - 1]) },
                "pass": report.pass(),
                "report": to_json(&report),
            }))
        }
        _ => {
            let demo = apery::apery_demo(a.terms)?;
            eprintln!("zeta(3) approximant after {} terms: {}", demo.terms, demo.approximant);
            Ok(json!({ "demo": to_json(&demo) }))
        }
    }
}

fn mubound(a: &MuboundArgs) -> Out {
    let inp = MuBoundInput { c: a.c, r: a.r, big_r: a.big_r };
    let b = apery::mu_bound(&inp).map_err(|e| match e {
        gfunc::Error::InvalidArgument(m) => Failure::usage(m),
        other => Failure::Domain(other),
    })?;
    eprintln!("{b:?}");
    Ok(json!({ "input": to_json(&inp), "bound": to_json(&b) }))
}

fn dengrowth(a: &DengrowthArgs) -> Out {
    let x = match (&a.sequence, a.builtin) {
        (Some(s), _) => exact_array(s, "sequence")?,
        (None, Some(SequenceBuiltin::LcmCubed)) => apery::reciprocal_lcm_powers(a.n + 1, 3),
        (None, Some(SequenceBuiltin::AperyA)) => {
            apery::apery_zeta3_sequences(a.n + 1).0.into_iter().map(GaussianRational::from_real).collect()
        }
        (None, None) => return Err(Failure::usage("give --sequence or --builtin")),
    };
    let slope = apery::denominator_growth(&x)?;
    eprintln!("log D_n grows like {slope:.6} n (C = {:.6})", slope.exp());
    Ok(json!({ "terms": x.len(), "slope": slope, "C": slope.exp() }))
}
