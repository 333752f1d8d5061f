//! `gfunc`: every pipeline of the library as a subcommand with JSON output.

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

/// Exit status for domain errors; usage errors exit with 2.
const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug, Serialize)]
#[command(name = "gfunc", version, about = "Exact G-series computations with certified ball enclosures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Truncation order of the power series.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
    pub order: u32,
    /// Working precision of ball arithmetic, in bits.
    #[arg(long, env = "GFUNC_PRECISION_BITS", default_value_t = 256, value_parser = clap::value_parser!(u32).range(16..=65536))]
    pub precision_bits: u32,
    /// Write the JSON document to this file instead of standard output.
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
    /// Seed for any generated test data; the computations are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RootArgs {
    /// Polynomial over Q(i), e.g. "X^2 - 2".
    #[arg(long)]
    pub poly: String,
    /// Approximate location "re,im" of the wanted root. Defaults to the root
    /// closest to the real axis, largest real part first.
    #[arg(long)]
    pub near: Option<String>,
    /// Target radius of convergence.
    #[arg(long = "R", default_value_t = 2.0)]
    #[serde(rename = "R")]
    pub r_target: f64,
    /// Include the full series in the output.
    #[arg(long)]
    pub emit_series: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
    Div,
    Hadamard,
    Reciprocal,
    Derivative,
    Antiderivative,
    Log1p,
    Eval,
    Radius,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SeriesArgs {
    #[arg(long, value_enum)]
    pub op: SeriesOp,
    /// Series JSON, inline or as a file path.
    #[arg(long)]
    pub a: String,
    /// Second operand for binary operations.
    #[arg(long)]
    pub b: Option<String>,
    /// Evaluation point for `eval`.
    #[arg(long)]
    pub at: Option<String>,
    /// Explicit tail ratio for `eval` when the series carries no radius hint.
    #[arg(long)]
    pub tail_ratio: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// An equation, a path and initial values at the start of the path.
#[derive(Args, Debug, Clone, Serialize)]
pub struct OdeInput {
    /// Equation text such as "(1+X^2)*y'' + 2*X*y' = 0", or its JSON form, inline or as a file path.
    #[arg(long)]
    pub ode: String,
    /// Comma-separated waypoints, e.g. "0, 1/2 + i/2, 1".
    #[arg(long)]
    pub path: String,
    /// Comma-separated exact values of f, f', ... at the start of the path.
    #[arg(long)]
    pub initial: String,
    /// Largest step as a fraction of the distance to the nearest singularity.
    #[arg(long, default_value = "1/2")]
    pub step_fraction: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ContinueArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ode: OdeInput,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConnectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ode: OdeInput,
    /// Center of the target basis; defaults to the end of the path.
    #[arg(long)]
    pub target: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WronskianArgs {
    #[arg(long)]
    pub ode: String,
    /// Center of the local basis.
    #[arg(long, default_value = "0")]
    pub center: String,
    /// Comma-separated points where the closed form is checked.
    #[arg(long)]
    pub points: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProfileArgs {
    #[arg(long)]
    pub ode: String,
    /// Ordinary point where the initial values are given.
    #[arg(long, default_value = "0")]
    pub start: String,
    #[arg(long)]
    pub initial: String,
    /// Singular point approached along the ray from `start`.
    #[arg(long)]
    pub zeta: String,
    /// Number of samples at distances |zeta - start| 2^-k.
    #[arg(long, default_value_t = 24)]
    pub samples: usize,
    #[arg(long, default_value = "1/2")]
    pub step_fraction: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffBuiltin {
    /// binomial(2n, n) / 4^n
    CentralBinomial,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AsymfitArgs {
    /// Coefficients: series JSON, or a JSON array of numbers or [re, im] pairs; inline or a file path.
    #[arg(long, required_unless_present = "builtin")]
    pub coeffs: Option<String>,
    /// Generate `order + 1` coefficients of a known sequence instead.
    #[arg(long, value_enum)]
    pub builtin: Option<CoeffBuiltin>,
    /// Semicolon-separated unimodular directions "re,im; re,im".
    #[arg(long)]
    pub candidates: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AsympredictArgs {
    /// Profile JSON {"rho", "sigma", "tau", "fronts"}, inline or as a file path.
    #[arg(long)]
    pub profile: String,
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AmplitudesArgs {
    /// Comma-separated exact directions omega_j.
    #[arg(long)]
    pub omegas: String,
    /// Comma-separated exact amplitudes used to generate the samples.
    #[arg(long, conflicts_with = "samples")]
    pub kappas: Option<String>,
    /// JSON array of exact samples s_n, s_(n+1), ..., inline or as a file path.
    #[arg(long, required_unless_present = "kappas")]
    pub samples: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub window_start: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AperyArgs {
    /// Numerator series U (JSON). Without U and V, runs the zeta(3) demonstration.
    #[arg(long, requires = "v")]
    pub u: Option<String>,
    /// Denominator series V (JSON).
    #[arg(long, requires = "u")]
    pub v: Option<String>,
    /// Rate for the normalized error check; defaults to the pair's own rate.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Terms of the zeta(3) sequences in the demonstration.
    #[arg(long, default_value_t = 200)]
    pub terms: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MuboundArgs {
    /// Denominator growth constant.
    #[arg(long = "C")]
    #[serde(rename = "C")]
    pub c: f64,
    /// Error decay rate r < 1.
    #[arg(long = "r")]
    pub r: f64,
    /// Approximant growth R > 1.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub big_r: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceBuiltin {
    /// 1 / lcm(1..n)^3
    LcmCubed,
    /// Apery's rational approximations of zeta(3), numerators a_n
    AperyA,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DengrowthArgs {
    /// JSON array of exact values, inline or as a file path.
    #[arg(long, required_unless_present = "builtin")]
    pub sequence: Option<String>,
    #[arg(long, value_enum)]
    pub builtin: Option<SequenceBuiltin>,
    /// Length of a builtin sequence.
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Root of a polynomial as the value at 1 of a series.
    Root(RootArgs),
    /// Logarithm of an algebraic number as a sum of series values.
    Log(RootArgs),
    /// Arithmetic on series given as JSON.
    Series(SeriesArgs),
    /// Analytic continuation of a solution along a path.
    Continue(ContinueArgs),
    /// Connection constants of a solution in a local basis.
    Connect(ConnectArgs),
    /// Wronskian of the local basis: Abel check and closed form.
    Wronskian(WronskianArgs),
    /// Leading singular behaviour of a solution at a singular point.
    Profile(ProfileArgs),
    /// Fit a singular profile to coefficients.
    Asymfit(AsymfitArgs),
    /// Coefficients predicted by a singular profile.
    Asympredict(AsympredictArgs),
    /// Amplitudes of a sum of geometric sequences.
    Amplitudes(AmplitudesArgs),
    /// Rational approximations from partial sums.
    Apery(AperyArgs),
    /// Upper bound on the irrationality exponent.
    Mubound(MuboundArgs),
    /// Growth rate of common denominators.
    Dengrowth(DengrowthArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Root(_) => "root",
            Command::Log(_) => "log",
            Command::Series(_) => "series",
            Command::Continue(_) => "continue",
            Command::Connect(_) => "connect",
            Command::Wronskian(_) => "wronskian",
            Command::Profile(_) => "profile",
            Command::Asymfit(_) => "asymfit",
            Command::Asympredict(_) => "asympredict",
            Command::Amplitudes(_) => "amplitudes",
            Command::Apery(_) => "apery",
            Command::Mubound(_) => "mubound",
            Command::Dengrowth(_) => "dengrowth",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Root(a) | Command::Log(a) => &a.common,
            Command::Series(a) => &a.common,
            Command::Continue(a) => &a.common,
            Command::Connect(a) => &a.common,
            Command::Wronskian(a) => &a.common,
            Command::Profile(a) => &a.common,
            Command::Asymfit(a) => &a.common,
            Command::Asympredict(a) => &a.common,
            Command::Amplitudes(a) => &a.common,
            Command::Apery(a) => &a.common,
            Command::Mubound(a) => &a.common,
            Command::Dengrowth(a) => &a.common,
        }
    }
}

/// Failure of a run: usage errors come from malformed inputs, domain errors
/// from the computation itself.
pub enum Failure {
    Usage { code: String, message: String },
    Domain(gfunc::Error),
}

impl From<gfunc::Error> for Failure {
    fn from(e: gfunc::Error) -> Self {
        use gfunc::Error as E;
        match e {
            E::Syntax { .. } | E::NonPolynomial { .. } | E::Schema { .. } => Failure::Usage { code: e.code().into(), message: e.to_string() },
            other => Failure::Domain(other),
        }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure::Usage { code: "usage_error".into(), message: message.into() }
    }
}

fn emit(common: &Common, doc: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("JSON values always serialize") + "\n";
    match &common.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let config = serde_json::to_value(&cli.command).expect("config serializes");
    let (doc, status) = match commands::dispatch(&cli.command) {
        Ok(result) => (json!({ "schema": format!("gfunc.{name}/1"), "config": config, "result": result }), 0),
        Err(f) => {
            let (code, message, status) = match f {
                Failure::Usage { code, message } => (code, message, EXIT_USAGE),
                Failure::Domain(e) => (e.code().to_string(), e.to_string(), EXIT_DOMAIN),
            };
            eprintln!("gfunc {name}: {message}");
            (json!({ "schema": "gfunc.error/1", "config": config, "error": { "code": code, "message": message } }), status)
        }
    };
    if let Err(e) = emit(cli.command.common(), &doc) {
        eprintln!("gfunc: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(status)
}
