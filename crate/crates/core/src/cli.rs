//! Command-line front end: one subcommand per evaluation or identity check,
//! with JSON, CSV or plain-text output.
//!
//! Every run is wrapped in an [`Envelope`] carrying the schema version. The
//! CSV summary has the frozen columns in [`SUMMARY_COLUMNS`]; table-producing
//! subcommands (`jacobi-connect`, `ho-polys`, `ho-connect`, `sign-scan`,
//! `contract`) emit their long-format table instead.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
//! domain error.

use crate::error::Error;
use crate::heckman_opdam::{
    contraction_check, ho_connection, sign_scan, HoFamily, MultiplicityBC, MAX_CONDITION,
};
use crate::hypergeom::{bessel_b, hyp0f1, MultiplicityB, DEFAULT_MAX_WEIGHT};
use crate::integrate::{IntegrationSpec, SelbergParams};
use crate::jack::{jack_c, Partition};
use crate::rankone::{jacobi_connection, sonine_1d_with_tol, xu_kernel_check, RANK_ONE_TOL};
use crate::report::{VerificationReport, SCHEMA_VERSION};
use crate::selberg::{selberg_in, sigma_classify};
use crate::verify::{
    classify_and_report, probe_integrability, verify_kadell, verify_selberg, verify_sonine_0f1,
    verify_sonine_bessel_b,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SONINE_OUTPUT_DIR";

/// Columns of the CSV summary, one row per report.
pub const SUMMARY_COLUMNS: [&str; 12] = [
    "schema",
    "command",
    "label",
    "passed",
    "value_re",
    "value_im",
    "reference_re",
    "reference_im",
    "abs_residual",
    "rel_residual",
    "tolerance",
    "runtime_ms",
];

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Xu intertwiner kernel check tolerance.
const XU_TOL: f64 = 1e-7;

#[derive(Parser, Debug, Clone)]
#[command(name = "sonine", version, about = "Type-B Bessel functions, Sonine formulas and connection coefficients")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Output file; defaults to standard output or `$SONINE_OUTPUT_DIR/<command>.<ext>`.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for Monte-Carlo methods.
    #[arg(long, default_value_t = 20240229, global = true)]
    pub seed: u64,
    /// Override the pass/fail tolerance.
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
    /// Drop the timestamp and zero all runtimes.
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Pretty => "txt",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMethod {
    GaussJacobi,
    GaussLegendre,
    Trapezoid,
    MonteCarlo,
}

#[derive(Args, Debug, Clone)]
pub struct Quad {
    #[arg(long, value_enum, default_value_t = QuadMethod::GaussJacobi)]
    pub method: QuadMethod,
    /// Nodes per axis for deterministic rules.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=2048))]
    pub nodes: Option<u32>,
    #[arg(long, default_value_t = IntegrationSpec::DEFAULT_SAMPLES, value_parser = samples)]
    pub samples: usize,
}

impl Quad {
    fn spec(&self, seed: u64, default_nodes: usize) -> IntegrationSpec {
        let nodes = self.nodes.map_or(default_nodes, |v| v as usize);
        match self.method {
            QuadMethod::GaussJacobi => IntegrationSpec::gauss_jacobi(nodes, 0.0, 0.0),
            QuadMethod::GaussLegendre => IntegrationSpec::gauss_legendre(nodes),
            QuadMethod::Trapezoid => IntegrationSpec::trapezoid(nodes),
            QuadMethod::MonteCarlo => IntegrationSpec::monte_carlo(self.samples, seed),
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Jack polynomial C_λ^α at a point.
    Jack {
        #[arg(long, value_parser = partition)]
        lam: Partition,
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, value_parser = complex, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<Complex64>,
    },
    /// Truncated ₀F₁^α(μ; z, w).
    Hyp0f1 {
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        mu: Complex64,
        #[arg(long, value_parser = complex, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<Complex64>,
        /// Defaults to all ones.
        #[arg(long, value_parser = complex, value_delimiter = ',', allow_hyphen_values = true)]
        w: Vec<Complex64>,
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT, value_parser = clap::value_parser!(u32).range(0..=40))]
        max_weight: u32,
    },
    /// Type-B Bessel function J_k^B(z, w).
    BesselB {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        k1: Complex64,
        #[arg(long, value_parser = positive)]
        k2: f64,
        #[arg(long, value_parser = complex, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<Complex64>,
        #[arg(long, value_parser = complex, value_delimiter = ',', allow_hyphen_values = true)]
        w: Vec<Complex64>,
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT, value_parser = clap::value_parser!(u32).range(0..=40))]
        max_weight: u32,
    },
    /// Closed-form Selberg integral, optionally checked by quadrature.
    Selberg {
        #[arg(long, value_parser = rank)]
        n: usize,
        #[arg(long, value_parser = nonnegative)]
        kappa: f64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        mu: Complex64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        nu: Complex64,
        /// Compare against tensor quadrature.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        quad: Quad,
    },
    /// Jack moment of the Selberg density against its Pochhammer ratio.
    Kadell {
        #[arg(long, value_parser = rank)]
        n: usize,
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, value_parser = partition)]
        lam: Partition,
        #[command(flatten)]
        quad: Quad,
    },
    /// Sonine formula for ₀F₁^α.
    #[command(name = "sonine-0f1")]
    Sonine0f1 {
        #[arg(long, value_parser = positive)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, value_parser = complex, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<Complex64>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Sonine formula for J_k^B with the density f_{k,h}.
    SonineB {
        #[arg(long, value_parser = nonnegative)]
        k1: f64,
        #[arg(long, value_parser = positive)]
        k2: f64,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xi: Vec<f64>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Position of h relative to Σ(k₂).
    Sigma {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        h: Complex64,
        #[arg(long, value_parser = positive)]
        k2: f64,
        #[arg(long, value_parser = rank)]
        n: usize,
    },
    /// Boundary integrability of the Sonine density.
    Probe {
        #[arg(long, value_parser = complex, allow_hyphen_values = true, default_value = "0")]
        k1: Complex64,
        #[arg(long, value_parser = positive)]
        k2: f64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        h: Complex64,
        #[arg(long, value_parser = rank)]
        n: usize,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(6..=40))]
        layers: u32,
    },
    /// Σ-membership, pole status and probe together.
    Classify {
        #[arg(long, value_parser = complex, allow_hyphen_values = true, default_value = "0")]
        k1: Complex64,
        #[arg(long, value_parser = positive)]
        k2: f64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        h: Complex64,
        #[arg(long, value_parser = rank)]
        n: usize,
    },
    /// Classical one-variable Sonine formula.
    #[command(name = "rank1-sonine")]
    Rank1Sonine {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, value_parser = positive)]
        b: f64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z: Complex64,
        #[command(flatten)]
        quad: Quad,
    },
    /// Rank-one intertwiner applied to the Dunkl kernel.
    Xu {
        #[arg(long, value_parser = nonnegative)]
        k: f64,
        #[arg(long, value_parser = positive)]
        kp: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z: Complex64,
        #[command(flatten)]
        quad: Quad,
    },
    /// Connection coefficients between two Jacobi families.
    JacobiConnect {
        #[arg(long, allow_hyphen_values = true)]
        a_src: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        a_dst: f64,
        #[arg(long, default_value_t = 15)]
        degree: usize,
    },
    /// Heckman-Opdam polynomials up to a degree cutoff.
    HoPolys {
        /// `k1,k2` at rank one, `k1,k2,k3` at rank two.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<f64>,
        #[arg(long, value_parser = rank)]
        n: usize,
        #[arg(long)]
        cutoff: u32,
        #[command(flatten)]
        quad: Quad,
    },
    /// Connection matrix between two Heckman-Opdam families.
    HoConnect {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        kp: Vec<f64>,
        #[arg(long, value_parser = rank)]
        n: usize,
        #[arg(long)]
        cutoff: u32,
        #[command(flatten)]
        quad: Quad,
    },
    /// Minimum connection coefficient of λ = (m, m) at rank two.
    SignScan {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        kp: Vec<f64>,
        #[arg(long, default_value_t = 6)]
        max_m: u32,
        #[command(flatten)]
        quad: Quad,
    },
    /// Rational limit of R_{mλ}(k; t/m).
    Contract {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<f64>,
        /// Trailing zeros fix the rank: `1,0` is rank two.
        #[arg(long, value_parser = weight)]
        lam: Weight,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 4, 8, 16])]
        m: Vec<u32>,
        #[command(flatten)]
        quad: Quad,
    },
    /// Runs listed in a TOML file, executed in parallel.
    Batch {
        #[arg(long)]
        config: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Jack { .. } => "jack",
            Command::Hyp0f1 { .. } => "hyp0f1",
            Command::BesselB { .. } => "bessel-b",
            Command::Selberg { .. } => "selberg",
            Command::Kadell { .. } => "kadell",
            Command::Sonine0f1 { .. } => "sonine-0f1",
            Command::SonineB { .. } => "sonine-b",
            Command::Sigma { .. } => "sigma",
            Command::Probe { .. } => "probe",
            Command::Classify { .. } => "classify",
            Command::Rank1Sonine { .. } => "rank1-sonine",
            Command::Xu { .. } => "xu",
            Command::JacobiConnect { .. } => "jacobi-connect",
            Command::HoPolys { .. } => "ho-polys",
            Command::HoConnect { .. } => "ho-connect",
            Command::SignScan { .. } => "sign-scan",
            Command::Contract { .. } => "contract",
            Command::Batch { .. } => "batch",
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be nonnegative and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn rank(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if (1..=3).contains(&v) => Ok(v),
        Ok(v) => Err(format!("rank must lie in 1..=3, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn samples(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 2 => Ok(v),
        Ok(v) => Err(format!("need at least 2 samples, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn complex(s: &str) -> Result<Complex64, String> {
    let v: Complex64 = s.trim().parse().map_err(|_| format!("not a complex number: {s:?}"))?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn partition(s: &str) -> Result<Partition, String> {
    s.parse::<Partition>().map_err(|e| e.to_string())
}

/// A dominant weight with explicit rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight(pub Vec<u32>);

fn weight(s: &str) -> Result<Weight, String> {
    let p = partition(s)?;
    let len = s.split(',').filter(|x| !x.trim().is_empty()).count();
    Ok(Weight(p.padded(len.max(p.len()))))
}

/// Parsed `argv` in one piece.
pub type RunConfig = Cli;

/// Top-level output record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema: u32,
    pub command: String,
    /// Seconds since the Unix epoch; absent with `--reproducible`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    /// Verification outcome; absent for pure evaluations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    pub result: Value,
}

/// One row of the CSV summary.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub schema: u32,
    pub command: String,
    pub label: String,
    pub passed: Option<bool>,
    pub value_re: Option<f64>,
    pub value_im: Option<f64>,
    pub reference_re: Option<f64>,
    pub reference_im: Option<f64>,
    pub abs_residual: Option<f64>,
    pub rel_residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub runtime_ms: Option<u64>,
}

impl SummaryRow {
    fn new(command: &str, label: impl Into<String>) -> Self {
        SummaryRow {
            schema: SCHEMA_VERSION,
            command: command.into(),
            label: label.into(),
            ..Default::default()
        }
    }

    fn value(mut self, v: Complex64) -> Self {
        self.value_re = Some(v.re);
        self.value_im = Some(v.im);
        self
    }

    fn reference(mut self, v: Complex64) -> Self {
        self.reference_re = Some(v.re);
        self.reference_im = Some(v.im);
        self
    }

    fn tolerance_of(mut self, t: f64) -> Self {
        self.tolerance = Some(t);
        self
    }

    fn from_report(command: &str, r: &VerificationReport) -> Self {
        SummaryRow {
            passed: Some(r.passed),
            abs_residual: Some(r.abs_residual),
            rel_residual: Some(r.rel_residual),
            tolerance: Some(r.tolerance),
            runtime_ms: Some(r.runtime_ms),
            ..SummaryRow::new(command, format!("{:?}", r.identity))
        }
        .value(r.lhs)
        .reference(r.rhs)
    }
}

/// What a subcommand produced, before formatting.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub passed: Option<bool>,
    pub result: Value,
    pub summary: Vec<SummaryRow>,
    /// Long-format CSV table, if the command produces one.
    pub table: Option<String>,
}

impl Outcome {
    fn value(command: &'static str, result: Value, row: SummaryRow) -> Self {
        Outcome {
            command,
            passed: None,
            result,
            summary: vec![row],
            table: None,
        }
    }

    fn report(command: &'static str, r: VerificationReport) -> Self {
        let row = SummaryRow::from_report(command, &r);
        Outcome {
            command,
            passed: Some(r.passed),
            result: to_value(&r),
            summary: vec![row],
            table: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed == Some(false) {
            EXIT_FAILED
        } else {
            EXIT_OK
        }
    }

    pub fn envelope(&self, reproducible: bool) -> Envelope {
        let mut result = self.result.clone();
        if reproducible {
            zero_runtimes(&mut result);
        }
        Envelope {
            schema: SCHEMA_VERSION,
            command: self.command.to_string(),
            generated_at: if reproducible { None } else { Some(now()) },
            passed: self.passed,
            result,
        }
    }

    /// Renders the outcome in `format`.
    pub fn render(&self, format: Format, reproducible: bool) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.envelope(reproducible)).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => match &self.table {
                Some(t) => t.clone(),
                None => summary_csv(&self.summary, reproducible),
            },
            Format::Pretty => {
                let mut out = String::new();
                let env = serde_json::to_value(self.envelope(reproducible)).expect("serializable");
                pretty(&env, 0, &mut out);
                out
            }
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn zero_runtimes(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for (key, val) in m.iter_mut() {
                if key == "runtime_ms" {
                    *val = json!(0);
                } else {
                    zero_runtimes(val);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(zero_runtimes),
        _ => {}
    }
}

/// CSV text with [`SUMMARY_COLUMNS`] as header.
pub fn summary_csv(rows: &[SummaryRow], reproducible: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        let mut r = r.clone();
        if reproducible && r.runtime_ms.is_some() {
            r.runtime_ms = Some(0);
        }
        w.serialize(r).expect("in-memory write");
    }
    if rows.is_empty() {
        w.write_record(SUMMARY_COLUMNS).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn pretty(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, val) in m {
                if is_scalar_like(val) {
                    let _ = writeln!(out, "{pad}{k}: {}", inline(val));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    pretty(val, depth + 1, out);
                }
            }
        }
        Value::Array(a) => {
            for (i, val) in a.iter().enumerate() {
                if is_scalar_like(val) {
                    let _ = writeln!(out, "{pad}- {}", inline(val));
                } else {
                    let _ = writeln!(out, "{pad}[{i}]");
                    pretty(val, depth + 1, out);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", inline(other));
        }
    }
}

fn is_scalar_like(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(a) => a.len() <= 8 && a.iter().all(|x| !x.is_object() && !x.is_array() || is_short_array(x)),
        _ => true,
    }
}

fn is_short_array(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.len() <= 3 && a.iter().all(|x| x.is_number() || x.is_string()))
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => format!("{f:.12e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn multiplicity_bc(k: &[f64], n: usize) -> Result<MultiplicityBC, CliError> {
    match (k.len(), n) {
        (2, 1) => Ok(MultiplicityBC::rank_one(k[0], k[1])?),
        (3, 1) | (3, 2) => Ok(MultiplicityBC::new(k[0], k[1], k[2])?),
        _ => Err(CliError::Usage(format!(
            "multiplicity needs 2 (rank one) or 3 values, got {} at rank {n}",
            k.len()
        ))),
    }
}

fn ones(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); n]
}

/// Errors surfaced by the front end.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_DOMAIN,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numeric(_) => "domain",
            CliError::Io(_) => "io",
        }
    }
}

/// Executes a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    let name = cli.command.name();
    let out = match &cli.command {
        Command::Jack { lam, alpha, x } => {
            let v = jack_c(lam, *alpha, x)?;
            let result = json!({"partition": lam.to_string(), "alpha": alpha, "x": x, "value": v});
            Outcome::value(name, result, SummaryRow::new(name, lam.to_string()).value(v))
        }
        Command::Hyp0f1 { alpha, mu, z, w, max_weight } => {
            let w = if w.is_empty() { ones(z.len()) } else { w.clone() };
            let s = hyp0f1(*alpha, *mu, z, &w, *max_weight)?;
            let result = json!({"alpha": alpha, "mu": mu, "z": z, "w": w, "series": s});
            Outcome::value(name, result, SummaryRow::new(name, "0F1").value(s.value))
        }
        Command::BesselB { k1, k2, z, w, max_weight } => {
            let k = MultiplicityB::new(*k1, *k2)?;
            let w = if w.is_empty() { ones(z.len()) } else { w.clone() };
            let s = bessel_b(&k, z, &w, *max_weight)?;
            let result = json!({"k": k, "z": z, "w": w, "series": s});
            Outcome::value(name, result, SummaryRow::new(name, "J_B").value(s.value))
        }
        Command::Selberg { n, kappa, mu, nu, check, quad } => {
            let p = SelbergParams { n: *n, kappa: *kappa, mu: *mu, nu: *nu };
            if *check {
                let r = verify_selberg(&p, &quad.spec(c.seed, IntegrationSpec::DEFAULT_NODES), c.tol)?;
                Outcome::report(name, r)
            } else {
                let v = selberg_in(&p)?;
                let result = json!({"params": p, "selberg": v});
                Outcome::value(name, result, SummaryRow::new(name, "I_n").value(v.value))
            }
        }
        Command::Kadell { n, alpha, mu, nu, lam, quad } => {
            let spec = quad.spec(c.seed, IntegrationSpec::DEFAULT_NODES);
            Outcome::report(name, verify_kadell(*alpha, *mu, *nu, lam, *n, &spec, c.tol)?)
        }
        Command::Sonine0f1 { alpha, mu, nu, z, quad } => {
            let spec = quad.spec(c.seed, IntegrationSpec::DEFAULT_NODES);
            Outcome::report(name, verify_sonine_0f1(*alpha, *mu, *nu, z, &spec, c.tol)?)
        }
        Command::SonineB { k1, k2, h, xi, quad } => {
            let k = MultiplicityB::real(*k1, *k2)?;
            let spec = quad.spec(c.seed, IntegrationSpec::DEFAULT_NODES);
            Outcome::report(name, verify_sonine_bessel_b(&k, *h, xi, &spec, c.tol)?)
        }
        Command::Sigma { h, k2, n } => {
            let v = sigma_classify(*h, *k2, *n);
            let result = json!({"h": h, "k2": k2, "n": n, "verdict": v, "in_sigma": v.in_sigma()});
            Outcome::value(name, result, SummaryRow::new(name, v.name()).value(*h))
        }
        Command::Probe { k1, k2, h, n, layers } => {
            let k = MultiplicityB::new(*k1, *k2)?;
            let p = probe_integrability(&k, *h, *n, *layers)?;
            let row = SummaryRow::new(name, format!("{:?}", p.verdict))
                .value(Complex64::new(p.fitted_exponent, 0.0))
                .reference(Complex64::new(p.expected_exponent, 0.0));
            let result = json!({"k": k, "h": h, "n": n, "probe": p});
            Outcome::value(name, result, row)
        }
        Command::Classify { k1, k2, h, n } => {
            let k = MultiplicityB::new(*k1, *k2)?;
            let r = classify_and_report(&k, *h, *n)?;
            let row = SummaryRow::new(name, r.sigma.name()).value(*h);
            Outcome::value(name, to_value(&r), row)
        }
        Command::Rank1Sonine { a, b, z, quad } => {
            let spec = quad.spec(c.seed, IntegrationSpec::DEFAULT_NODES);
            Outcome::report(name, sonine_1d_with_tol(*a, *b, *z, &spec, c.tol.unwrap_or(RANK_ONE_TOL))?)
        }
        Command::Xu { k, kp, x, z, quad } => {
            let spec = quad.spec(c.seed, IntegrationSpec::DEFAULT_NODES);
            Outcome::report(name, xu_kernel_check(*k, *kp, *x, *z, &spec, c.tol.unwrap_or(XU_TOL))?)
        }
        Command::JacobiConnect { a_src, b, a_dst, degree } => {
            let conn = jacobi_connection(*a_src, *b, *a_dst, *degree)?;
            let min = conn.min_coefficient();
            let result = json!({"connection": conn, "row_sums": conn.row_sums(), "min_coefficient": min});
            Outcome {
                table: Some(conn.to_csv()),
                ..Outcome::value(name, result, SummaryRow::new(name, "min_coefficient").value(Complex64::new(min, 0.0)))
            }
        }
        Command::HoPolys { k, n, cutoff, quad } => {
            let k = multiplicity_bc(k, *n)?;
            let fam = HoFamily::upto(k, *n, *cutoff, &quad.spec(c.seed, ho_nodes(*n)))?;
            let table = family_csv(&fam);
            let row = SummaryRow::new(name, "min_monic_coefficient")
                .value(Complex64::new(fam.min_monic_coefficient(), 0.0))
                .reference(Complex64::new(fam.gram_condition, 0.0))
                .tolerance_of(MAX_CONDITION);
            Outcome {
                table: Some(table),
                ..Outcome::value(name, to_value(&fam), row)
            }
        }
        Command::HoConnect { k, kp, n, cutoff, quad } => {
            let (k, kp) = (multiplicity_bc(k, *n)?, multiplicity_bc(kp, *n)?);
            let conn = ho_connection(&k, &kp, *n, *cutoff, &quad.spec(c.seed, ho_nodes(*n)))?;
            let min = conn.min_coefficient();
            let result = json!({"connection": conn, "row_sums": conn.row_sums(), "min_coefficient": min});
            Outcome {
                table: Some(conn.to_csv()),
                ..Outcome::value(name, result, SummaryRow::new(name, "min_coefficient").value(Complex64::new(min, 0.0)))
            }
        }
        Command::SignScan { k, kp, max_m, quad } => {
            let (k, kp) = (multiplicity_bc(k, 2)?, multiplicity_bc(kp, 2)?);
            let scan = sign_scan(&k, &kp, *max_m, &quad.spec(c.seed, ho_nodes(2)))?;
            let negative: Vec<u32> = scan.rows.iter().filter(|r| r.negative).map(|r| r.m).collect();
            let highlight = if negative.is_empty() {
                "no negative coefficient found".to_string()
            } else {
                format!("NEGATIVE coefficients at m = {negative:?}")
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["m", "min_coefficient", "argmin", "abs_sum", "negative"]).expect("in-memory write");
            for r in &scan.rows {
                let argmin = r.argmin.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                w.write_record([r.m.to_string(), format!("{:e}", r.min_coefficient), argmin, format!("{:e}", r.abs_sum), r.negative.to_string()])
                    .expect("in-memory write");
            }
            let table = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
            let min = scan.rows.iter().map(|r| r.min_coefficient).fold(f64::INFINITY, f64::min);
            let row = SummaryRow::new(name, highlight.clone()).value(Complex64::new(min, 0.0));
            let result = json!({"scan": scan, "highlight": highlight});
            Outcome {
                table: Some(table),
                ..Outcome::value(name, result, row)
            }
        }
        Command::Contract { k, lam: Weight(lam), t, m, quad } => {
            let n = lam.len();
            let k = multiplicity_bc(k, n)?;
            let rows = contraction_check(&k, lam, t, m, &quad.spec(c.seed, ho_nodes(n)))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).expect("in-memory write");
            }
            let table = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
            let last = rows.last().map_or(f64::NAN, |r| r.error);
            let result = json!({"k": k, "lambda": lam, "t": t, "rows": rows});
            Outcome {
                table: Some(table),
                ..Outcome::value(name, result, SummaryRow::new(name, "final_error").value(Complex64::new(last, 0.0)))
            }
        }
        Command::Batch { config } => run_batch(config, c)?,
    };
    Ok(out)
}

fn ho_nodes(n: usize) -> usize {
    if n == 1 {
        48
    } else {
        40
    }
}

/// Long-format table `lambda,nu,monic,normalized` of a family.
fn family_csv(fam: &HoFamily) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lambda", "nu", "monic", "normalized"]).expect("in-memory write");
    let fmt = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    for (i, row) in fam.coefficients.iter().enumerate() {
        for (j, c) in row.iter().enumerate().take(i + 1) {
            if *c != 0.0 || i == j {
                w.write_record([
                    fmt(&fam.weights[i]),
                    fmt(&fam.weights[j]),
                    format!("{c:e}"),
                    format!("{:e}", c / fam.at_zero[i]),
                ])
                .expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Batch file layout.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    #[serde(default)]
    pub runs: Vec<BatchRun>,
}

/// One `[[runs]]` entry: a subcommand, its flags, and optional overrides.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchRun {
    pub command: String,
    #[serde(default)]
    pub params: toml::Table,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl BatchRun {
    /// The equivalent command line.
    pub fn argv(&self, common: &Common) -> Result<Vec<String>, CliError> {
        if self.command == "batch" {
            return Err(CliError::Usage("batch runs cannot nest".into()));
        }
        let mut argv = vec!["sonine".to_string(), self.command.clone()];
        for (key, v) in &self.params {
            let flag = format!("--{}", key.replace('_', "-"));
            match v {
                toml::Value::Boolean(true) => argv.push(flag),
                toml::Value::Boolean(false) => {}
                other => argv.push(format!("{flag}={}", toml_scalar(other)?)),
            }
        }
        argv.push(format!("--seed={}", self.seed.unwrap_or(common.seed)));
        if let Some(t) = self.tol.or(common.tol) {
            argv.push(format!("--tol={t:?}"));
        }
        Ok(argv)
    }
}

fn toml_scalar(v: &toml::Value) -> Result<String, CliError> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => format!("{f:?}"),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(a) => a.iter().map(toml_scalar).collect::<Result<Vec<_>, _>>()?.join(","),
        other => return Err(CliError::Usage(format!("unsupported parameter value {other}"))),
    })
}

fn run_batch(path: &Path, common: &Common) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let cfg: BatchConfig =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("malformed batch config {}: {e}", path.display())))?;
    let outcomes: Vec<(String, Result<Outcome, CliError>)> = cfg
        .runs
        .par_iter()
        .map(|run| {
            let res = run.argv(common).and_then(|argv| {
                let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.render().to_string()))?;
                execute(&cli)
            });
            (run.command.clone(), res)
        })
        .collect();
    let (mut passed, mut failed, mut errors) = (0usize, 0usize, 0usize);
    let mut runs = Vec::with_capacity(outcomes.len());
    let mut summary = Vec::with_capacity(outcomes.len());
    for (i, (command, res)) in outcomes.into_iter().enumerate() {
        match res {
            Ok(o) => {
                if o.passed == Some(false) {
                    failed += 1;
                } else {
                    passed += 1;
                }
                summary.extend(o.summary.iter().cloned());
                runs.push(json!({"index": i, "command": command, "passed": o.passed, "result": o.result}));
            }
            Err(e) => {
                errors += 1;
                let msg = e.to_string();
                summary.push(SummaryRow {
                    passed: Some(false),
                    ..SummaryRow::new(&command, format!("{} error: {}", e.kind(), msg.lines().next().unwrap_or("")))
                });
                runs.push(json!({"index": i, "command": command, "error": {"kind": e.kind(), "message": msg}}));
            }
        }
    }
    let result = json!({"passed": passed, "failed": failed, "errors": errors, "runs": runs});
    Ok(Outcome {
        command: "batch",
        passed: Some(failed == 0 && errors == 0),
        result,
        summary,
        table: None,
    })
}

fn destination(common: &Common, command: &str) -> Option<PathBuf> {
    if let Some(p) = &common.output {
        return Some(p.clone());
    }
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(format!("{command}.{}", common.format.extension())))
}

fn write_output(text: &str, dest: Option<PathBuf>) -> Result<(), CliError> {
    match dest {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Parses `argv`, runs the command and writes its output; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Some(v) = outcome.result.get("highlight").and_then(Value::as_str) {
        if v.starts_with("NEGATIVE") {
            eprintln!("note: {v}");
        }
    }
    let text = outcome.render(cli.common.format, cli.common.reproducible);
    if let Err(e) = write_output(&text, destination(&cli.common, outcome.command)) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    outcome.exit_code()
}
