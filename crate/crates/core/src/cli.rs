//! Batch front end: each subcommand reads a spec file, runs one analysis and
//! writes a JSON report (plus CSV where there is tabular output) into the
//! output directory.
//!
//! Exit statuses: 0 on success (a NO verdict is a success), 2 when the input
//! fails validation, 3 when a numerical result cannot be certified, 1 for
//! anything else (I/O, refusing to overwrite). Errors are printed to stderr
//! as one-line JSON diagnostics.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::criterion::{decide_cis, Decision, Verdict};
use crate::error::{Error, Result};
use crate::logc::LogComplex;
use crate::products::{canonical_product, coarse_estimate, fine_estimate, TruncationPolicy};
use crate::sequence::{Exponent, SequenceSpec, Side, SpaceParams, TailedSpec};
use crate::spaces::{interpolate, norm_fp, Evaluable, Monomial, QuadParams, SampleSeq};
use crate::toperator::{assemble_section, decay_fit, gamma_phase_choice, predicted_log_entry, prediction_residual, section_norms};

#[derive(Parser, Debug)]
#[command(name = "smallfock", version, about = "Complete interpolating sequences in small Fock spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Input spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Directory receiving the reports.
    #[arg(long)]
    pub out: PathBuf,
    /// Relative tolerance for truncated products.
    #[arg(long, default_value_t = 1e-12)]
    pub rel_tol: f64,
    /// Seed for sampled evaluation points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overwrite existing reports.
    #[arg(long)]
    pub force: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether the sequence is complete interpolating.
    Analyze(Common),
    /// Evaluate the canonical product and its size estimates at sampled points.
    Product {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Build the interpolating function for `{spec, data}` and check it.
    Interpolate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Assemble a finite section of the T-matrix and fit its decay.
    Tmatrix {
        #[command(flatten)]
        common: Common,
        /// Rows and columns of the section.
        #[arg(long, default_value_t = 64)]
        size: usize,
    },
    /// Compare norm quadrature with closed forms for monomials.
    Normcheck(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Analyze,
    Product,
    Interpolate,
    Tmatrix,
    Normcheck,
}

/// Everything that determines a run; equal configs give byte-identical
/// reports.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub spec_path: PathBuf,
    pub output_dir: PathBuf,
    pub rel_tol: f64,
    pub seed: u64,
    pub force: bool,
    pub samples: usize,
    pub size: usize,
}

impl From<Command> for RunConfig {
    fn from(c: Command) -> Self {
        let (command, common, samples, size) = match c {
            Command::Analyze(c) => (CommandKind::Analyze, c, 0, 0),
            Command::Product { common, samples } => (CommandKind::Product, common, samples, 0),
            Command::Interpolate { common, samples } => (CommandKind::Interpolate, common, samples, 0),
            Command::Tmatrix { common, size } => (CommandKind::Tmatrix, common, 0, size),
            Command::Normcheck(c) => (CommandKind::Normcheck, c, 0, 0),
        };
        RunConfig {
            command,
            spec_path: common.spec,
            output_dir: common.out,
            rel_tol: common.rel_tol,
            seed: common.seed,
            force: common.force,
            samples,
            size,
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation { .. } => 2,
        e if e.is_numeric() => 3,
        _ => 1,
    }
}

/// One-line JSON rendering of an error.
pub fn diagnostic(e: &Error) -> String {
    let mut d = json!({ "error": e.to_string(), "exit_code": exit_code(e) });
    if let Error::Validation { pointer, message } = e {
        d["pointer"] = json!(pointer);
        d["message"] = json!(message);
    }
    d.to_string()
}

/// Parse arguments, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&RunConfig::from(cli.command)) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            exit_code(&e)
        }
    }
}

struct Output {
    name: &'static str,
    bytes: Vec<u8>,
}

/// Execute a run and return the paths written.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let raw = fs::read(&config.spec_path)?;
    let text = String::from_utf8(raw.clone()).map_err(|_| Error::validation("", "spec file is not UTF-8"))?;
    let pol = TruncationPolicy::with_rel_tol(config.rel_tol).map_err(|e| match e {
        Error::Domain(m) => Error::validation("/rel_tol", m),
        other => other,
    })?;
    let header = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.command,
        "spec_sha256": hex::encode(Sha256::digest(&raw)),
        "tolerances": { "rel_tol": pol.rel_tol, "hard_cap": pol.hard_cap },
        "seed": config.seed,
    });
    let outputs = match config.command {
        CommandKind::Analyze => analyze(&text, header)?,
        CommandKind::Product => product(&text, header, &pol, config)?,
        CommandKind::Interpolate => interpolate_cmd(&text, header, &pol, config)?,
        CommandKind::Tmatrix => tmatrix(&text, header, &pol, config)?,
        CommandKind::Normcheck => {
            let (outputs, failure) = normcheck(&text, header)?;
            let paths = write_all(&config.output_dir, outputs, config.force)?;
            return match failure {
                Some(e) => Err(e),
                None => Ok(paths),
            };
        }
    };
    write_all(&config.output_dir, outputs, config.force)
}

fn write_all(dir: &Path, outputs: Vec<Output>, force: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let paths: Vec<PathBuf> = outputs.iter().map(|o| dir.join(o.name)).collect();
    if !force {
        if let Some(p) = paths.iter().find(|p| p.exists()) {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::AlreadyExists,
                format!("{} exists; pass --force to overwrite", p.display()),
            )));
        }
    }
    for (o, p) in outputs.iter().zip(&paths) {
        fs::write(p, &o.bytes)?;
    }
    Ok(paths)
}

fn report(name: &'static str, header: Value, body: Value) -> Output {
    let mut v = json!({ "header": header });
    if let (Some(m), Value::Object(b)) = (v.as_object_mut(), body) {
        m.extend(b);
    }
    let mut bytes = serde_json::to_vec_pretty(&v).expect("report serialization is infallible");
    bytes.push(b'\n');
    Output { name, bytes }
}

fn csv_output<R: Serialize>(name: &'static str, rows: &[R]) -> Result<Output> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(Output { name, bytes })
}

fn analyze(text: &str, header: Value) -> Result<Vec<Output>> {
    let spec = SequenceSpec::from_json(text)?;
    let canonical = spec.canonicalize()?;
    let verdict = decide_cis(&spec)?;
    Ok(vec![report(
        "analyze.json",
        header,
        json!({ "spec": spec, "canonical_spec": canonical, "verdict": verdict }),
    )])
}

/// Seeded sample points with `log|z|` uniform in `[lo, hi]`.
fn sample_points(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<LogComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let t = rng.gen_range(lo..=hi);
            let th = rng.gen_range(-PI..PI);
            LogComplex::new(t, th)
        })
        .collect()
}

fn logmod_span(side: Side) -> (f64, f64) {
    match side {
        Side::OneSided => (0.0, 15.0),
        Side::TwoSided => (-10.0, 15.0),
    }
}

#[derive(Serialize)]
struct ProductRow {
    logmod_z: f64,
    phase_z: f64,
    #[serde(rename = "log|G|")]
    log_abs_g: f64,
    #[serde(rename = "phase_G")]
    phase_g: f64,
    coarse_ratio: f64,
    fine_ratio: f64,
    nearest_index: i64,
}

fn product(text: &str, header: Value, pol: &TruncationPolicy, config: &RunConfig) -> Result<Vec<Output>> {
    let spec = SequenceSpec::from_json(text)?;
    let (lo, hi) = logmod_span(spec.side());
    let mut rows = Vec::new();
    for z in sample_points(config.seed, config.samples, lo, hi) {
        let g = canonical_product(&spec, z, pol)?;
        let coarse = coarse_estimate(&spec, z, pol)?;
        let fine = fine_estimate(&spec, z, pol)?;
        rows.push(ProductRow {
            logmod_z: z.logmod(),
            phase_z: z.phase(),
            log_abs_g: g.logmod(),
            phase_g: g.phase(),
            coarse_ratio: coarse.ratio(),
            fine_ratio: fine.ratio(),
            nearest_index: fine.nearest,
        });
    }
    let range = |f: fn(&ProductRow) -> f64| {
        let lo = rows.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        json!({ "min": lo, "max": hi, "spread": hi / lo })
    };
    let body = json!({
        "samples": rows.len(),
        "logmod_range": [lo, hi],
        "coarse_ratio": range(|r| r.coarse_ratio),
        "fine_ratio": range(|r| r.fine_ratio),
        "csv": "product.csv",
    });
    Ok(vec![csv_output("product.csv", &rows)?, report("product.json", header, body)])
}

fn parse_interpolation_input(text: &str) -> Result<(SequenceSpec, SampleSeq)> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::validation("", format!("malformed JSON: {e}")))?;
    let spec_value = value.get("spec").ok_or_else(|| Error::validation("/spec", "missing field `spec`"))?;
    let spec = SequenceSpec::from_value(spec_value).map_err(|e| match e {
        Error::Validation { pointer, message } => Error::validation(format!("/spec{pointer}"), message),
        other => other,
    })?;
    let data = value
        .get("data")
        .ok_or_else(|| Error::validation("/data", "missing field `data`"))?
        .as_array()
        .ok_or_else(|| Error::validation("/data", "expected an array of {k, re, im}"))?;
    let mut support = BTreeMap::new();
    for (i, item) in data.iter().enumerate() {
        let num = |key: &str| item.get(key).and_then(Value::as_f64);
        let k = item
            .get("k")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::validation(format!("/data/{i}/k"), "expected an integer"))?;
        let re = num("re").ok_or_else(|| Error::validation(format!("/data/{i}/re"), "expected a number"))?;
        let im = num("im").ok_or_else(|| Error::validation(format!("/data/{i}/im"), "expected a number"))?;
        if !spec.space.admits(k) {
            return Err(Error::validation(format!("/data/{i}/k"), "index outside the admissible index set"));
        }
        if support.insert(k, Complex64::new(re, im)).is_some() {
            return Err(Error::validation(format!("/data/{i}/k"), "duplicate index"));
        }
    }
    let seq = SampleSeq::new(spec.space, support)?;
    Ok((spec, seq))
}

#[derive(Serialize)]
struct SampleRow {
    logmod_z: f64,
    phase_z: f64,
    log_abs_f: f64,
    phase_f: f64,
}

fn interpolate_cmd(text: &str, header: Value, pol: &TruncationPolicy, config: &RunConfig) -> Result<Vec<Output>> {
    let (spec, data) = parse_interpolation_input(text)?;
    let f = interpolate(&spec, &data, pol)?;
    let (lo_k, hi_k) = match (data.support.keys().next(), data.support.keys().last()) {
        (Some(&a), Some(&b)) => (a - 10, b + 10),
        _ => (0, 10),
    };
    let residuals: Vec<Value> = f
        .residuals(&data, lo_k..=hi_k)?
        .into_iter()
        .map(|(k, abs)| json!({ "k": k, "abs": abs }))
        .collect();
    let norm = if f.is_zero() { 0.0 } else { norm_fp(&spec.space, &f, &QuadParams::default())?.norm };
    let data_norm = data.lp_norm();
    let (lo, hi) = logmod_span(spec.side());
    let mut rows = Vec::new();
    for z in sample_points(config.seed, config.samples, lo, hi) {
        let v = f.eval(z)?;
        rows.push(SampleRow {
            logmod_z: z.logmod(),
            phase_z: z.phase(),
            log_abs_f: v.logmod(),
            phase_f: v.phase(),
        });
    }
    let body = json!({
        "shift": f.shift(),
        "cis_warning": f.cis_warning,
        "residuals": residuals,
        "norm_fp": norm,
        "data_norm": data_norm,
        "norm_ratio": if data_norm > 0.0 { json!(norm / data_norm) } else { Value::Null },
        "samples": "interpolate_samples.csv",
    });
    Ok(vec![
        csv_output("interpolate_samples.csv", &rows)?,
        report("interpolate.json", header, body),
    ])
}

#[derive(Serialize)]
struct TRow {
    m: i64,
    k: i64,
    log_abs: f64,
    phase: f64,
    predicted_log: f64,
}

fn tmatrix(text: &str, header: Value, pol: &TruncationPolicy, config: &RunConfig) -> Result<Vec<Output>> {
    let spec = SequenceSpec::from_json(text)?;
    if config.size < 16 {
        return Err(Error::validation("/size", "sections must be at least 16×16"));
    }
    let verdict = decide_cis(&spec)?;
    let mut work = spec.canonicalize()?;
    let shift = match verdict.shift_m {
        Some(m) if work.space.is_two_sided() && m != 0 => {
            work = work.shift_enumeration(m)?;
            m
        }
        _ => 0,
    };
    let n = config.size as i64;
    let range = if work.space.is_two_sided() { -n / 2..=n - n / 2 - 1 } else { 0..=n - 1 };
    let phases = gamma_phase_choice(&work)?;
    let section = assemble_section(&work, &phases, range.clone(), range, pol)?;
    let fit = decay_fit(&section)?;
    let norms = section_norms(&section)?;
    let rows: Vec<TRow> = section
        .iter()
        .map(|(m, k, v)| TRow {
            m,
            k,
            log_abs: v.logmod(),
            phase: v.phase(),
            predicted_log: predicted_log_entry(&work, m, k),
        })
        .collect();
    let interpolated = match work.space.p {
        Exponent::Finite(p) => norms.interpolated(p).map_or(json!("no bound (p < 1); diagnostic only"), |b| json!(b)),
        Exponent::Infinite => json!(norms.pinf),
    };
    let body = json!({
        "shift": shift,
        "gamma_phases": phases,
        "rows": [section.rows.start(), section.rows.end()],
        "slopes": { "upper": fit.slope_upper, "lower": fit.slope_lower, "offset": fit.offset() },
        "norms": { "p1": norms.p1, "p2": norms.p2, "pinf": norms.pinf, "interpolated_p": interpolated },
        "max_entry": section.max_entry(),
        "prediction_residual": prediction_residual(&section),
        "verdict_cross_check": cross_check(&work, &verdict, fit.slope_upper, fit.slope_lower),
        "csv": "tmatrix.csv",
    });
    Ok(vec![csv_output("tmatrix.csv", &rows)?, report("tmatrix.json", header, body)])
}

/// Compare fitted slopes with what the verdict predicts: decay at half the
/// witness rate for YES, growth for constant `|δ| > 1/2` one-sided.
pub fn cross_check(spec: &SequenceSpec, verdict: &Verdict, slope_upper: f64, slope_lower: f64) -> Value {
    let alpha = spec.space.alpha;
    if verdict.decision == Decision::Yes {
        let eps = verdict.epsilon.unwrap_or(0.0);
        let threshold = -eps / (8.0 * alpha);
        return json!({
            "decision": verdict.decision,
            "certificate": "decay",
            "threshold": threshold,
            "satisfied": slope_upper <= threshold && slope_lower <= threshold,
        });
    }
    if let (Side::OneSided, TailedSpec::Constant { value }) = (spec.side(), &spec.delta) {
        if value.abs() > 0.5 {
            let threshold = (2.0 * value.abs() - 1.0) / (8.0 * alpha);
            return json!({
                "decision": verdict.decision,
                "certificate": "blow-up",
                "threshold": threshold,
                "satisfied": slope_upper.max(slope_lower) >= threshold,
            });
        }
    }
    json!({ "decision": verdict.decision, "certificate": "none" })
}

/// `∫ |z^n|^p e^{-pφ} dA` in closed form (`p` finite), or `sup |z^n| e^{-φ}`.
pub fn monomial_norm_oracle(space: &SpaceParams, n: i32) -> f64 {
    let alpha = space.alpha;
    let nf = n as f64;
    match space.p {
        Exponent::Infinite => match space.side {
            Side::OneSided if n == 0 => 1.0,
            _ => (nf * nf / (4.0 * alpha)).exp(),
        },
        Exponent::Finite(p) => {
            let a = p * alpha;
            let b = nf * p + 2.0;
            let gauss = (PI / a).sqrt() * (b * b / (4.0 * a)).exp();
            match space.side {
                Side::TwoSided => 2.0 * PI * gauss,
                // unit disk plus the half-line Gaussian
                Side::OneSided => 2.0 * PI / b + PI * gauss * (1.0 + libm::erf(b / (2.0 * a.sqrt()))),
            }
        }
    }
}

/// The report is written even when the check fails; the failure is returned
/// alongside it.
fn normcheck(text: &str, header: Value) -> Result<(Vec<Output>, Option<Error>)> {
    let spec = SequenceSpec::from_json(text)?;
    let space = spec.space;
    let powers: &[i32] = match space.side {
        Side::OneSided => &[0, 1, 2],
        Side::TwoSided => &[-1, 0, 1, 2],
    };
    let tol = 1e-6;
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for &n in powers {
        let f = Monomial::power(n);
        let got = norm_fp(&space, &f as &dyn Evaluable, &QuadParams::default())?;
        let want = monomial_norm_oracle(&space, n);
        let rel = (got.integral - want).abs() / want;
        worst = worst.max(rel);
        println!("z^{n}: quadrature {:.12e}, closed form {:.12e}, relative error {:.3e}", got.integral, want, rel);
        checks.push(json!({ "power": n, "quadrature": got.integral, "closed_form": want, "relative_error": rel }));
    }
    let body = json!({ "space": space, "checks": checks, "tolerance": tol, "max_relative_error": worst, "pass": worst <= tol });
    let failure = (worst > tol).then(|| Error::CheckFailed(format!("norm quadrature off by {worst:e} relative (tolerance {tol:e})")));
    Ok((vec![report("normcheck.json", header, body)], failure))
}
