//! Command-line front end. Every invocation writes one JSON object (or a
//! CSV table) to stdout and human-readable messages to stderr.

mod output;

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bernstein::{lk_density_H, lk_density_Q, lk_reconstruct_H, lk_reconstruct_Q, LKSurfacePoint};
use crate::contour::{entropy_contour_auto, subentropy_contour_auto};
use crate::direct::{entropy_direct, subentropy_direct};
use crate::error::{Error, Result};
use crate::fd::ridders;
use crate::haar::{estimate_q, HaarConfig};
use crate::halfaxis::{dh, dh_estimate, dq, dq_estimate, entropy_e, entropy_e_estimate, entropy_e_log_form, subentropy_e, subentropy_e_estimate, MultiIndex};
use crate::identities::{c_bound, hq_upper_bounds};
use crate::quadrature::QuadratureConfig;
use crate::report::REGISTRY_VERSION;
use crate::suite::{log_grid, run_all, run_suite, SuiteOptions};
use crate::sympoly::{elementary_symmetric, roots_from_symmetric, ProbVector, SymPolyPoint};

pub use output::{OutputRecord, ErrorRecord};
use output::*;

#[derive(Debug, Parser)]
#[command(name = "symentropy", version, about = "Entropy and subentropy in elementary symmetric coordinates")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Logarithm base for reported entropies.
    #[arg(long, global = true, value_enum, default_value_t = Base::E)]
    base: Base,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Include wall-clock runtimes in the diagnostics.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Base {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate H and Q with every applicable evaluator.
    Eval(EvalArgs),
    /// Mixed partial derivatives of H and Q.
    Grad(GradArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Upper bounds from e1, e2 and the dimension.
    Bounds(BoundsArgs),
    /// Monte Carlo estimate of Q from Haar-random measurements.
    Haar(HaarArgs),
    /// Levy-Khintchine reconstruction and density export.
    Lk(LkArgs),
}

fn parse_list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| format!("cannot parse {t:?}")))
        .collect()
}

/// A comma-separated list given as one argument.
#[derive(Debug, Clone, PartialEq)]
struct List<T>(Vec<T>);

impl<T: serde::Serialize> serde::Serialize for List<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

fn parse_reals(s: &str) -> std::result::Result<List<f64>, String> {
    parse_list(s).map(List)
}

fn parse_indices(s: &str) -> std::result::Result<List<usize>, String> {
    parse_list(s).map(List)
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct PointArgs {
    /// Comma-separated x-coordinates.
    #[arg(long, value_parser = parse_reals)]
    x: Option<List<f64>>,
    /// Comma-separated e-coordinates e1,...,ed.
    #[arg(long, value_parser = parse_reals)]
    e: Option<List<f64>>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    point: PointArgs,
}

#[derive(Debug, Args)]
struct GradArgs {
    #[arg(long, value_parser = parse_reals)]
    e: List<f64>,
    /// Comma-separated coordinate indices k1,...,km.
    #[arg(long, value_parser = parse_indices)]
    order: List<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Samples per suite (default: the registered count).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Tolerance applied to every identity instead of the registered one.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    e1: f64,
    #[arg(long)]
    e2: f64,
    #[arg(long)]
    d: usize,
}

#[derive(Debug, Args)]
struct HaarArgs {
    #[arg(long)]
    dim: usize,
    /// Comma-separated eigenvalues summing to 1.
    #[arg(long, value_parser = parse_reals)]
    eigs: List<f64>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct LkArgs {
    /// e-coordinates with e1 = 1.
    #[arg(long, value_parser = parse_reals)]
    e: List<f64>,
    /// Points per axis of the exported density grid.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Write the density grid as CSV to this path.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Invocation { stdout: String::new(), stderr: text, code: EXIT_PARSE }
            } else {
                Invocation { stdout: text, stderr: String::new(), code: EXIT_OK }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            return Invocation { stdout: String::new(), stderr: format!("cannot start worker threads: {e}\n"), code: EXIT_PARSE };
        }
    };
    let start = Instant::now();
    let (mut record, code, message) = pool.install(|| dispatch(&cli));
    if cli.timings {
        record.diagnostic("runtime_ms", start.elapsed().as_secs_f64() * 1e3);
    }
    let stdout = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string(&record).expect("records are serializable");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(&record),
    };
    Invocation { stdout, stderr: message.map(|m| m + "\n").unwrap_or_default(), code }
}

fn dispatch(cli: &Cli) -> (OutputRecord, i32, Option<String>) {
    let (name, inputs) = describe(&cli.command);
    let mut record = OutputRecord::new(name, inputs);
    if cli.base == Base::Two {
        record.diagnostic("base", 2);
    }
    let outcome = match &cli.command {
        Command::Eval(a) => cmd_eval(a, &mut record),
        Command::Grad(a) => cmd_grad(a, &mut record),
        Command::Verify(a) => cmd_verify(a, &mut record),
        Command::Bounds(a) => cmd_bounds(a, &mut record),
        Command::Haar(a) => cmd_haar(a, &mut record),
        Command::Lk(a) => cmd_lk(a, &mut record),
    };
    if cli.base == Base::Two {
        rescale(&mut record);
    }
    match outcome {
        Ok((code, msg)) => (record, code, msg),
        Err(err) => {
            let code = match &err {
                Failure::Numeric(e) => exit_code(e),
                Failure::Io(_) => EXIT_DOMAIN,
            };
            let (kind, message) = match &err {
                Failure::Numeric(e) => (error_kind(e), e.to_string()),
                Failure::Io(m) => ("io", m.clone()),
            };
            record.error = Some(ErrorRecord { kind, message: message.clone(), exit_code: code });
            (record, code, Some(format!("error: {message}")))
        }
    }
}

enum Failure {
    Numeric(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

type Outcome = std::result::Result<(i32, Option<String>), Failure>;

fn describe(c: &Command) -> (&'static str, Value) {
    match c {
        Command::Eval(a) => ("eval", json!({"x": a.point.x, "e": a.point.e})),
        Command::Grad(a) => ("grad", json!({"e": a.e, "order": a.order})),
        Command::Verify(a) => (
            "verify",
            json!({"suite": a.suite, "d": a.d, "samples": a.samples, "seed": a.seed, "tol": a.tol}),
        ),
        Command::Bounds(a) => ("bounds", json!({"e1": a.e1, "e2": a.e2, "d": a.d})),
        Command::Haar(a) => ("haar", json!({"dim": a.dim, "eigs": a.eigs, "samples": a.samples, "seed": a.seed})),
        Command::Lk(a) => ("lk", json!({"e": a.e, "grid": a.grid, "out": a.out})),
    }
}

/// Result keys holding entropies, which `--base 2` converts to bits.
const ENTROPIC: &[&str] = &[
    "H", "Q", "H_direct", "H_halfaxis", "H_log_form", "H_contour", "Q_direct", "Q_halfaxis", "Q_contour",
    "delta_H", "delta_Q", "H_bound", "Q_bound", "HU_bound", "HQ_lower_bound", "mean_HM", "std_error",
    "implied_Q", "reference_Q", "H_reconstructed", "Q_reconstructed",
];

fn rescale(record: &mut OutputRecord) {
    for key in ENTROPIC {
        if let Some(Value::Number(n)) = record.results.get(*key) {
            if let Some(v) = n.as_f64() {
                record.result(key, v / std::f64::consts::LN_2);
            }
        }
    }
}

fn max_spread(v: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for a in v {
        for b in v {
            m = m.max((a - b).abs());
        }
    }
    m
}

fn cmd_eval(a: &EvalArgs, rec: &mut OutputRecord) -> Outcome {
    let cfg = QuadratureConfig::default();
    let (x, e) = match (&a.point.x, &a.point.e) {
        (Some(x), _) => {
            let pv = ProbVector::new(x.0.clone())?;
            let e = elementary_symmetric(&pv);
            (Some(pv), e)
        }
        (None, Some(e)) => {
            let e = SymPolyPoint::new(e.0.clone())?;
            let roots = roots_from_symmetric(&e, 1e-12)?;
            rec.diagnostic("root_classification", roots.classification);
            let x = match roots.real_roots() {
                Some(r) => Some(ProbVector::new(r)?),
                None => None,
            };
            (x, e)
        }
        (None, None) => unreachable!("clap requires one of --x, --e"),
    };

    let mut hs = Vec::new();
    let mut qs = Vec::new();
    if let Some(x) = &x {
        hs.push(("H_direct", entropy_direct(x)));
        qs.push(("Q_direct", subentropy_direct(x)));
    }
    let h = entropy_e_estimate(&e, &cfg)?;
    let q = subentropy_e_estimate(&e, &cfg)?;
    rec.diagnostic("panels", json!({"H_halfaxis": h.panels, "Q_halfaxis": q.panels}));
    hs.push(("H_halfaxis", h.value));
    hs.push(("H_log_form", entropy_e_log_form(&e, &cfg)?));
    qs.push(("Q_halfaxis", q.value));
    match (entropy_contour_auto(&e), subentropy_contour_auto(&e)) {
        (Ok(hc), Ok(qc)) => {
            hs.push(("H_contour", hc.value));
            qs.push(("Q_contour", qc.value));
            rec.diagnostic(
                "contour",
                json!({"nodes": hc.nodes.max(qc.nodes), "imag_residue_H": hc.imag_residue, "imag_residue_Q": qc.imag_residue}),
            );
        }
        (Err(err), _) | (_, Err(err)) => rec.diagnostic("contour_skipped", err.to_string()),
    }
    // roots recovered from e lose accuracy at multiple roots, so the
    // headline value for e-input comes from the half-axis integral
    let primary = |v: &[(&str, f64)], key: &str| if a.point.x.is_some() { v[0].1 } else { v.iter().find(|p| p.0 == key).map_or(v[0].1, |p| p.1) };
    rec.result("H", primary(&hs, "H_halfaxis"));
    rec.result("Q", primary(&qs, "Q_halfaxis"));
    for (k, v) in hs.iter().chain(&qs) {
        rec.result(k, v);
    }
    let hv: Vec<f64> = hs.iter().map(|p| p.1).collect();
    let qv: Vec<f64> = qs.iter().map(|p| p.1).collect();
    rec.result("delta_H", max_spread(&hv));
    rec.result("delta_Q", max_spread(&qv));
    Ok((EXIT_OK, None))
}

fn alt_sign(m: usize) -> f64 {
    if m % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

fn cmd_grad(a: &GradArgs, rec: &mut OutputRecord) -> Outcome {
    let cfg = QuadratureConfig::default();
    let e = SymPolyPoint::new(a.e.0.clone())?;
    let d = e.dim();
    let idx = MultiIndex::new(a.order.0.clone(), d)?;
    let (m, k_sum) = (idx.order(), idx.sum());
    let mut divergent = false;

    let mut value = |rec: &mut OutputRecord, key: &str, r: Result<crate::quadrature::Estimate<f64>>| -> std::result::Result<Option<f64>, Failure> {
        match r {
            Ok(est) => {
                rec.result(key, est.value);
                rec.diagnostic(&format!("panels_{key}"), est.panels);
                Ok(Some(est.value))
            }
            Err(err) => match divergence_value(&err) {
                Some(v) => {
                    divergent = true;
                    rec.result(key, v);
                    Ok(None)
                }
                None => Err(err.into()),
            },
        }
    };
    let gh = value(rec, "dH", dh_estimate(&e, &idx, &cfg))?;
    let gq = value(rec, "dQ", dq_estimate(&e, &idx, &cfg))?;

    let e1 = e.e(1);
    if k_sum >= 2 && e1 > 0.0 {
        let s = alt_sign(m);
        let ch = c_bound(m * d, k_sum, m as f64 * e1)?;
        rec.result("c_bound_H", ch);
        if let Some(g) = gh {
            rec.result("slack_H", s * g - ch);
        }
        let cq = c_bound((m + 1) * d, k_sum, (m + 1) as f64 * e1)?;
        rec.result("c_bound_Q", cq);
        if let Some(g) = gq {
            rec.result("slack_Q", s * g - cq);
        }
    }

    // differentiate the next-lower derivative along the last index
    let last = *idx.indices().last().expect("non-empty index");
    let lower = &idx.indices()[..m - 1];
    let ek = e.e(last);
    if ek > 0.0 && !divergent {
        let fine = QuadratureConfig::precise();
        let lower_idx = if lower.is_empty() { None } else { Some(MultiIndex::new(lower.to_vec(), d)?) };
        let along = |f: &dyn Fn(&SymPolyPoint) -> Result<f64>| ridders(|t| f(&e.with(last, t)?), ek, 0.2 * ek);
        let (fh, eh) = match &lower_idx {
            None => along(&|p| entropy_e(p, &fine))?,
            Some(i) => along(&|p| dh(p, i, &fine))?,
        };
        let (fq, eq) = match &lower_idx {
            None => along(&|p| subentropy_e(p, &fine))?,
            Some(i) => along(&|p| dq(p, i, &fine))?,
        };
        rec.result("fd_dH", fh);
        rec.result("fd_dQ", fq);
        rec.diagnostic("fd_error", json!({"dH": eh, "dQ": eq}));
    } else if ek == 0.0 {
        rec.diagnostic("fd_skipped", format!("e_{last} = 0 lies on the boundary"));
    }

    if divergent {
        return Ok((EXIT_DIVERGENT, Some("error: derivative integral diverges".into())));
    }
    Ok((EXIT_OK, None))
}

fn cmd_verify(a: &VerifyArgs, rec: &mut OutputRecord) -> Outcome {
    let mut opts = SuiteOptions::new(a.d, a.seed);
    opts.samples = a.samples;
    if let Some(t) = a.tol {
        if !(t > 0.0) {
            return Err(Error::DomainViolation("--tol must be positive".into()).into());
        }
    }
    opts.tolerance = a.tol;
    let reports = if a.suite == "all" { run_all(&opts)? } else { run_suite(&a.suite, &opts)? };
    let failures = reports.iter().filter(|r| !r.pass).count();
    let inconclusive: usize = reports.iter().map(|r| r.inconclusive).sum();
    rec.result("reports", &reports);
    rec.diagnostic("failures", failures);
    rec.diagnostic("inconclusive", inconclusive);
    rec.diagnostic("registry_version", REGISTRY_VERSION);
    if failures == 0 {
        Ok((EXIT_OK, None))
    } else {
        let names: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.identity.as_str()).collect();
        Ok((
            EXIT_VERIFY_BASE + failures.min(245) as i32,
            Some(format!("{failures} identities failed: {}", names.join(", "))),
        ))
    }
}

fn cmd_bounds(a: &BoundsArgs, rec: &mut OutputRecord) -> Outcome {
    let b = hq_upper_bounds(a.e1, a.e2, a.d)?;
    rec.result("a", b.a);
    rec.result("b", b.b);
    rec.result("H_bound", b.h_bound);
    rec.result("Q_bound", b.q_bound);
    rec.result("HU_bound", b.hu_bound);
    if a.e1 > 0.0 {
        rec.result("HQ_lower_bound", a.d as f64 * a.e2 / ((a.d - 1) as f64 * a.e1));
    }
    Ok((EXIT_OK, None))
}

fn cmd_haar(a: &HaarArgs, rec: &mut OutputRecord) -> Outcome {
    if a.eigs.0.len() != a.dim {
        return Err(Error::DomainViolation(format!("--dim {} but {} eigenvalues", a.dim, a.eigs.0.len())).into());
    }
    let cfg = HaarConfig::new(ProbVector::new(a.eigs.0.clone())?, a.samples, a.seed)?;
    let est = estimate_q(&cfg);
    rec.result("mean_HM", est.mean_hm);
    rec.result("std_error", est.std_error);
    rec.result("implied_Q", est.implied_q);
    rec.result("reference_Q", est.reference_q);
    rec.result("z_score", est.z_score);
    if est.z_score.abs() < 4.0 {
        Ok((EXIT_OK, None))
    } else {
        Ok((EXIT_STATISTICAL, Some(format!("|z| = {} is not below 4", est.z_score.abs()))))
    }
}

fn number(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_default()
}

fn cmd_lk(a: &LkArgs, rec: &mut OutputRecord) -> Outcome {
    let cfg = QuadratureConfig::default();
    let e = SymPolyPoint::new(a.e.0.clone())?;
    let d = e.dim();
    let hr = lk_reconstruct_H(&e, &cfg)?;
    let qr = lk_reconstruct_Q(&e, &cfg)?;
    let h = entropy_e(&e, &cfg)?;
    let q = subentropy_e(&e, &cfg)?;
    rec.result("H_reconstructed", hr);
    rec.result("Q_reconstructed", qr);
    rec.result("H_halfaxis", h);
    rec.result("Q_halfaxis", q);
    rec.result("delta_H", (hr - h).abs());
    rec.result("delta_Q", (qr - q).abs());
    if let Some(path) = &a.out {
        if d < 2 {
            return Err(Error::DomainViolation("densities need d >= 2".into()).into());
        }
        let grid = log_grid(a.grid);
        let mut csv = String::from("r,t_d,weight_H,weight_Q\n");
        for &r in &grid {
            for &t in &grid {
                let p = LKSurfacePoint::new(r, t)?;
                let wh = lk_density_H(&p, d)?.weight;
                let wq = lk_density_Q(&p, d)?.weight;
                csv.push_str(&format!("{},{},{},{}\n", number(r), number(t), number(wh), number(wq)));
            }
        }
        std::fs::write(path, csv).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        rec.diagnostic("density_rows", grid.len() * grid.len());
    }
    Ok((EXIT_OK, None))
}
