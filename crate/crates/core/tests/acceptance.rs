//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::io::Write;
use std::process::Command;

use symentropy::haar::{estimate_q, harmonic_tail, HaarConfig};
use symentropy::halfaxis::{dh, dq, entropy_e, subentropy_e, MultiIndex};
use symentropy::report::VerificationReport;
use symentropy::suite::{run_suite, SuiteOptions};
use symentropy::{ProbVector, QuadratureConfig, SymPolyPoint};

const SEED: u64 = 42;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn suite(name: &str, d: usize, samples: Option<usize>) -> Vec<VerificationReport> {
    let mut opts = SuiteOptions::new(d, SEED);
    opts.samples = samples;
    run_suite(name, &opts).unwrap_or_else(|e| panic!("suite {name} at d={d}: {e}"))
}

/// Folds reports into one outcome, also requiring `tolerance <= max_tol`.
fn judge(runs: &[(usize, Vec<VerificationReport>)], max_tol: f64) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut inconclusive = 0;
    for (d, reports) in runs {
        for r in reports {
            worst = worst.max(r.max_residual);
            inconclusive += r.inconclusive;
            if !r.pass || r.tolerance > max_tol {
                failures.push(format!("{} d={d} residual={:e} tol={:e}", r.identity, r.max_residual, r.tolerance));
            }
        }
    }
    if failures.is_empty() {
        outcome(true, format!("worst residual {worst:.2e}, {inconclusive} inconclusive"))
    } else {
        outcome(false, failures.join("; "))
    }
}

fn cross_oracle() -> Outcome {
    let runs: Vec<_> = (2..=6).map(|d| (d, suite("cross_oracle", d, Some(200)))).collect();
    judge(&runs, 1e-8)
}

fn closed_form() -> Outcome {
    let e = SymPolyPoint::new(vec![1.0, 0.25]).unwrap();
    let cfg = QuadratureConfig::default();
    let ln2 = std::f64::consts::LN_2;
    let idx = |v: Vec<usize>| MultiIndex::new(v, 2).unwrap();
    let checks = [
        ("H", entropy_e(&e, &cfg).unwrap(), ln2),
        ("Q", subentropy_e(&e, &cfg).unwrap(), ln2 - 0.5),
        ("dH/de2", dh(&e, &idx(vec![2]), &cfg).unwrap(), 2.0),
        ("d2H/de1^2", dh(&e, &idx(vec![1, 1]), &cfg).unwrap(), -2.0 / 3.0),
        ("dQ/de2", dq(&e, &idx(vec![2]), &cfg).unwrap(), 2.0 / 3.0),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| (got - want).abs() >= 1e-9)
        .map(|(name, got, want)| format!("{name}: {got} vs {want}"))
        .collect();
    let worst = checks.iter().map(|(_, g, w)| (g - w).abs()).fold(0.0, f64::max);
    outcome(bad.is_empty(), if bad.is_empty() { format!("max error {worst:.2e}") } else { bad.join("; ") })
}

fn identity_suite() -> Outcome {
    let suites = [
        ("sum_identities", 100),
        ("duality", 100),
        ("index_sum", 100),
        ("derivative_bounds", 100),
        ("e1_derivative", 100),
        ("hq_difference", 100),
        ("scaling", 100),
        ("reduction", 100),
        ("schur", 50),
        ("bipartite", 50),
    ];
    let mut runs = Vec::new();
    for d in 2..=6 {
        for (name, n) in suites {
            runs.push((d, suite(name, d, Some(n))));
        }
    }
    judge(&runs, 1e-8)
}

fn bound_attainment() -> Outcome {
    let runs: Vec<_> = (2..=6)
        .map(|d| {
            let reports = suite("upper_bounds", d, Some(20))
                .into_iter()
                .filter(|r| r.identity == "bound_attainment")
                .collect::<Vec<_>>();
            assert!(!reports.is_empty());
            (d, reports)
        })
        .collect();
    judge(&runs, 1e-10)
}

fn levy_khintchine() -> Outcome {
    let mut runs = Vec::new();
    for d in 2..=4 {
        runs.push((d, suite("lk_reconstruction", d, Some(20))));
        runs.push((d, suite("lk_affine", d, None)));
    }
    judge(&runs, 1e-4)
}

fn pick() -> Outcome {
    let runs: Vec<_> = (2..=5).map(|d| (d, suite("pick", d, Some(1)))).collect();
    judge(&runs, 1e-8)
}

fn complete_monotonicity() -> Outcome {
    let runs: Vec<_> = (2..=5).map(|d| (d, suite("complete_monotonicity", d, Some(3)))).collect();
    judge(&runs, 1e-8)
}

fn haar() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for eigs in [vec![0.6, 0.4], vec![0.5, 0.3, 0.2]] {
        let cfg = HaarConfig::new(ProbVector::new(eigs.clone()).unwrap(), 100_000, 7).unwrap();
        let est = estimate_q(&cfg);
        let within = (est.implied_q - est.reference_q).abs() < 4.0 * est.std_error;
        pass &= within;
        notes.push(format!("{eigs:?}: z={:.2}", est.z_score));
    }
    for d in 2..=4 {
        let cfg = HaarConfig::new(ProbVector::new(vec![1.0 / d as f64; d]).unwrap(), 1000, 7).unwrap();
        let est = estimate_q(&cfg);
        let exact = (d as f64).ln() - harmonic_tail(d);
        let ok = est.std_error == 0.0 && (est.implied_q - exact).abs() < 1e-12;
        pass &= ok;
        notes.push(format!("mixed d={d}: std_error={}", est.std_error));
    }
    outcome(pass, notes.join(", "))
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_symentropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn divergence() -> Outcome {
    let out = bin(&["grad", "--e", "1,0", "--order", "2"]);
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    let dh = &record["results"]["dH"];
    let structured = dh["divergent"] == true && dh["direction"].is_string() && !dh.is_number();
    outcome(
        out.status.code() == Some(5) && structured,
        format!("exit {:?}, dH = {dh}", out.status.code()),
    )
}

fn determinism() -> Outcome {
    let run = |threads: &str| {
        bin(&["verify", "--suite", "all", "--d", "4", "--samples", "100", "--seed", "42", "--threads", threads])
    };
    let (a, b) = (run("1"), run("8"));
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(
        same && a.status.code() == Some(0) && b.status.code() == Some(0),
        format!("{} bytes, identical: {same}, exit {:?}/{:?}", a.stdout.len(), a.status.code(), b.status.code()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("cross-oracle equivalence", cross_oracle),
        ("closed-form spot values", closed_form),
        ("identity suite", identity_suite),
        ("bound attainment", bound_attainment),
        ("Levy-Khintchine reconstruction", levy_khintchine),
        ("Pick property", pick),
        ("complete monotonicity", complete_monotonicity),
        ("Haar Monte Carlo", haar),
        ("divergence handling", divergence),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        writeln!(err, "criterion {:>2} {tag}: {name} ({})", i + 1, o.detail).unwrap();
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
