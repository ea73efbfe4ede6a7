//! Seeded verification suites. Samples run in parallel; each draws from
//! its own random stream and the per-sample reports are folded in sample
//! order, so the output does not depend on the number of threads.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::bernstein::{
    check_complete_monotonicity, check_variety, lk_affine, lk_density_H, lk_density_Q, lk_reconstruct_H,
    lk_reconstruct_Q, pick_grid, pick_sweep, LKSurfacePoint,
};
use crate::error::{Error, Result};
use crate::halfaxis::{dh, dq, entropy_e, subentropy_e, MultiIndex};
use crate::identities::*;
use crate::quadrature::QuadratureConfig;
use crate::report::{lookup, residual, VerificationReport};
use crate::sampling::{cone_point, dirichlet, interior, joint, robin_hood_pair, stream};
use crate::sympoly::{elementary_symmetric_slice, ProbVector, SymPolyPoint};

/// Settings shared by every suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub d: usize,
    /// Overrides each suite's default sample count.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Overrides every registered tolerance.
    pub tolerance: Option<f64>,
    pub quadrature: QuadratureConfig,
}

impl SuiteOptions {
    pub fn new(d: usize, seed: u64) -> Self {
        Self {
            d,
            samples: None,
            seed,
            tolerance: None,
            quadrature: QuadratureConfig::default(),
        }
    }
}

type SampleFn = fn(&mut ChaCha8Rng, usize, &QuadratureConfig) -> Result<Vec<VerificationReport>>;

struct Suite {
    name: &'static str,
    /// Registry entry supplying the default sample count.
    defaults_from: &'static str,
    /// Deterministic suites run once regardless of the sample count.
    fixed: bool,
    run: SampleFn,
}

const SUITES: &[Suite] = &[
    Suite { name: "cross_oracle", defaults_from: "cross_oracle_H", fixed: false, run: cross_oracle },
    Suite { name: "closed_form", defaults_from: "closed_form", fixed: true, run: closed_form },
    Suite { name: "sum_identities", defaults_from: "sum_identities", fixed: false, run: sum_identities },
    Suite { name: "duality", defaults_from: "hq_duality", fixed: false, run: duality },
    Suite { name: "index_sum", defaults_from: "index_sum", fixed: false, run: index_sum },
    Suite { name: "finite_difference", defaults_from: "finite_difference", fixed: false, run: finite_difference },
    Suite { name: "derivative_bounds", defaults_from: "derivative_bounds", fixed: false, run: derivative_bounds },
    Suite { name: "e1_derivative", defaults_from: "e1_derivative", fixed: false, run: e1_derivative },
    Suite { name: "hq_difference", defaults_from: "hq_difference", fixed: false, run: hq_difference },
    Suite { name: "scaling", defaults_from: "scaling", fixed: false, run: scaling },
    Suite { name: "reduction", defaults_from: "reduction", fixed: false, run: reduction },
    Suite { name: "schur", defaults_from: "schur", fixed: false, run: schur },
    Suite { name: "bipartite", defaults_from: "bipartite", fixed: false, run: bipartite },
    Suite { name: "majorant_dominance", defaults_from: "majorant_dominance", fixed: false, run: majorant_dominance },
    Suite { name: "upper_bounds", defaults_from: "upper_bounds", fixed: false, run: upper_bounds },
    Suite { name: "segment_monotonicity", defaults_from: "segment_monotonicity", fixed: false, run: segment },
    Suite { name: "lk_reconstruction", defaults_from: "lk_reconstruction", fixed: false, run: lk_reconstruction },
    Suite { name: "lk_affine", defaults_from: "lk_affine", fixed: true, run: lk_affine_suite },
    Suite { name: "lk_density", defaults_from: "lk_density", fixed: true, run: lk_density },
    Suite { name: "pick", defaults_from: "pick", fixed: false, run: pick },
    Suite { name: "complete_monotonicity", defaults_from: "complete_monotonicity", fixed: false, run: monotonicity },
];

/// Names accepted by [`run_suite`], in the order `run_all` uses.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

/// Runs one suite and returns one report per identity it covers.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let suite = SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::domain(format!("unknown suite {name:?}; known: {}", suite_names().join(", "))))?;
    if opts.d < 2 {
        return Err(Error::domain("verification suites need d >= 2"));
    }
    crate::sympoly::SymPolyPoint::new(vec![1.0; opts.d])?;
    let samples = if suite.fixed {
        1
    } else {
        opts.samples
            .unwrap_or_else(|| lookup(suite.defaults_from).map_or(100, |e| e.samples))
    };
    let per_sample: Vec<Vec<VerificationReport>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(opts.seed, suite.name, opts.d, i);
            (suite.run)(&mut rng, opts.d, &opts.quadrature).unwrap_or_else(|err| {
                let mut r = VerificationReport::new(suite.defaults_from);
                r.record(f64::INFINITY, || json!({"sample": i, "error": err.to_string()}));
                vec![r]
            })
        })
        .collect();

    let mut merged: Vec<VerificationReport> = Vec::new();
    for report in per_sample.into_iter().flatten() {
        match merged.iter_mut().find(|m| m.identity == report.identity) {
            Some(m) => m.merge(report),
            None => merged.push(report),
        }
    }
    if let Some(tol) = opts.tolerance {
        for r in &mut merged {
            r.set_tolerance(tol);
        }
    }
    Ok(merged)
}

/// Every suite in turn.
pub fn run_all(opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for name in suite_names() {
        out.extend(run_suite(name, opts)?);
    }
    Ok(out)
}

fn pv(x: Vec<f64>) -> Result<ProbVector> {
    ProbVector::new(x)
}

fn e_point(x: &[f64]) -> Result<SymPolyPoint> {
    SymPolyPoint::new(elementary_symmetric_slice(x))
}

fn distinct(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    interior(rng, d, 0.1)
}

fn cross_oracle(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let (h, q) = check_cross_oracle(&pv(distinct(rng, d))?, cfg)?;
    Ok(vec![h, q])
}

fn closed_form(_: &mut ChaCha8Rng, _: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    Ok(vec![check_closed_form(cfg)?])
}

fn sum_identities(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let theta = rng.gen_range(0.5..2.0);
    let x: Vec<f64> = distinct(rng, d).into_iter().map(|v| v * theta).collect();
    Ok(vec![check_sum_identities(&e_point(&x)?, cfg)?])
}

fn duality(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    Ok(vec![check_hq_duality(&e_point(&distinct(rng, d))?, cfg)?])
}

fn index_sum(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    Ok(vec![check_index_sum(&e_point(&distinct(rng, d))?, cfg)?])
}

fn finite_difference(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    Ok(vec![check_finite_differences(&e_point(&distinct(rng, d))?, cfg)?])
}

fn derivative_bounds(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let theta = rng.gen_range(0.5..2.0);
    let x: Vec<f64> = distinct(rng, d).into_iter().map(|v| v * theta).collect();
    Ok(vec![check_derivative_bounds(&e_point(&x)?, 3, cfg)?])
}

fn e1_derivative(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let theta = rng.gen_range(1.0..3.0);
    let x: Vec<f64> = interior(rng, d, 0.0).into_iter().map(|v| v * theta).collect();
    Ok(vec![check_e1_derivative(&e_point(&x)?, cfg)?])
}

fn hq_difference(rng: &mut ChaCha8Rng, d: usize, _: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    Ok(vec![check_hq_difference(&pv(dirichlet(rng, d))?)?])
}

fn scaling(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let x = pv(distinct(rng, d))?;
    let theta = rng.gen_range(1.0..4.0);
    Ok(vec![check_scaling(&x, theta, cfg)?, check_scaling_exact(&x, theta)?])
}

fn reduction(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let x = pv(distinct(rng, d))?;
    let mut r = check_reduction(&x, 2, cfg)?;
    if 3 * d <= crate::sympoly::MAX_DIM {
        r.merge(check_reduction(&x, 3, cfg)?);
    }
    Ok(vec![r])
}

fn schur(rng: &mut ChaCha8Rng, d: usize, _: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let (x, y) = robin_hood_pair(rng, d);
    Ok(vec![check_schur_concavity(&pv(x)?, &pv(y)?)?])
}

fn bipartite(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    Ok(vec![check_bipartite(&joint(rng, d, 2), cfg)?])
}

fn majorant_dominance(rng: &mut ChaCha8Rng, d: usize, _: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    Ok(vec![check_majorant_dominance(&pv(dirichlet(rng, d))?)?])
}

fn upper_bounds(rng: &mut ChaCha8Rng, d: usize, _: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let x = dirichlet(rng, d);
    let e = elementary_symmetric_slice(&x);
    let mut attained = check_bound_attainment(e[0], e[1], d)?;
    if d == 2 {
        attained.merge(check_d2_bound_sweep(50)?);
    }
    Ok(vec![check_upper_bounds(&pv(x)?)?, attained])
}

fn segment(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    Ok(vec![check_segment_monotonicity(&pv(distinct(rng, d))?, cfg)?])
}

fn lk_reconstruction(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let e = SymPolyPoint::new(cone_point(rng, d))?;
    let mut r = VerificationReport::new("lk_reconstruction");
    let (h, hr) = (entropy_e(&e, cfg)?, lk_reconstruct_H(&e, cfg)?);
    let (q, qr) = (subentropy_e(&e, cfg)?, lk_reconstruct_Q(&e, cfg)?);
    r.record((h - hr).abs(), || json!({"e": e, "H": h, "H_reconstructed": hr}));
    r.record((q - qr).abs(), || json!({"e": e, "Q": q, "Q_reconstructed": qr}));
    Ok(vec![r])
}

fn lk_affine_suite(_: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let mut r = VerificationReport::new("lk_affine");
    for k in 2..=d {
        let (h, q) = lk_affine(d, k, cfg)?;
        for (family, a) in [("H", h), ("Q", q)] {
            r.record(residual(a.constant, 0.0), || json!({"family": family, "k": k, "affine": a}));
            r.record(residual(a.slope, 0.0), || json!({"family": family, "k": k, "affine": a}));
        }
    }
    Ok(vec![r])
}

/// Log-spaced grid of `n` points over `(1e-3, 1e3)`.
pub fn log_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 10f64.powf(-3.0 + 6.0 * (i as f64 + 0.5) / n as f64))
        .collect()
}

fn lk_density(_: &mut ChaCha8Rng, d: usize, _: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let mut dens = VerificationReport::new("lk_density");
    let mut variety = VerificationReport::new("lk_variety");
    let grid = log_grid(100);
    for (i, &r) in grid.iter().enumerate() {
        for &t in &grid {
            let p = LKSurfacePoint::new(r, t)?;
            if d == 2 && i > 0 {
                // the d = 2 density ignores r
                break;
            }
            let wh = lk_density_H(&p, d)?.weight;
            let wq = lk_density_Q(&p, d)?.weight;
            let bad = |w: f64| -> f64 { if w >= 0.0 && w.is_finite() { 0.0 } else { 1.0 } };
            dens.record(bad(wh).max(bad(wq)), || json!({"r": r, "t_d": t, "weight_H": wh, "weight_Q": wq}));
            variety.merge(check_variety(&p, d));
        }
    }
    Ok(vec![dens, variety])
}

fn pick(rng: &mut ChaCha8Rng, d: usize, cfg: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let base = SymPolyPoint::new(cone_point(rng, d))?;
    let grid = pick_grid(50);
    let mut r = VerificationReport::new("pick");
    for k in 2..=d {
        r.merge(pick_sweep(&base, k, &grid, cfg)?);
    }
    Ok(vec![r])
}

fn monotonicity(rng: &mut ChaCha8Rng, d: usize, _: &QuadratureConfig) -> Result<Vec<VerificationReport>> {
    let e = SymPolyPoint::new(cone_point(rng, d))?;
    let fine = QuadratureConfig::precise();
    let mut r = VerificationReport::new("complete_monotonicity");
    for k in 2..=d {
        let idx = MultiIndex::new(vec![k], d)?;
        r.merge(check_complete_monotonicity("dH/de_k", |p| dh(p, &idx, &fine), &e, k, 4)?);
        r.merge(check_complete_monotonicity("dQ/de_k", |p| dq(p, &idx, &fine), &e, k, 4)?);
        r.merge(check_complete_monotonicity("exp(-H)", |p| Ok((-entropy_e(p, &fine)?).exp()), &e, k, 4)?);
        r.merge(check_complete_monotonicity("exp(-Q)", |p| Ok((-subentropy_e(p, &fine)?).exp()), &e, k, 4)?);
        for m in [2.0, 3.0] {
            let label = format!("exp(-H/{m})");
            r.merge(check_complete_monotonicity(&label, |p| Ok((-entropy_e(p, &fine)? / m).exp()), &e, k, 4)?);
        }
    }
    Ok(vec![r])
}
