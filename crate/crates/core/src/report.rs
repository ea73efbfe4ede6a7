//! Verification reports and the tolerance registry.

use serde::Serialize;
use serde_json::Value;

/// Bumped whenever a tolerance or default sample count changes.
pub const REGISTRY_VERSION: &str = "2026.10-1";

/// Tolerance for checks whose inputs come from adaptive quadrature.
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Tolerance for checks built only from closed-form evaluations.
pub const ALGEBRAIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceEntry {
    pub identity: &'static str,
    pub tolerance: f64,
    pub samples: usize,
}

const fn entry(identity: &'static str, tolerance: f64, samples: usize) -> ToleranceEntry {
    ToleranceEntry {
        identity,
        tolerance,
        samples,
    }
}

/// Every identity with its pass threshold and default sample count.
pub const REGISTRY: &[ToleranceEntry] = &[
    entry("cross_oracle_H", QUADRATURE_TOL, 200),
    entry("cross_oracle_Q", QUADRATURE_TOL, 200),
    entry("closed_form", 1e-9, 1),
    entry("sum_identities", QUADRATURE_TOL, 100),
    entry("hq_duality", QUADRATURE_TOL, 100),
    entry("index_sum", QUADRATURE_TOL, 100),
    entry("finite_difference", 1e-6, 100),
    entry("derivative_bounds", QUADRATURE_TOL, 100),
    entry("e1_derivative", QUADRATURE_TOL, 100),
    entry("hq_difference", ALGEBRAIC_TOL, 100),
    entry("scaling", QUADRATURE_TOL, 100),
    entry("scaling_exact", ALGEBRAIC_TOL, 100),
    entry("reduction", QUADRATURE_TOL, 100),
    entry("schur", ALGEBRAIC_TOL, 50),
    entry("bipartite", QUADRATURE_TOL, 50),
    entry("majorant_dominance", ALGEBRAIC_TOL, 100),
    entry("upper_bounds", ALGEBRAIC_TOL, 100),
    entry("bound_attainment", ALGEBRAIC_TOL, 100),
    entry("segment_monotonicity", QUADRATURE_TOL, 100),
    entry("lk_reconstruction", 1e-4, 20),
    entry("lk_affine", 1e-6, 1),
    entry("lk_density", ALGEBRAIC_TOL, 1),
    entry("lk_variety", 1e-12, 100),
    entry("pick", QUADRATURE_TOL, 1),
    entry("complete_monotonicity", QUADRATURE_TOL, 10),
];

pub fn lookup(identity: &str) -> Option<&'static ToleranceEntry> {
    REGISTRY.iter().find(|e| e.identity == identity)
}

/// Registered tolerance; unknown names fall back to the quadrature level.
pub fn tolerance(identity: &str) -> f64 {
    lookup(identity).map_or(QUADRATURE_TOL, |e| e.tolerance)
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn residual(a: f64, b: f64) -> f64 {
    sanitize((a - b).abs() / 1f64.max(a.abs()).max(b.abs()))
}

/// Normalised violation of `lhs <= rhs`; zero when it holds.
pub fn excess(lhs: f64, rhs: f64) -> f64 {
    sanitize((lhs - rhs).max(0.0) / 1f64.max(lhs.abs()).max(rhs.abs()))
}

fn sanitize(r: f64) -> f64 {
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

/// Outcome of checking one identity over a batch of inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Checks skipped because the signal was below the noise floor.
    pub inconclusive: usize,
    pub worst_witness: Value,
    pub registry_version: &'static str,
}

impl VerificationReport {
    pub fn new(identity: &str) -> Self {
        Self::with_tolerance(identity, tolerance(identity))
    }

    pub fn with_tolerance(identity: &str, tolerance: f64) -> Self {
        Self {
            identity: identity.to_string(),
            samples: 0,
            max_residual: 0.0,
            tolerance,
            pass: true,
            inconclusive: 0,
            worst_witness: Value::Null,
            registry_version: REGISTRY_VERSION,
        }
    }

    /// Records one check. The first input attaining the maximum residual
    /// is kept as the witness.
    pub fn record(&mut self, residual: f64, witness: impl FnOnce() -> Value) {
        let residual = sanitize(residual);
        if residual > self.max_residual || (self.samples == 0 && self.worst_witness.is_null()) {
            if residual > self.max_residual || self.worst_witness.is_null() {
                self.worst_witness = witness();
            }
            self.max_residual = self.max_residual.max(residual);
        }
        self.samples += 1;
        self.pass = self.max_residual < self.tolerance;
    }

    pub fn record_inconclusive(&mut self) {
        self.inconclusive += 1;
    }

    /// Folds another report for the same identity into this one.
    pub fn merge(&mut self, other: VerificationReport) {
        if other.max_residual > self.max_residual || self.worst_witness.is_null() {
            self.worst_witness = other.worst_witness;
        }
        self.max_residual = self.max_residual.max(other.max_residual);
        self.samples += other.samples;
        self.inconclusive += other.inconclusive;
        self.pass = self.max_residual < self.tolerance;
    }

    /// Replaces the tolerance and recomputes the verdict.
    pub fn set_tolerance(&mut self, tolerance: f64) {
        self.tolerance = tolerance;
        self.pass = self.max_residual < tolerance;
    }
}

/// A bound together with how far a value sits from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_value: f64,
    pub attained_at: Option<Vec<f64>>,
    /// `bound - actual` for upper bounds, `actual - bound` for lower bounds.
    pub slack: f64,
}
