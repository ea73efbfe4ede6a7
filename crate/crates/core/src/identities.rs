//! Checks of the identities, inequalities, and bounds satisfied by `H`
//! and `Q`. Every check returns a [`VerificationReport`] whose residuals
//! are relative (`|a - b| / max(1, |a|, |b|)`) for equalities and the
//! normalised violation for inequalities.

use serde::Serialize;
use serde_json::json;

use crate::direct::{entropy_slice, subentropy_slice};
use crate::error::{Error, Result};
use crate::fd::ridders;
use crate::halfaxis::{dh, dq, entropy_e, entropy_e_log_form, factorial, subentropy_e, MultiIndex};
use crate::contour::{entropy_contour_auto, subentropy_contour_auto};
use crate::quadrature::QuadratureConfig;
use crate::report::{excess, residual, BoundReport, VerificationReport};
use crate::sympoly::{elementary_symmetric_slice, ProbVector, SymPolyPoint};

fn point(e: Vec<f64>) -> Result<SymPolyPoint> {
    SymPolyPoint::new(e)
}

fn e_of(x: &[f64]) -> Result<SymPolyPoint> {
    point(elementary_symmetric_slice(x))
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// An `m`-element multi-index with entries in `1..=d` summing to `k_sum`.
pub fn representative_index(m: usize, k_sum: usize, d: usize) -> Result<MultiIndex> {
    if k_sum < m || k_sum > m * d {
        return Err(Error::domain(format!("no {m}-fold index in 1..={d} sums to {k_sum}")));
    }
    let mut v = vec![1; m];
    let mut rest = k_sum - m;
    for slot in &mut v {
        let add = rest.min(d - 1);
        *slot += add;
        rest -= add;
    }
    MultiIndex::new(v, d)
}

fn alt_sign(m: usize) -> f64 {
    if m % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Every H evaluator against every other, and likewise for Q. Returns the
/// `(H, Q)` reports.
pub fn check_cross_oracle(x: &ProbVector, cfg: &QuadratureConfig) -> Result<(VerificationReport, VerificationReport)> {
    let e = e_of(x.values())?;
    let hs = [
        entropy_slice(x.values()),
        entropy_e(&e, cfg)?,
        entropy_e_log_form(&e, cfg)?,
        entropy_contour_auto(&e)?.value,
    ];
    let qs = [
        subentropy_slice(x.values()),
        subentropy_e(&e, cfg)?,
        subentropy_contour_auto(&e)?.value,
    ];
    let pairwise = |name: &str, v: &[f64]| {
        let mut r = VerificationReport::new(name);
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                r.record(residual(v[i], v[j]), || json!({"x": x, "values": v, "pair": [i, j]}));
            }
        }
        r
    };
    Ok((pairwise("cross_oracle_H", &hs), pairwise("cross_oracle_Q", &qs)))
}

/// Closed-form values at the uniform two-point distribution.
pub fn check_closed_form(cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let ln2 = std::f64::consts::LN_2;
    let e = point(vec![1.0, 0.25])?;
    let i = |v: &[usize]| MultiIndex::new(v.to_vec(), 2);
    let cases = [
        ("H", entropy_e(&e, cfg)?, ln2),
        ("Q", subentropy_e(&e, cfg)?, ln2 - 0.5),
        ("dH/de1", dh(&e, &i(&[1])?, cfg)?, ln2 - 2.0),
        ("dH/de2", dh(&e, &i(&[2])?, cfg)?, 2.0),
        ("d2H/de1de1", dh(&e, &i(&[1, 1])?, cfg)?, -2.0 / 3.0),
        ("dQ/de2", dq(&e, &i(&[2])?, cfg)?, 2.0 / 3.0),
    ];
    let mut r = VerificationReport::new("closed_form");
    for (name, got, want) in cases {
        r.record(residual(got, want), || json!({"quantity": name, "computed": got, "expected": want}));
    }
    Ok(r)
}

/// `H = e_1 + sum k e_k dH/de_k`, `Q = e_1 + sum e_k dH/de_k`, and the
/// same first sum written with `f_k = e_k^(1/k)`. Terms with `e_k = 0`
/// vanish.
pub fn check_sum_identities(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let d = e.dim();
    let h = entropy_e(e, cfg)?;
    let q = subentropy_e(e, cfg)?;
    let (mut weighted, mut plain, mut f_form) = (e.e(1), e.e(1), e.e(1));
    for k in 1..=d {
        let ek = e.e(k);
        if ek == 0.0 {
            continue;
        }
        let g = dh(e, &MultiIndex::new(vec![k], d)?, cfg)?;
        weighted += k as f64 * ek * g;
        plain += ek * g;
        let f = ek.powf(1.0 / k as f64);
        f_form += f * (g * k as f64 * f.powi(k as i32 - 1));
    }
    let mut r = VerificationReport::new("sum_identities");
    let w = || json!({"e": e, "H": h, "Q": q, "H_sum": weighted, "Q_sum": plain, "f_sum": f_form});
    r.record(residual(h, weighted), w);
    r.record(residual(q, plain), w);
    r.record(residual(weighted, f_form), w);
    Ok(r)
}

/// `d^(k-1) / ((d-k+1) C(d-1, k-2) e_1^(k-1))`.
pub fn c_bound(d: usize, k: usize, e1: f64) -> Result<f64> {
    if k < 2 || k > d {
        return Err(Error::domain(format!("c-bound needs 2 <= k <= d, got k = {k}, d = {d}")));
    }
    if !(e1 > 0.0) {
        return Err(Error::domain("c-bound needs e_1 > 0"));
    }
    let d_f = d as f64;
    Ok(d_f.powi(k as i32 - 1) / ((d - k + 1) as f64 * binom(d - 1, k - 2) * e1.powi(k as i32 - 1)))
}

/// Lower bounds on signed derivatives of order `m <= max_m`:
/// `(-1)^(m-1) d^m H >= c_{md,K}(m e_1)` and
/// `(-1)^(m-1) d^m Q >= c_{(m+1)d,K}((m+1) e_1)`.
pub fn check_derivative_bounds(e: &SymPolyPoint, max_m: usize, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let d = e.dim();
    let e1 = e.e(1);
    let mut r = VerificationReport::new("derivative_bounds");
    for m in 1..=max_m {
        let s = alt_sign(m);
        for k_sum in m.max(2)..=m * d {
            let idx = representative_index(m, k_sum, d)?;
            let h = s * dh(e, &idx, cfg)?;
            let ch = c_bound(m * d, k_sum, m as f64 * e1)?;
            r.record(excess(ch, h), || json!({"e": e, "index": idx.indices(), "family": "H", "value": h, "bound": ch}));
            let q = s * dq(e, &idx, cfg)?;
            let cq = c_bound((m + 1) * d, k_sum, (m + 1) as f64 * e1)?;
            r.record(excess(cq, q), || json!({"e": e, "index": idx.indices(), "family": "Q", "value": q, "bound": cq}));
        }
    }
    Ok(r)
}

/// `-dQ/de_k = d^2 H / de_l de_m` whenever `k = l + m`.
pub fn check_hq_duality(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let d = e.dim();
    let mut r = VerificationReport::new("hq_duality");
    for k in 2..=d {
        let lhs = -dq(e, &MultiIndex::new(vec![k], d)?, cfg)?;
        for l in 1..k {
            let rhs = dh(e, &MultiIndex::new(vec![l, k - l], d)?, cfg)?;
            r.record(residual(lhs, rhs), || json!({"e": e, "k": k, "l": l, "m": k - l, "minus_dQ": lhs, "d2H": rhs}));
        }
    }
    Ok(r)
}

fn ridders_step(v: f64) -> f64 {
    0.2 * v
}

/// Derivative of `g` along `e_k`, by extrapolated central differences.
fn fd_along(
    e: &SymPolyPoint,
    k: usize,
    g: impl Fn(&SymPolyPoint) -> Result<f64>,
) -> Result<(f64, f64)> {
    let ek = e.e(k);
    ridders(|t| g(&e.with(k, t)?), ek, ridders_step(ek))
}

/// Second derivatives depend on the index pair only through `i + j`: the
/// derivative along `e_i` of `dH/de_j`, taken by finite differences, is
/// compared against the half-axis value for every pair with the same sum.
/// Requires all `e_k > 0`.
pub fn check_index_sum(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let d = e.dim();
    let fine = QuadratureConfig::precise();
    let mut r = VerificationReport::new("index_sum");
    for i in 1..=d {
        for j in 1..=d {
            let inner = MultiIndex::new(vec![j], d)?;
            let (num, err) = fd_along(e, i, |p| dh(p, &inner, &fine))?;
            let k_sum = i + j;
            let exact = dh(e, &representative_index(2, k_sum, d)?, cfg)?;
            r.record(residual(num, exact), || {
                json!({"e": e, "i": i, "j": j, "finite_difference": num, "fd_error": err, "integral": exact})
            });
        }
    }
    Ok(r)
}

/// First and second half-axis derivatives against finite differences of
/// the function one order lower.
pub fn check_finite_differences(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let d = e.dim();
    let fine = QuadratureConfig::precise();
    let mut r = VerificationReport::new("finite_difference");
    for k in 1..=d {
        let idx = MultiIndex::new(vec![k], d)?;
        let (num, _) = fd_along(e, k, |p| entropy_e(p, &fine))?;
        let exact = dh(e, &idx, cfg)?;
        r.record(residual(num, exact), || json!({"e": e, "family": "H", "index": [k], "fd": num, "integral": exact}));
        let (num, _) = fd_along(e, k, |p| subentropy_e(p, &fine))?;
        let exact = dq(e, &idx, cfg)?;
        r.record(residual(num, exact), || json!({"e": e, "family": "Q", "index": [k], "fd": num, "integral": exact}));
        let (num, _) = fd_along(e, 1, |p| dh(p, &idx, &fine))?;
        let exact = dh(e, &MultiIndex::new(vec![1, k], d)?, cfg)?;
        r.record(residual(num, exact), || json!({"e": e, "family": "H", "index": [1, k], "fd": num, "integral": exact}));
    }
    Ok(r)
}

/// `dH/de_1 <= -1` once `e_1 >= 1`.
pub fn check_e1_derivative(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    if e.e(1) < 1.0 {
        return Err(Error::domain("the e_1 derivative bound needs e_1 >= 1"));
    }
    let g = dh(e, &MultiIndex::new(vec![1], e.dim())?, cfg)?;
    let mut r = VerificationReport::new("e1_derivative");
    r.record(excess(g, -1.0), || json!({"e": e, "dH_de1": g}));
    Ok(r)
}

/// `sum_{k>=2} d^(k-1) e_k / (C(d-1, k-1) e_1^(k-1))`.
pub fn hq_difference_lower_bound(e: &SymPolyPoint) -> Result<f64> {
    let d = e.dim();
    let e1 = e.e(1);
    if (2..=d).all(|k| e.e(k) == 0.0) {
        return Ok(0.0);
    }
    if !(e1 > 0.0) {
        return Err(Error::domain("the H - Q bound needs e_1 > 0"));
    }
    Ok((2..=d)
        .map(|k| (d as f64).powi(k as i32 - 1) * e.e(k) / (binom(d - 1, k - 1) * e1.powi(k as i32 - 1)))
        .sum())
}

/// Lower bound on `H - Q` with its slack, using half-axis values.
pub fn hq_difference_bound(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<BoundReport> {
    let bound = hq_difference_lower_bound(e)?;
    let diff = entropy_e(e, cfg)? - subentropy_e(e, cfg)?;
    Ok(BoundReport {
        bound_value: bound,
        attained_at: None,
        slack: diff - bound,
    })
}

/// `H - Q` against its lower bound and the bound's first term, for a point
/// given by its x-coordinates.
pub fn check_hq_difference(x: &ProbVector) -> Result<VerificationReport> {
    let e = e_of(x.values())?;
    let d = e.dim();
    let diff = entropy_slice(x.values()) - subentropy_slice(x.values());
    let bound = hq_difference_lower_bound(&e)?;
    let first = if d >= 2 && e.e(1) > 0.0 {
        d as f64 * e.e(2) / ((d - 1) as f64 * e.e(1))
    } else {
        0.0
    };
    let mut r = VerificationReport::new("hq_difference");
    r.record(excess(bound, diff), || json!({"x": x, "H_minus_Q": diff, "bound": bound}));
    r.record(excess(first, diff), || json!({"x": x, "H_minus_Q": diff, "first_term": first}));
    Ok(r)
}

/// The set `(a, ..., a, b)` with `a <= b` sharing `e_1` and `e_2`, which
/// maximises every higher `e_k`.
pub fn canonical_majorant(e1: f64, e2: f64, d: usize) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::domain("the canonical set needs d >= 2"));
    }
    if !(e1 >= 0.0 && e2 >= 0.0) || !e1.is_finite() || !e2.is_finite() {
        return Err(Error::domain("e_1 and e_2 must be finite and non-negative"));
    }
    let n = (d - 1) as f64;
    let lead = n * e1;
    let mut disc = lead * lead - 2.0 * e2 * d as f64 * n;
    if disc < 0.0 {
        if disc >= -1e-12 * lead * lead {
            disc = 0.0;
        } else {
            return Err(Error::domain(format!(
                "no real canonical set: (d-1)^2 e1^2 - 2 e2 d (d-1) = {disc} < 0"
            )));
        }
    }
    let denom = lead + disc.sqrt();
    let a = if denom > 0.0 { 2.0 * e2 / denom } else { 0.0 };
    Ok((a, e1 - n * a))
}

fn canonical_set(a: f64, b: f64, d: usize) -> Vec<f64> {
    let mut v = vec![a; d - 1];
    v.push(b);
    v
}

/// `e_k(x) <= e_k(a, ..., a, b)` for every `k`.
pub fn check_majorant_dominance(x: &ProbVector) -> Result<VerificationReport> {
    let d = x.dim();
    let e = elementary_symmetric_slice(x.values());
    let (a, b) = canonical_majorant(e[0], e[1], d)?;
    let f = elementary_symmetric_slice(&canonical_set(a, b, d));
    let mut r = VerificationReport::new("majorant_dominance");
    for k in 0..d {
        r.record(excess(e[k], f[k]), || json!({"x": x, "k": k + 1, "e_k": e[k], "f_k": f[k]}));
    }
    Ok(r)
}

/// Upper bounds depending only on `e_1`, `e_2`, and `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBounds {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "H_bound")]
    pub h_bound: f64,
    #[serde(rename = "Q_bound")]
    pub q_bound: f64,
    /// `-e_1 ln e_1 + ln(d) sqrt(2 d e_2 / (d - 1))`, for comparison.
    #[serde(rename = "HU_bound")]
    pub hu_bound: f64,
}

fn xlnx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

pub fn hq_upper_bounds(e1: f64, e2: f64, d: usize) -> Result<UpperBounds> {
    let (a, b) = canonical_majorant(e1, e2, d)?;
    let d_f = d as f64;
    Ok(UpperBounds {
        a,
        b,
        h_bound: -(d_f - 1.0) * xlnx(a) - xlnx(b),
        q_bound: subentropy_slice(&canonical_set(a, b, d)),
        hu_bound: -xlnx(e1) + d_f.ln() * (2.0 * d_f * e2 / (d_f - 1.0)).sqrt(),
    })
}

/// `H(x) <= H_bound` and `Q(x) <= Q_bound`.
pub fn check_upper_bounds(x: &ProbVector) -> Result<VerificationReport> {
    let e = elementary_symmetric_slice(x.values());
    let b = hq_upper_bounds(e[0], e[1], x.dim())?;
    let h = entropy_slice(x.values());
    let q = subentropy_slice(x.values());
    let mut r = VerificationReport::new("upper_bounds");
    r.record(excess(h, b.h_bound), || json!({"x": x, "H": h, "bounds": b}));
    r.record(excess(q, b.q_bound), || json!({"x": x, "Q": q, "bounds": b}));
    Ok(r)
}

/// Half-axis `H` and `Q` at the canonical set reproduce the bounds.
pub fn check_bound_attainment(e1: f64, e2: f64, d: usize) -> Result<VerificationReport> {
    let b = hq_upper_bounds(e1, e2, d)?;
    let e = e_of(&canonical_set(b.a, b.b, d))?;
    let fine = QuadratureConfig::precise();
    let h = entropy_e(&e, &fine)?;
    let q = subentropy_e(&e, &fine)?;
    let mut r = VerificationReport::new("bound_attainment");
    r.record(residual(h, b.h_bound), || json!({"e1": e1, "e2": e2, "d": d, "H": h, "bounds": b}));
    r.record(residual(q, b.q_bound), || json!({"e1": e1, "e2": e2, "d": d, "Q": q, "bounds": b}));
    Ok(r)
}

/// For `d = 2` the canonical set is the only preimage of `(e_1, e_2)`, so
/// the bound equals `H` across the admissible region. Sweeps `n` points.
pub fn check_d2_bound_sweep(n: usize) -> Result<VerificationReport> {
    let fine = QuadratureConfig::precise();
    let mut r = VerificationReport::new("bound_attainment");
    let side = (n as f64).sqrt().ceil() as usize;
    'outer: for i in 0..side {
        for j in 0..side {
            if i * side + j >= n {
                break 'outer;
            }
            let e1 = 0.5 + 1.5 * (i as f64 + 0.5) / side as f64;
            let e2 = 0.25 * e1 * e1 * (j as f64 + 0.5) / side as f64;
            let b = hq_upper_bounds(e1, e2, 2)?;
            let h = entropy_e(&point(vec![e1, e2])?, &fine)?;
            r.record(residual(h, b.h_bound), || json!({"e1": e1, "e2": e2, "H": h, "H_bound": b.h_bound}));
        }
    }
    Ok(r)
}

/// `H` and `Q` are non-decreasing along the straight segment from `e(x)`
/// to the canonical set with the same `e_1`, `e_2`.
pub fn check_segment_monotonicity(x: &ProbVector, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    const STEPS: usize = 10;
    let d = x.dim();
    let e = elementary_symmetric_slice(x.values());
    let (a, b) = canonical_majorant(e[0], e[1], d)?;
    let f = elementary_symmetric_slice(&canonical_set(a, b, d));
    let mut r = VerificationReport::new("segment_monotonicity");
    let mut prev: Option<(f64, f64)> = None;
    for s in 0..=STEPS {
        let t = s as f64 / STEPS as f64;
        let p = point(e.iter().zip(&f).map(|(u, v)| (1.0 - t) * u + t * v).collect())?;
        let cur = (entropy_e(&p, cfg)?, subentropy_e(&p, cfg)?);
        if let Some(last) = prev {
            r.record(excess(last.0, cur.0), || json!({"x": x, "t": t, "family": "H", "before": last.0, "after": cur.0}));
            r.record(excess(last.1, cur.1), || json!({"x": x, "t": t, "family": "Q", "before": last.1, "after": cur.1}));
        }
        prev = Some(cur);
    }
    Ok(r)
}

/// `true` when `x` majorizes `y`.
pub fn majorizes(x: &[f64], y: &[f64]) -> bool {
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.total_cmp(a));
    ys.sort_by(|a, b| b.total_cmp(a));
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if sx < sy - 1e-12 {
            return false;
        }
    }
    true
}

/// `H(x) <= H(y)` and `Q(x) <= Q(y)` when `x` majorizes `y`. The order of
/// the arguments does not matter.
pub fn check_schur_concavity(x: &ProbVector, y: &ProbVector) -> Result<VerificationReport> {
    if x.dim() != y.dim() {
        return Err(Error::domain("vectors have different dimensions"));
    }
    if (x.sum() - y.sum()).abs() > 1e-12 * x.sum().max(1.0) {
        return Err(Error::NotComparable);
    }
    let (big, small) = if majorizes(x.values(), y.values()) {
        (x, y)
    } else if majorizes(y.values(), x.values()) {
        (y, x)
    } else {
        return Err(Error::NotComparable);
    };
    let mut r = VerificationReport::new("schur");
    let (hb, hs) = (entropy_slice(big.values()), entropy_slice(small.values()));
    let (qb, qs) = (subentropy_slice(big.values()), subentropy_slice(small.values()));
    r.record(excess(hb, hs), || json!({"majorizing": big, "majorized": small, "H": [hb, hs]}));
    r.record(excess(qb, qs), || json!({"majorizing": big, "majorized": small, "Q": [qb, qs]}));
    Ok(r)
}

/// A signed derivative evaluated at a marginal and at the joint it comes
/// from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativePair {
    pub family: &'static str,
    pub index: Vec<usize>,
    pub marginal: f64,
    pub joint: f64,
}

fn marginal_and_flat(joint: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    if joint.is_empty() || joint.iter().any(|row| row.len() != joint[0].len() || row.is_empty()) {
        return Err(Error::domain("joint distribution must be a non-empty rectangular matrix"));
    }
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    ProbVector::new(flat.clone())?;
    Ok((joint.iter().map(|row| row.iter().sum()).collect(), flat))
}

/// `(-1)^(m-1) d^m H` and the same for `Q`, `m in {1, 2}`, at the e-point
/// of the row marginal `A` and of the flattened joint `AB`, for every
/// index sum reachable with indices up to `dim A`.
pub fn bipartite_derivative_pairs(joint: &[Vec<f64>], cfg: &QuadratureConfig) -> Result<Vec<DerivativePair>> {
    let (a, ab) = marginal_and_flat(joint)?;
    let (ea, eab) = (e_of(&a)?, e_of(&ab)?);
    let da = a.len();
    let mut out = Vec::new();
    for m in 1..=2 {
        let s = alt_sign(m);
        for k_sum in m..=m * da {
            let ia = representative_index(m, k_sum, da)?;
            let iab = MultiIndex::new(ia.indices().to_vec(), ab.len())?;
            out.push(DerivativePair {
                family: "H",
                index: ia.indices().to_vec(),
                marginal: s * dh(&ea, &ia, cfg)?,
                joint: s * dh(&eab, &iab, cfg)?,
            });
            out.push(DerivativePair {
                family: "Q",
                index: ia.indices().to_vec(),
                marginal: s * dq(&ea, &ia, cfg)?,
                joint: s * dq(&eab, &iab, cfg)?,
            });
        }
    }
    Ok(out)
}

/// Refining a distribution raises `H` and `Q` and lowers every signed
/// derivative of order one and two.
pub fn check_bipartite(joint: &[Vec<f64>], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let (a, ab) = marginal_and_flat(joint)?;
    let mut r = VerificationReport::new("bipartite");
    let (ha, hab) = (entropy_slice(&a), entropy_slice(&ab));
    let (qa, qab) = (subentropy_slice(&a), subentropy_slice(&ab));
    r.record(excess(ha, hab), || json!({"joint": joint, "H_A": ha, "H_AB": hab}));
    r.record(excess(qa, qab), || json!({"joint": joint, "Q_A": qa, "Q_AB": qab}));
    for p in bipartite_derivative_pairs(joint, cfg)? {
        r.record(excess(p.joint, p.marginal), || json!({"joint": joint, "pair": p}));
    }
    Ok(r)
}

/// The five scaling relations for `theta >= 1`: `Q(theta x) <= theta Q(x)`,
/// `H(theta x) <= theta H(x)`, `Q(theta e) <= theta Q(e)`,
/// `H(theta e) <= theta H(e)`, and
/// `Q(theta x) - theta Q(x) = H(theta x) - theta H(x)`.
pub fn check_scaling(x: &ProbVector, theta: f64, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    if !(theta >= 1.0) {
        return Err(Error::domain("scaling relations need theta >= 1"));
    }
    let xs = x.scaled(theta)?;
    let e = e_of(x.values())?;
    let es = e.scaled(theta)?;
    let (h, q) = (entropy_slice(x.values()), subentropy_slice(x.values()));
    let (hs, qs) = (entropy_slice(xs.values()), subentropy_slice(xs.values()));
    let (he, qe) = (entropy_e(&e, cfg)?, subentropy_e(&e, cfg)?);
    let (hes, qes) = (entropy_e(&es, cfg)?, subentropy_e(&es, cfg)?);
    let mut r = VerificationReport::new("scaling");
    let w = || json!({"x": x, "theta": theta});
    r.record(excess(qs, theta * q), w);
    r.record(excess(hs, theta * h), w);
    r.record(excess(qes, theta * qe), w);
    r.record(excess(hes, theta * he), w);
    r.record(residual(qs - theta * q, hs - theta * h), w);
    Ok(r)
}

/// `F(theta x) = theta F(x) - theta e_1 ln theta` for `F = H, Q`.
pub fn check_scaling_exact(x: &ProbVector, theta: f64) -> Result<VerificationReport> {
    let xs = x.scaled(theta)?;
    let shift = theta * x.sum() * theta.ln();
    let mut r = VerificationReport::new("scaling_exact");
    let h = (entropy_slice(xs.values()), theta * entropy_slice(x.values()) - shift);
    let q = (subentropy_slice(xs.values()), theta * subentropy_slice(x.values()) - shift);
    r.record(residual(h.0, h.1), || json!({"x": x, "theta": theta, "H": [h.0, h.1]}));
    r.record(residual(q.0, q.1), || json!({"x": x, "theta": theta, "Q": [q.0, q.1]}));
    Ok(r)
}

/// `(-1)^(m-1) d^m H / de_{k_1}...de_{k_m} = (m-1)! dH~/de~_K`, where `e~`
/// belongs to `x` with every entry repeated `m` times.
pub fn check_reduction(x: &ProbVector, m: usize, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let d = x.dim();
    let repeated: Vec<f64> = x.values().iter().flat_map(|&v| std::iter::repeat(v).take(m)).collect();
    let e = e_of(x.values())?;
    let et = e_of(&repeated)?;
    let mut r = VerificationReport::new("reduction");
    for k_sum in m..=m * d {
        let idx = representative_index(m, k_sum, d)?;
        let lhs = alt_sign(m) * dh(&e, &idx, cfg)?;
        let rhs = factorial(m - 1) * dh(&et, &MultiIndex::new(vec![k_sum], m * d)?, cfg)?;
        r.record(residual(lhs, rhs), || json!({"x": x, "m": m, "K": k_sum, "lhs": lhs, "rhs": rhs}));
    }
    Ok(r)
}
