//! Levy-Khintchine densities of `H` and `Q` on the slice `e_1 = 1`, the
//! reconstruction of both functions from them, and the sign checks that
//! follow: complete monotonicity along a coordinate and the Pick property.
//!
//! With `t_(d-i) = r^i t_d` the measure lives on a two-dimensional surface
//! parametrised by `(r, t_d)`. Writing `a = r^(d-1)(r + 1)` and
//! `b = sum_{i>=2} e_i r^(d-i)`,
//!
//! `H(1, e_2, ..)` = `int dr int (1 - exp(-t b)) exp(-t a) / t dt`,
//! `Q(1, e_2, ..)` = `int dr int (1 - exp(-t b)) r^d exp(-t a) dt`.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fd::forward_differences;
use crate::halfaxis::{breakpoints, entropy_e_complex, subentropy_e_complex};
use crate::quadrature::{integrate_interval, integrate_unit, QuadratureConfig};
use crate::report::VerificationReport;
use crate::sympoly::{ComplexSymPolyPoint, SymPolyPoint};

/// A point of the support surface: `r = t_(d-1)/t_d` and `t_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LKSurfacePoint {
    pub r: f64,
    pub t_d: f64,
}

impl LKSurfacePoint {
    pub fn new(r: f64, t_d: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite() && t_d > 0.0 && t_d.is_finite()) {
            return Err(Error::domain("surface coordinates must be finite and positive"));
        }
        Ok(Self { r, t_d })
    }

    /// `(t_2, ..., t_d)` with `t_j = r^(d-j) t_d`.
    pub fn coordinates(&self, d: usize) -> Vec<f64> {
        (2..=d).map(|j| self.r.powi((d - j) as i32) * self.t_d).collect()
    }
}

/// Largest relative violation of `t_i t_j = t_k t_l` over all index pairs
/// with `i + j = k + l`.
pub fn check_variety(p: &LKSurfacePoint, d: usize) -> VerificationReport {
    let t = p.coordinates(d);
    let at = |i: usize| t[i - 2];
    let mut r = VerificationReport::new("lk_variety");
    for i in 2..=d {
        for j in i..=d {
            for k in 2..=d {
                let Some(l) = (i + j).checked_sub(k) else { continue };
                if l < k || l > d {
                    continue;
                }
                let (x, y) = (at(i) * at(j), at(k) * at(l));
                let rel = (x - y).abs() / x.abs().max(y.abs());
                r.record(rel, || json!({"r": p.r, "t_d": p.t_d, "d": d, "pairs": [[i, j], [k, l]]}));
            }
        }
    }
    r
}

/// Density value after integrating out the delta factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LKDensityValue {
    pub weight: f64,
}

fn exponent_rate(r: f64, d: usize) -> f64 {
    r.powi(d as i32 - 1) * (r + 1.0)
}

/// `int_0^inf tau^power exp(-t tau (tau + 1)) dtau`.
fn gaussian_moment(t: f64, power: i32) -> Result<f64> {
    let scale = 1.0 / t.sqrt();
    let bps = [scale / (1.0 + scale), (1.0 / t) / (1.0 + 1.0 / t)];
    let cfg = QuadratureConfig::precise();
    integrate_unit(
        |u: f64| {
            let tau = u / (1.0 - u);
            let v = (-t * tau * (tau + 1.0)).exp();
            if v == 0.0 {
                0.0
            } else {
                v * tau.powi(power) * (1.0 + tau) * (1.0 + tau)
            }
        },
        &bps,
        &cfg,
    )
    .map(|e| e.value)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::domain("densities need d >= 2"));
    }
    Ok(())
}

/// Density of the measure for `H`: `exp(-t_d a) / t_d` on the `(r, t_d)`
/// surface for `d >= 3`, and `phi_2(t_2) / t_2` with
/// `phi_2(t) = int exp(-(tau^2 + tau) t) dtau` for `d = 2`.
#[allow(non_snake_case)]
pub fn lk_density_H(p: &LKSurfacePoint, d: usize) -> Result<LKDensityValue> {
    check_dim(d)?;
    let t = p.t_d;
    let weight = if d == 2 {
        gaussian_moment(t, 0)? / t
    } else {
        (-t * exponent_rate(p.r, d)).exp() / t
    };
    Ok(LKDensityValue { weight })
}

/// Density of the measure for `Q`: `r^d exp(-t_d a)` for `d >= 3`, and
/// `int tau^2 exp(-(tau^2 + tau) t_2) dtau` for `d = 2`.
#[allow(non_snake_case)]
pub fn lk_density_Q(p: &LKSurfacePoint, d: usize) -> Result<LKDensityValue> {
    check_dim(d)?;
    let t = p.t_d;
    let weight = if d == 2 {
        gaussian_moment(t, 2)?
    } else {
        (d as f64 * p.r.ln() - t * exponent_rate(p.r, d)).exp()
    };
    Ok(LKDensityValue { weight })
}

#[derive(Clone, Copy)]
enum Family {
    Entropy,
    Subentropy,
}

fn inner_config() -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: 1e-11,
        abs_tol: 1e-300,
        max_subdivisions: 1000,
    }
}

/// `int (1 - exp(-t b)) w(tau, t) dt` over `y = ln t`.
fn inner(e: &[f64], tau: f64, family: Family) -> Result<f64> {
    let d = e.len();
    let b: f64 = (2..=d).map(|i| e[i - 1] * tau.powi((d - i) as i32)).sum();
    if b == 0.0 {
        return Ok(0.0);
    }
    let ln_tau = tau.ln();
    let ln_a = (d - 1) as f64 * ln_tau + tau.ln_1p();
    let ln_b = b.ln();
    let ln_ab = ln_a + (b / ln_a.exp()).ln_1p();
    let ln_ab = if ln_ab.is_finite() { ln_ab } else { ln_a.max(ln_b) };
    let lo = -ln_ab - 40.0;
    let hi = -ln_a + 5.0;
    let shift = match family {
        Family::Entropy => 0.0,
        Family::Subentropy => d as f64 * ln_tau,
    };
    let f = |y: f64| {
        let ta = (y + ln_a).exp();
        let tb = (y + ln_b).exp();
        let extra = match family {
            Family::Entropy => 0.0,
            Family::Subentropy => y + shift,
        };
        -(-tb).exp_m1() * (extra - ta).exp()
    };
    integrate_interval(f, lo, hi, &[-ln_ab, -ln_a], &inner_config()).map(|est| est.value)
}

fn reconstruct(e: &SymPolyPoint, family: Family, cfg: &QuadratureConfig) -> Result<f64> {
    if (e.e(1) - 1.0).abs() > 1e-12 {
        return Err(Error::domain("the reconstruction is defined on the slice e_1 = 1"));
    }
    let c = e.coeffs();
    if c[1..].iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let mut failure = None;
    let est = integrate_unit(
        |u: f64| {
            let tau = u / (1.0 - u);
            match inner(c, tau, family) {
                Ok(v) => v * (1.0 + tau) * (1.0 + tau),
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            }
        },
        &breakpoints(c),
        cfg,
    )?;
    match failure {
        Some(err) => Err(err),
        None => Ok(est.value),
    }
}

/// `H(1, e_2, ..., e_d)` rebuilt from its Levy-Khintchine density.
#[allow(non_snake_case)]
pub fn lk_reconstruct_H(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<f64> {
    reconstruct(e, Family::Entropy, cfg)
}

/// `Q(1, e_2, ..., e_d)` rebuilt from its Levy-Khintchine density.
#[allow(non_snake_case)]
pub fn lk_reconstruct_Q(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<f64> {
    reconstruct(e, Family::Subentropy, cfg)
}

/// Constant and linear part of a Levy-Khintchine representation along
/// `e_k`: the value at `(1, 0, ..., 0)` and the secant slope far out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffinePart {
    pub constant: f64,
    pub slope: f64,
}

const FAR: [f64; 2] = [1e12, 1e14];

fn affine(d: usize, k: usize, family: Family, cfg: &QuadratureConfig) -> Result<AffinePart> {
    if k < 2 || k > d {
        return Err(Error::domain(format!("coordinate {k} outside 2..={d}")));
    }
    let mut base = vec![0.0; d];
    base[0] = 1.0;
    let origin = SymPolyPoint::new(base.clone())?;
    let at = |s: f64| {
        let mut v = base.clone();
        v[k - 1] = s;
        reconstruct(&SymPolyPoint::new(v)?, family, cfg)
    };
    Ok(AffinePart {
        constant: reconstruct(&origin, family, cfg)?,
        slope: (at(FAR[1])? - at(FAR[0])?) / (FAR[1] - FAR[0]),
    })
}

/// The affine parts of the `H` and `Q` representations along `e_k`,
/// which should both vanish.
pub fn lk_affine(d: usize, k: usize, cfg: &QuadratureConfig) -> Result<(AffinePart, AffinePart)> {
    Ok((affine(d, k, Family::Entropy, cfg)?, affine(d, k, Family::Subentropy, cfg)?))
}

/// Relative-step noise assumed for one function evaluation.
const NOISE: f64 = 1e3 * f64::EPSILON;

/// Forward differences of `f` along `e_k`, starting at `point`, with step
/// `1e-2 (1 + e_k)`. Order `j` must have sign `(-1)^j`; differences within
/// the noise floor `2^j 1e3 eps scale` are counted as inconclusive.
pub fn check_complete_monotonicity(
    label: &str,
    f: impl Fn(&SymPolyPoint) -> Result<f64>,
    point: &SymPolyPoint,
    k: usize,
    orders: usize,
) -> Result<VerificationReport> {
    if orders > 6 {
        return Err(Error::domain("at most 6 difference orders are supported"));
    }
    if k == 0 || k > point.dim() {
        return Err(Error::domain(format!("coordinate {k} out of range")));
    }
    let ek = point.e(k);
    let h = 1e-2 * (1.0 + ek);
    let values = (0..=orders)
        .map(|i| f(&point.with(k, ek + i as f64 * h)?))
        .collect::<Result<Vec<f64>>>()?;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut r = VerificationReport::new("complete_monotonicity");
    for (j, delta) in forward_differences(&values).into_iter().enumerate() {
        let floor = 2f64.powi(j as i32) * NOISE * scale;
        let signed = if j % 2 == 0 { delta } else { -delta };
        if delta.abs() <= floor {
            r.record_inconclusive();
            r.record(0.0, || json!({"function": label, "e": point, "k": k, "order": j, "difference": delta}));
        } else {
            let res = if signed > 0.0 { 0.0 } else { 1.0 + delta.abs() / scale.max(f64::MIN_POSITIVE) };
            r.record(res, || json!({"function": label, "e": point, "k": k, "order": j, "difference": delta}));
        }
    }
    Ok(r)
}

/// `n` upper-half-plane points with real parts spread over `[0, 2)` and
/// imaginary parts log-spaced over `[1e-3, 10]`.
pub fn pick_grid(n: usize) -> Vec<Complex64> {
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    (0..n)
        .map(|i| {
            let frac = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.5 };
            let re = 2.0 * ((i as f64 * GOLDEN) % 1.0);
            Complex64::new(re, 10f64.powf(-3.0 + 4.0 * frac))
        })
        .collect()
}

fn indicator(v: f64) -> f64 {
    if v > 0.0 {
        0.0
    } else {
        1.0 + v.abs()
    }
}

/// `Im H > 0` and `Im Q > 0` when `e_k` alone moves into the upper
/// half-plane, for every grid point. `base` must have `e_1 = 1`.
pub fn pick_sweep(base: &SymPolyPoint, k: usize, grid: &[Complex64], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    if k < 2 {
        return Err(Error::domain("the Pick sweep moves a coordinate e_k with k >= 2"));
    }
    let mut r = VerificationReport::new("pick");
    for &z in grid {
        if !(z.im > 0.0) {
            return Err(Error::domain("grid points must lie in the open upper half-plane"));
        }
        let p = ComplexSymPolyPoint::from_real_with(base, k, z)?;
        let h = entropy_e_complex(&p, cfg)?;
        let q = subentropy_e_complex(&p, cfg)?;
        let w = || json!({"e": base, "k": k, "z": [z.re, z.im], "H": [h.re, h.im], "Q": [q.re, q.im]});
        r.record(indicator(h.im), w);
        r.record(indicator(q.im), w);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfaxis::{entropy_e, subentropy_e};
    use std::f64::consts::LN_2;

    fn pt(v: &[f64]) -> SymPolyPoint {
        SymPolyPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn density_values() {
        let p = LKSurfacePoint::new(1.0, 1.0).unwrap();
        let e2 = (-2f64).exp();
        assert!((lk_density_H(&p, 3).unwrap().weight - e2).abs() < 1e-15);
        assert!((lk_density_Q(&p, 3).unwrap().weight - e2).abs() < 1e-15);
        let p = LKSurfacePoint::new(2.0, 0.5).unwrap();
        assert!((lk_density_Q(&p, 3).unwrap().weight - 8.0 * (-6f64).exp()).abs() < 1e-15);
        let w = lk_density_H(&LKSurfacePoint::new(1.0, 1.0).unwrap(), 2).unwrap().weight;
        assert!((w - 0.545_641_360_765_047).abs() < 1e-12);
        assert!(LKSurfacePoint::new(0.0, 1.0).is_err());
    }

    #[test]
    fn variety_relations() {
        for (r, t) in [(0.3, 2.0), (7.0, 1e-3), (1e3, 1e3)] {
            let p = LKSurfacePoint::new(r, t).unwrap();
            assert!(check_variety(&p, 6).pass);
        }
    }

    #[test]
    fn reconstruction_examples() {
        let cfg = QuadratureConfig::default();
        assert!((lk_reconstruct_H(&pt(&[1.0, 0.25]), &cfg).unwrap() - LN_2).abs() < 1e-6);
        assert!((lk_reconstruct_Q(&pt(&[1.0, 0.25]), &cfg).unwrap() - (LN_2 - 0.5)).abs() < 1e-6);
        assert_eq!(lk_reconstruct_H(&pt(&[1.0, 0.0, 0.0]), &cfg).unwrap(), 0.0);
        assert_eq!(lk_reconstruct_Q(&pt(&[1.0, 0.0]), &cfg).unwrap(), 0.0);
        let e = pt(&[1.0, 0.2, 0.05]);
        assert!((lk_reconstruct_H(&e, &cfg).unwrap() - entropy_e(&e, &cfg).unwrap()).abs() < 1e-5);
        assert!((lk_reconstruct_Q(&e, &cfg).unwrap() - subentropy_e(&e, &cfg).unwrap()).abs() < 1e-5);
        assert!(lk_reconstruct_H(&pt(&[0.9, 0.2]), &cfg).is_err());
    }

    #[test]
    fn affine_part_vanishes() {
        let cfg = QuadratureConfig::default();
        let (h, q) = lk_affine(3, 2, &cfg).unwrap();
        for a in [h, q] {
            assert!(a.constant.abs() < 1e-6 && a.slope.abs() < 1e-6, "{a:?}");
        }
    }

    #[test]
    fn monotonicity_examples() {
        let cfg = QuadratureConfig::precise();
        let e = pt(&[1.0, 0.25]);
        let idx = crate::halfaxis::MultiIndex::new(vec![2], 2).unwrap();
        let r = check_complete_monotonicity("dH", |p| crate::halfaxis::dh(p, &idx, &cfg), &e, 2, 4).unwrap();
        assert!(r.pass, "{r:?}");
        let r = check_complete_monotonicity("exp(-H)", |p| Ok((-entropy_e(p, &cfg)?).exp()), &e, 2, 4).unwrap();
        assert!(r.pass, "{r:?}");
        let r = check_complete_monotonicity("const", |_| Ok(1.0), &e, 2, 4).unwrap();
        assert!(r.pass && r.inconclusive == 4);
        let r = check_complete_monotonicity("increasing", |p| Ok(p.e(2)), &e, 2, 2).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn pick_examples() {
        let cfg = QuadratureConfig::default();
        let grid = [
            Complex64::new(0.1, 0.1),
            Complex64::new(0.25, 0.5),
            Complex64::new(1.0, 2.0),
            Complex64::new(0.25, 1e-6),
        ];
        let r = pick_sweep(&pt(&[1.0, 0.25]), 2, &grid, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        let r = pick_sweep(&pt(&[1.0, 0.3, 0.02, 0.001]), 3, &pick_grid(50), &cfg).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
