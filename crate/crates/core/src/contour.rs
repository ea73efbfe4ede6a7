//! Entropy and subentropy as contour integrals around the roots of `p`,
//! evaluated with the trapezoidal rule on a circle in the right half-plane.
//!
//! `H = -(1/2 pi i) oint z ln z p'(z)/p(z) dz` and
//! `Q = -(1/2 pi i) oint z^d ln z / p(z) dz`.
//! The integrand uses `p` and `p'` from the coefficients, so coincident
//! roots need no special treatment.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sympoly::{p_and_derivative, roots_from_symmetric, SymPolyPoint};

/// A circle `|z - center| = radius` sampled at `nodes` equally spaced angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    pub center: f64,
    pub radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(center: f64, radius: f64, nodes: usize) -> Result<Self> {
        if !(center > 0.0) || !(radius > 0.0) {
            return Err(Error::ContourViolation("center and radius must be positive".into()));
        }
        if center - radius <= 0.0 {
            return Err(Error::ContourViolation(
                "circle meets the closed negative real axis".into(),
            ));
        }
        if nodes < 16 {
            return Err(Error::ContourViolation("at least 16 nodes are required".into()));
        }
        Ok(Self { center, radius, nodes })
    }
}

/// Real part of a contour integral plus the imaginary part left over by
/// the discretisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourValue {
    pub value: f64,
    pub imag_residue: f64,
    pub nodes: usize,
}

/// Minimum clearance between every root and the circle.
const CLEARANCE: f64 = 1e-6;

fn validate(e: &SymPolyPoint, c: &ContourSpec) -> Result<()> {
    let roots = roots_from_symmetric(e, 1e-14)?;
    for z in &roots.roots {
        let dist = (z - Complex64::new(c.center, 0.0)).norm();
        if dist >= c.radius - CLEARANCE {
            return Err(Error::ContourViolation(format!(
                "root {} lies outside or within {CLEARANCE:e} of the circle",
                fmt_root(*z)
            )));
        }
    }
    Ok(())
}

fn fmt_root(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Entropy,
    Subentropy,
}

fn integrand(e: &SymPolyPoint, kind: Kind, z: Complex64) -> Complex64 {
    let (p, dp) = p_and_derivative(e, z);
    let zl = z * z.ln();
    match kind {
        Kind::Entropy => zl * dp / p,
        Kind::Subentropy => zl * z.powu(e.dim() as u32 - 1) / p,
    }
}

/// `sum F(z_j) e^{i theta_j}` over the nodes `j = offset, offset+step, ...`
/// of an `n`-point rule.
/// Also returns `sum |F(z_j)|`, which sets the rounding floor.
fn partial_sum(e: &SymPolyPoint, kind: Kind, c: &ContourSpec, n: usize, offset: usize, step: usize) -> (Complex64, f64) {
    let mut s = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    let mut j = offset;
    while j < n {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let w = Complex64::from_polar(1.0, theta);
        let f = integrand(e, kind, c.center + w * c.radius);
        mag += f.norm();
        s += f * w;
        j += step;
    }
    (s, mag)
}

fn finish(sum: Complex64, c: &ContourSpec, n: usize) -> ContourValue {
    let v = -sum * (c.radius / n as f64);
    ContourValue {
        value: v.re,
        imag_residue: v.im,
        nodes: n,
    }
}

fn fixed(e: &SymPolyPoint, c: &ContourSpec, kind: Kind) -> Result<ContourValue> {
    validate(e, c)?;
    Ok(finish(partial_sum(e, kind, c, c.nodes, 0, 1).0, c, c.nodes))
}

/// `H` on the given circle.
pub fn entropy_contour(e: &SymPolyPoint, c: &ContourSpec) -> Result<f64> {
    fixed(e, c, Kind::Entropy).map(|v| v.value)
}

pub fn entropy_contour_detailed(e: &SymPolyPoint, c: &ContourSpec) -> Result<ContourValue> {
    fixed(e, c, Kind::Entropy)
}

/// `Q` on the given circle.
pub fn subentropy_contour(e: &SymPolyPoint, c: &ContourSpec) -> Result<f64> {
    fixed(e, c, Kind::Subentropy).map(|v| v.value)
}

pub fn subentropy_contour_detailed(e: &SymPolyPoint, c: &ContourSpec) -> Result<ContourValue> {
    fixed(e, c, Kind::Subentropy)
}

/// The default circle: centered midway between the extreme roots with
/// radius `(x_max - x_min)/2 + x_min/2`. Requires real positive roots.
pub fn auto_contour(e: &SymPolyPoint) -> Result<ContourSpec> {
    let roots = roots_from_symmetric(e, 1e-14)?;
    let real = roots.real_roots().ok_or_else(|| {
        Error::ContourViolation("complex roots: no admissible circle around the spectrum".into())
    })?;
    let lo = real.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = real.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0) {
        return Err(Error::ContourViolation(
            "a root at the origin cannot be enclosed while excluding it".into(),
        ));
    }
    ContourSpec::new(0.5 * (lo + hi), 0.5 * (hi - lo) + 0.5 * lo, 64)
}

const MAX_NODES: usize = 1 << 21;
const CONVERGED: f64 = 1e-13;

fn adaptive(e: &SymPolyPoint, kind: Kind) -> Result<ContourValue> {
    let c = auto_contour(e)?;
    validate(e, &c)?;
    let mut n = c.nodes;
    let (mut sum, mut mag) = partial_sum(e, kind, &c, n, 0, 1);
    let mut prev = finish(sum, &c, n);
    while n < MAX_NODES {
        // the 2n-point rule reuses every node of the n-point one
        let (s, m) = partial_sum(e, kind, &c, 2 * n, 1, 2);
        sum += s;
        mag += m;
        n *= 2;
        let cur = finish(sum, &c, n);
        // clustered roots make the terms cancel heavily
        let floor = 64.0 * f64::EPSILON * mag * c.radius / n as f64;
        if (cur.value - prev.value).abs() <= (CONVERGED * cur.value.abs().max(1.0)).max(floor) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::ConvergenceFailure { iterations: MAX_NODES })
}

/// `H` on the default circle, doubling the node count until it settles.
pub fn entropy_contour_auto(e: &SymPolyPoint) -> Result<ContourValue> {
    adaptive(e, Kind::Entropy)
}

/// `Q` on the default circle, doubling the node count until it settles.
pub fn subentropy_contour_auto(e: &SymPolyPoint) -> Result<ContourValue> {
    adaptive(e, Kind::Subentropy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn pt(v: &[f64]) -> SymPolyPoint {
        SymPolyPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn fixed_circle_values() {
        let c = ContourSpec::new(0.5, 0.2, 512).unwrap();
        assert!((entropy_contour(&pt(&[1.0, 0.24]), &c).unwrap() - 0.673_011_667_009_256).abs() < 1e-12);
        assert!((entropy_contour(&pt(&[1.0, 0.25]), &c).unwrap() - LN_2).abs() < 1e-12);
        assert!((subentropy_contour(&pt(&[1.0, 0.24]), &c).unwrap() - 0.186_453_537_279_459).abs() < 1e-12);
        assert!((subentropy_contour(&pt(&[1.0, 0.25]), &c).unwrap() - (LN_2 - 0.5)).abs() < 1e-12);

        let c = ContourSpec::new(0.45, 0.2, 512).unwrap();
        let h = entropy_contour(&pt(&[0.9, 0.18]), &c).unwrap();
        let oracle = -0.6 * 0.6f64.ln() - 0.3 * 0.3f64.ln();
        assert!((h - oracle).abs() < 1e-12);
        assert!((h - 0.667_687_215_557_375).abs() < 1e-12);
    }

    #[test]
    fn imaginary_residue_is_small() {
        let c = ContourSpec::new(0.5, 0.2, 512).unwrap();
        let v = entropy_contour_detailed(&pt(&[1.0, 0.24]), &c).unwrap();
        assert!(v.imag_residue.abs() < 1e-9);
    }

    #[test]
    fn spectral_convergence() {
        let e = pt(&[1.0, 0.24]);
        let a = entropy_contour(&e, &ContourSpec::new(0.5, 0.2, 256).unwrap()).unwrap();
        let b = entropy_contour(&e, &ContourSpec::new(0.5, 0.2, 512).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn violations() {
        assert!(matches!(ContourSpec::new(0.2, 0.3, 64), Err(Error::ContourViolation(_))));
        assert!(matches!(ContourSpec::new(0.5, 0.2, 8), Err(Error::ContourViolation(_))));
        let c = ContourSpec::new(0.5, 0.05, 64).unwrap();
        assert!(matches!(entropy_contour(&pt(&[1.0, 0.24]), &c), Err(Error::ContourViolation(_))));
        assert!(matches!(entropy_contour_auto(&pt(&[1.0, 0.0, 0.0])), Err(Error::ContourViolation(_))));
        assert!(matches!(entropy_contour_auto(&pt(&[1.0, 0.3])), Err(Error::ContourViolation(_))));
    }

    #[test]
    fn auto_mode() {
        let v = entropy_contour_auto(&pt(&[1.0, 0.24])).unwrap();
        assert!((v.value - 0.673_011_667_009_256).abs() < 1e-12);
        let e = crate::sympoly::elementary_symmetric_slice(&[0.02, 0.18, 0.3, 0.5]);
        let q = subentropy_contour_auto(&pt(&e)).unwrap();
        let direct = crate::direct::subentropy_slice(&[0.02, 0.18, 0.3, 0.5]);
        assert!((q.value - direct).abs() < 1e-11);
    }
}
