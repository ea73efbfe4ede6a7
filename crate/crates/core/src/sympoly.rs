//! Probability vectors, elementary symmetric coordinates, and the two
//! polynomials built from them:
//!
//! * `p(z) = z^d - e1 z^(d-1) + ... + (-1)^d e_d`, whose roots are the x's;
//! * `q(t) = t^d + e1 t^(d-1) + ... + e_d`, whose roots are the negated x's.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 32;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if d > MAX_DIM {
        return Err(Error::domain(format!("dimension {d} exceeds the supported maximum {MAX_DIM}")));
    }
    Ok(())
}

/// Non-negative x-coordinates. The entries need not sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_dim(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain(format!("x[{i}] = {v} is not a finite non-negative number")));
            }
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Multiplies every entry by `theta`.
    pub fn scaled(&self, theta: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * theta).collect())
    }
}

/// A point `(e_1, ..., e_d)` of the closed positive cone.
///
/// Every non-negative tuple is accepted, including those that do not come
/// from any non-negative x (their `p` has complex roots).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SymPolyPoint {
    coeffs: Vec<f64>,
}

impl SymPolyPoint {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        check_dim(coeffs.len())?;
        for (i, &v) in coeffs.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain(format!("e_{} = {v} is not a finite non-negative number", i + 1)));
            }
        }
        Ok(Self { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// `(e_1, ..., e_d)`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `e_k` with the conventions `e_0 = 1` and `e_k = 0` for `k > d`.
    pub fn e(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            k if k <= self.coeffs.len() => self.coeffs[k - 1],
            _ => 0.0,
        }
    }

    /// Number of trailing zero coordinates (`e_d = e_(d-1) = ... = 0`).
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().rev().take_while(|&&v| v == 0.0).count()
    }

    /// Multiplies every coordinate by `theta`.
    pub fn scaled(&self, theta: f64) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|v| v * theta).collect())
    }

    /// Returns a copy with `e_k` replaced.
    pub fn with(&self, k: usize, value: f64) -> Result<Self> {
        let mut c = self.coeffs.clone();
        c[k - 1] = value;
        Self::new(c)
    }
}

/// A complexified point used for upper-half-plane checks: `e_1 = 1`, every
/// coordinate real and non-negative except at most one with positive
/// imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSymPolyPoint {
    coeffs: Vec<Complex64>,
}

impl ComplexSymPolyPoint {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        check_dim(coeffs.len())?;
        if coeffs[0] != Complex64::new(1.0, 0.0) {
            return Err(Error::domain("complex points require e_1 = 1"));
        }
        let mut complex_count = 0;
        for (i, c) in coeffs.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::domain(format!("e_{} is not finite", i + 1)));
            }
            if c.im != 0.0 {
                if c.im < 0.0 {
                    return Err(Error::domain(format!("e_{} lies in the lower half-plane", i + 1)));
                }
                complex_count += 1;
            } else if c.re < 0.0 {
                return Err(Error::domain(format!("real coordinate e_{} is negative", i + 1)));
            }
        }
        if complex_count > 1 {
            return Err(Error::domain("at most one coordinate may be non-real"));
        }
        Ok(Self { coeffs })
    }

    /// Builds the point obtained from a real one by replacing `e_k` with `z`.
    pub fn from_real_with(e: &SymPolyPoint, k: usize, z: Complex64) -> Result<Self> {
        let mut c: Vec<Complex64> = e.coeffs().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        if k == 0 || k > c.len() {
            return Err(Error::domain(format!("coordinate index {k} out of range")));
        }
        c[k - 1] = z;
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The real point, if no coordinate is non-real.
    pub fn as_real(&self) -> Option<SymPolyPoint> {
        if self.coeffs.iter().all(|c| c.im == 0.0) {
            SymPolyPoint::new(self.coeffs.iter().map(|c| c.re).collect()).ok()
        } else {
            None
        }
    }
}

/// How the roots of `p` are arranged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    AllRealNonnegative,
    ConjugatePairs,
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootCluster {
    pub center_re: f64,
    pub center_im: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    /// Roots sorted by real part, then imaginary part.
    pub roots: Vec<Complex64>,
    pub classification: RootClass,
    /// Roots within [`CLUSTER_DISTANCE`] of each other, with multiplicity.
    pub clusters: Vec<RootCluster>,
}

impl RootSet {
    /// Real parts of the roots when they are all real.
    pub fn real_roots(&self) -> Option<Vec<f64>> {
        match self.classification {
            RootClass::AllRealNonnegative => Some(self.roots.iter().map(|z| z.re).collect()),
            RootClass::ConjugatePairs => None,
        }
    }
}

/// Absolute distance below which roots are grouped into one cluster.
pub const CLUSTER_DISTANCE: f64 = 1e-8;

/// Coefficients of `prod (t + x_j)` below the leading one, i.e. `e_1..e_d`.
pub fn elementary_symmetric_slice(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut e = vec![0.0; d + 1];
    e[0] = 1.0;
    for (n, &xi) in x.iter().enumerate() {
        for k in (1..=n + 1).rev() {
            e[k] += xi * e[k - 1];
        }
    }
    e.remove(0);
    e
}

pub fn elementary_symmetric(x: &ProbVector) -> SymPolyPoint {
    SymPolyPoint {
        coeffs: elementary_symmetric_slice(x.values()),
    }
}

/// `q(t)` by Horner's rule.
pub fn q_eval(e: &SymPolyPoint, tau: f64) -> f64 {
    e.coeffs().iter().fold(1.0, |acc, &c| acc * tau + c)
}

pub fn q_eval_complex(e: &SymPolyPoint, tau: Complex64) -> Complex64 {
    e.coeffs().iter().fold(Complex64::new(1.0, 0.0), |acc, &c| acc * tau + c)
}

/// `p(z)` by Horner's rule.
pub fn p_eval(e: &SymPolyPoint, z: Complex64) -> Complex64 {
    p_and_derivative(e, z).0
}

/// `(p(z), p'(z))`.
pub fn p_and_derivative(e: &SymPolyPoint, z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for (i, &c) in e.coeffs().iter().enumerate() {
        let a = if i % 2 == 0 { -c } else { c };
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All `d` roots of `p` by Aberth-Ehrlich simultaneous iteration.
pub fn roots_from_symmetric(e: &SymPolyPoint, tol: f64) -> Result<RootSet> {
    if !(tol > 0.0) {
        return Err(Error::domain("root tolerance must be positive"));
    }
    let d = e.dim();
    // coefficients of p, highest degree first
    let a: Vec<f64> = std::iter::once(1.0)
        .chain(e.coeffs().iter().enumerate().map(|(i, &c)| if i % 2 == 0 { -c } else { c }))
        .collect();

    let mut z: Vec<Complex64> = if d == 1 {
        vec![Complex64::new(e.e(1), 0.0)]
    } else {
        aberth(e, &a, tol)?
    };

    let snap = |w: Complex64| {
        if w.im.abs() <= 1e-7 * (1.0 + w.norm()) {
            Complex64::new(w.re, 0.0)
        } else {
            w
        }
    };
    z = z.into_iter().map(snap).collect();

    for w in z.iter_mut() {
        if w.im == 0.0 && w.re < 0.0 {
            if w.re < -tol * (1.0 + max_coeff(e)) {
                return Err(Error::domain(format!("negative real root {}", w.re)));
            }
            w.re = 0.0;
        }
    }

    z.sort_by(|u, v| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)));
    let classification = if z.iter().all(|w| w.im == 0.0) {
        RootClass::AllRealNonnegative
    } else {
        RootClass::ConjugatePairs
    };
    let clusters = cluster(&z);
    Ok(RootSet {
        roots: z,
        classification,
        clusters,
    })
}

fn max_coeff(e: &SymPolyPoint) -> f64 {
    e.coeffs().iter().fold(0.0, |m: f64, &v| m.max(v))
}

const ABERTH_MAX_ITER: usize = 200;

fn aberth(e: &SymPolyPoint, a: &[f64], tol: f64) -> Result<Vec<Complex64>> {
    let d = e.dim();
    let radius = 1.0 + max_coeff(e);
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let abs_coeffs: Vec<f64> = a.iter().map(|c| c.abs()).collect();

    for _ in 0..ABERTH_MAX_ITER {
        let mut done = true;
        let snapshot = z.clone();
        for i in 0..d {
            let zi = snapshot[i];
            let (p, dp) = p_and_derivative(e, zi);
            let noise = 8.0 * f64::EPSILON * abs_coeffs.iter().fold(0.0, |acc, &c| acc * zi.norm() + c);
            if p.norm() <= noise {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = zi - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] = zi - step;
            if step.norm() > tol * (1.0 + zi.norm()) {
                done = false;
            }
        }
        if done {
            return Ok(z);
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: ABERTH_MAX_ITER,
    })
}

fn cluster(z: &[Complex64]) -> Vec<RootCluster> {
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    'outer: for &w in z {
        for g in groups.iter_mut() {
            if (g.0 - w).norm() <= CLUSTER_DISTANCE {
                g.0 = (g.0 * g.1 as f64 + w) / (g.1 as f64 + 1.0);
                g.1 += 1;
                continue 'outer;
            }
        }
        groups.push((w, 1));
    }
    groups
        .into_iter()
        .map(|(c, m)| RootCluster {
            center_re: c.re,
            center_im: c.im,
            multiplicity: m,
        })
        .collect()
}
