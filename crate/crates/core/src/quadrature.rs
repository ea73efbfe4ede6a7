//! Globally adaptive Gauss-Kronrod (G7/K15) quadrature on `[0, 1]`, used
//! for every half-axis integral after the map `tau = u / (1 - u)`.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1 {
            return Err(Error::domain("tolerances must be positive and max_subdivisions at least 1"));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    /// Tighter settings for values that feed finite differences.
    pub fn precise() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_subdivisions: 2000,
        }
    }
}

/// Scalar types the integrator accepts.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

// published to more digits than an f64 holds
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One K15 panel: `(kronrod, |kronrod - gauss|)`.
pub fn gk15<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[i];
        if i % 2 == 1 {
            g = g + s * WG[i / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).modulus())
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Narrowest panel the integrator will split.
const MIN_WIDTH: f64 = 1e-14;

/// Integrates `f` over `[0, 1]` starting from the given interior
/// breakpoints. Panels touching `u = 0` are split geometrically, all
/// others by bisection.
pub fn integrate_unit<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate<T>> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&u| u > 0.0 && u < 1.0 && u.is_finite())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(0.0);
    edges.extend(cuts);
    edges.push(1.0);

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel<T>> = Vec::new();
    for w in edges.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1]);
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut subdivisions = 0;
    loop {
        let (total, err) = totals(heap.iter().chain(frozen.iter()));
        if !total.modulus().is_finite() || !err.is_finite() {
            return Err(Error::QuadratureFailure {
                error: f64::INFINITY,
                subdivisions,
            });
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.modulus()) {
            let panels = heap.len() + frozen.len();
            let mut all: Vec<Panel<T>> = heap.into_vec();
            all.extend(frozen);
            all.sort_by(|p, q| p.a.total_cmp(&q.a));
            let (value, error) = totals(all.iter());
            return Ok(Estimate { value, error, panels });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Err(Error::QuadratureFailure {
                    error: err,
                    subdivisions,
                })
            }
        };
        if worst.b - worst.a < MIN_WIDTH {
            frozen.push(worst);
            continue;
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::QuadratureFailure {
                error: err,
                subdivisions,
            });
        }
        subdivisions += 1;
        let mid = if worst.a == 0.0 {
            worst.b / 16.0
        } else {
            0.5 * (worst.a + worst.b)
        };
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&mut f, a, b);
            heap.push(Panel { a, b, value, error });
        }
    }
}

fn totals<'a, T: Integrand + 'a>(panels: impl Iterator<Item = &'a Panel<T>>) -> (T, f64) {
    panels.fold((T::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// Integrates over a finite interval `[a, b]` by rescaling to `[0, 1]`.
pub fn integrate_interval<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate<T>> {
    let w = b - a;
    let bp: Vec<f64> = breakpoints.iter().map(|&x| (x - a) / w).collect();
    let est = integrate_unit(|s| f(a + w * s), &bp, cfg)?;
    Ok(Estimate {
        value: est.value * w,
        error: est.error * w.abs(),
        panels: est.panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        // K15 integrates degree 22 exactly
        let (v, _) = gk15(&mut |x: f64| x.powi(20), 0.0, 1.0);
        assert!((v - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_integrals() {
        let cfg = QuadratureConfig::default();
        let r = integrate_unit(|u: f64| (3.0 * u).exp(), &[], &cfg).unwrap();
        assert!((r.value - ((3f64).exp() - 1.0) / 3.0).abs() < 1e-12);
        let r = integrate_interval(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &[], &cfg).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_at_zero() {
        let cfg = QuadratureConfig::default();
        let r = integrate_unit(|u: f64| u.ln(), &[], &cfg).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10);
        let loose = QuadratureConfig::new(1e-6, 1e-8, 200).unwrap();
        let r = integrate_unit(|u: f64| 1.0 / u.sqrt(), &[], &loose).unwrap();
        assert!((r.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn complex_values() {
        let cfg = QuadratureConfig::default();
        let r = integrate_unit(|u: f64| Complex64::new(0.0, u).exp(), &[], &cfg).unwrap();
        let exact = (Complex64::new(0.0, 1.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn reports_failure_when_budget_is_exhausted() {
        let cfg = QuadratureConfig::new(1e-14, 1e-16, 2).unwrap();
        let r = integrate_unit(|u: f64| (40.0 * u).sin().abs(), &[], &cfg);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn invalid_config() {
        assert!(QuadratureConfig::new(0.0, 1e-12, 10).is_err());
        assert!(QuadratureConfig::new(1e-10, 1e-12, 0).is_err());
    }
}
