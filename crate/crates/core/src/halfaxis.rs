//! Entropy, subentropy, and their mixed partial derivatives in
//! e-coordinates, as integrals over `tau in [0, inf)` of rational or
//! logarithmic functions of `q(tau) = tau^d + e_1 tau^(d-1) + ... + e_d`.
//!
//! Every integrand is written with its leading terms cancelled
//! analytically, then integrated on `u in [0, 1)` through `tau = u/(1-u)`.
//! For `tau > 1` polynomials are evaluated in `s = 1/tau` with reversed
//! coefficients so no large powers are formed.

use std::ops::{Div, Mul};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Direction, Error, Result};
use crate::quadrature::{integrate_unit, Estimate, Integrand, QuadratureConfig};
use crate::sympoly::{ComplexSymPolyPoint, SymPolyPoint};

/// An ordered list of coordinate indices naming a mixed partial derivative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiIndex {
    indices: Vec<usize>,
    sum: usize,
}

impl MultiIndex {
    pub fn new(indices: Vec<usize>, d: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::domain("a multi-index needs at least one entry"));
        }
        if let Some(&k) = indices.iter().find(|&&k| k == 0 || k > d) {
            return Err(Error::domain(format!("index {k} outside 1..={d}")));
        }
        let sum = indices.iter().sum();
        Ok(Self { indices, sum })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of derivatives `m`.
    pub fn order(&self) -> usize {
        self.indices.len()
    }

    /// `K = k_1 + ... + k_m`.
    pub fn sum(&self) -> usize {
        self.sum
    }
}

/// Arithmetic shared by the real and complex integrands.
pub(crate) trait Scalar:
    Integrand + Mul<Output = Self> + Div<Output = Self> + From<f64> + PartialEq
{
    fn ln(self) -> Self;
    /// `ln(1 + w) / w`, continuous at `w = 0`.
    fn ln1p_ratio(self) -> Self;
}

impl Scalar for f64 {
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn ln1p_ratio(self) -> Self {
        if self == 0.0 {
            1.0
        } else {
            self.ln_1p() / self
        }
    }
}

impl Scalar for Complex64 {
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn ln1p_ratio(self) -> Self {
        let w = self;
        if w.norm() < 1e-3 {
            // 1 - w/2 + w^2/3 - w^3/4 + w^4/5 - w^5/6
            let mut acc = Complex64::new(-1.0 / 6.0, 0.0);
            for k in (0..5).rev() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc = acc * w + sign / (k + 1) as f64;
            }
            acc
        } else {
            let modulus = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
            let arg = w.im.atan2(1.0 + w.re);
            Complex64::new(modulus, arg) / w
        }
    }
}

fn horner<T: Scalar>(coeffs: &[T], x: f64) -> T {
    coeffs.iter().fold(T::zero(), |acc, &c| acc * x + c)
}

fn horner_rev<T: Scalar>(coeffs: &[T], s: f64) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * s + c)
}

fn powu<T: Scalar>(x: T, n: usize) -> T {
    let mut r = T::from(1.0);
    for _ in 0..n {
        r = r * x;
    }
    r
}

/// `N(tau) / (Q(tau)^p (1 + tau)^r)` with `Q` monic and
/// `p deg Q + r - deg N >= 2`.
struct Rational<T> {
    num: Vec<T>,
    den: Vec<T>,
    power: usize,
    shifted: bool,
}

impl<T: Scalar> Rational<T> {
    fn decay(&self) -> i64 {
        (self.power * (self.den.len() - 1)) as i64 + self.shifted as i64 - (self.num.len() as i64 - 1)
    }

    /// Integrand in the `u` variable, Jacobian included.
    fn mapped(&self, u: f64) -> T {
        let r = self.shifted as i32;
        if u <= 0.5 {
            let tau = u / (1.0 - u);
            let n = horner(&self.num, tau);
            let q = powu(horner(&self.den, tau), self.power);
            let jac = 1.0 / ((1.0 - u) * (1.0 - u));
            n / q * ((1.0 + tau).powi(-r) * jac)
        } else {
            let s = (1.0 - u) / u;
            let e = self.decay();
            let n = horner_rev(&self.num, s);
            let q = powu(horner_rev(&self.den, s), self.power);
            n / q * (s.powi((e - 2) as i32) * (1.0 + s).powi(2 - r))
        }
    }
}

/// Breakpoints in `u` at the root scales suggested by the coefficients.
pub(crate) fn breakpoints(mags: &[f64]) -> Vec<f64> {
    let mut scales = Vec::new();
    let mut prev = 1.0;
    for (i, &m) in mags.iter().enumerate() {
        if m > 0.0 {
            let k = (i + 1) as f64;
            scales.push(m.powf(1.0 / k));
            if prev > 0.0 {
                scales.push(m / prev);
            }
        }
        prev = m;
    }
    let mut u: Vec<f64> = scales
        .into_iter()
        .filter(|r| r.is_finite() && *r > 0.0)
        .map(|r| r / (1.0 + r))
        .filter(|&u| u > 1e-12 && u < 1.0 - 1e-12)
        .collect();
    u.push(0.5);
    u.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in u {
        if out.last().map_or(true, |&l| (x - l) > 0.02 * x.min(1.0 - x).max(1e-300)) {
            out.push(x);
        }
    }
    out
}

fn integrate_rational<T: Scalar>(f: &Rational<T>, mags: &[f64], cfg: &QuadratureConfig) -> Result<Estimate<T>> {
    debug_assert!(f.decay() >= 2);
    integrate_unit(|u| f.mapped(u), &breakpoints(mags), cfg)
}

fn ensure_nonzero(e: &SymPolyPoint) -> Result<()> {
    if e.coeffs().iter().all(|&v| v == 0.0) {
        return Err(Error::domain("at least one e_k must be positive"));
    }
    Ok(())
}

/// Coordinates with trailing zeros removed.
fn reduced(e: &[f64]) -> &[f64] {
    let z = e.iter().rev().take_while(|&&v| v == 0.0).count();
    &e[..e.len() - z]
}

fn monic<T: Scalar>(e: &[T]) -> Vec<T> {
    std::iter::once(T::from(1.0)).chain(e.iter().copied()).collect()
}

fn coeff<T: Scalar>(e: &[T], k: usize) -> T {
    if k >= 1 && k <= e.len() {
        e[k - 1]
    } else {
        T::zero()
    }
}

fn h_integrand<T: Scalar>(e: &[T]) -> Rational<T> {
    let d = e.len();
    let e1 = coeff(e, 1);
    let num = (1..=d)
        .map(|j| coeff(e, j + 1) * ((j + 1) as f64) + (T::from(j as f64) - e1) * coeff(e, j))
        .collect();
    Rational {
        num,
        den: monic(e),
        power: 1,
        shifted: true,
    }
}

fn q_integrand<T: Scalar>(e: &[T]) -> Rational<T> {
    let d = e.len();
    let e1 = coeff(e, 1);
    let num = (1..=d)
        .map(|j| coeff(e, j + 1) + (T::from(1.0) - e1) * coeff(e, j))
        .collect();
    Rational {
        num,
        den: monic(e),
        power: 1,
        shifted: true,
    }
}

/// `H(e)` together with quadrature diagnostics.
pub fn entropy_e_estimate(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<Estimate<f64>> {
    ensure_nonzero(e)?;
    let r = reduced(e.coeffs());
    integrate_rational(&h_integrand(r), r, cfg)
}

/// `H(e) = int_0^inf [-tau q'/q - e_1/(tau+1) + d] dtau`.
pub fn entropy_e(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<f64> {
    entropy_e_estimate(e, cfg).map(|r| r.value)
}

pub fn subentropy_e_estimate(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<Estimate<f64>> {
    ensure_nonzero(e)?;
    let r = reduced(e.coeffs());
    integrate_rational(&q_integrand(r), r, cfg)
}

/// `Q(e) = int_0^inf [-tau^d/q - e_1/(tau+1) + 1] dtau`.
pub fn subentropy_e(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<f64> {
    subentropy_e_estimate(e, cfg).map(|r| r.value)
}

/// Log-form integrand `ln q + (e_1 - d) ln tau - e_1 ln(1 + tau)` in `u`.
///
/// For `tau > 1` the three logarithms are merged into
/// `ln1p((A(s) - B(s)) / (1+s)^e_1)` with `A = q~(s) - 1 - e_1 s` and
/// `B = (1+s)^e_1 - 1 - e_1 s`, both `O(s^2)`, so the integrand is formed
/// without cancellation.
fn log_form_mapped<T: Scalar>(e: &[T], e1: f64, u: f64) -> T {
    let d = e.len() as f64;
    if u <= 0.5 {
        let tau = u / (1.0 - u);
        let q = horner(&monic(e), tau);
        let val = q.ln() + T::from((e1 - d) * tau.ln() - e1 * tau.ln_1p());
        val * (1.0 / ((1.0 - u) * (1.0 - u)))
    } else {
        let s = (1.0 - u) / u;
        let a2 = if e.len() >= 2 { horner_rev(&e[1..], s) } else { T::zero() };
        let b2 = binomial_tail(e1, s);
        let scale = (1.0 + s).powf(-e1);
        let w_over = (a2 - T::from(b2)) * scale;
        let w = w_over * (s * s);
        w_over * w.ln1p_ratio() * ((1.0 + s) * (1.0 + s))
    }
}

/// `((1+s)^a - 1 - a s) / s^2` for `0 < s <= 1`.
fn binomial_tail(a: f64, s: f64) -> f64 {
    if s >= 0.25 {
        return ((1.0 + s).powf(a) - 1.0 - a * s) / (s * s);
    }
    let mut c = 0.5 * a * (a - 1.0);
    let mut sum = 0.0;
    let mut sp = 1.0;
    for n in 2..400 {
        let term = c * sp;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() && n > 4 || c == 0.0 {
            break;
        }
        c *= (a - n as f64) / (n as f64 + 1.0);
        sp *= s;
    }
    sum
}

/// `H(e)` from the integrated-by-parts logarithmic integrand.
pub fn entropy_e_log_form(e: &SymPolyPoint, cfg: &QuadratureConfig) -> Result<f64> {
    ensure_nonzero(e)?;
    let r = reduced(e.coeffs());
    let e1 = e.e(1);
    integrate_unit(|u| log_form_mapped(r, e1, u), &breakpoints(r), cfg).map(|est| est.value)
}

fn complex_reduced(e: &ComplexSymPolyPoint) -> Vec<Complex64> {
    let c = e.coeffs();
    let z = c.iter().rev().take_while(|v| v.norm() == 0.0).count();
    c[..c.len() - z].to_vec()
}

fn magnitudes(c: &[Complex64]) -> Vec<f64> {
    c.iter().map(|v| v.norm()).collect()
}

/// Analytic continuation of `H` to a complexified point, through the
/// logarithmic integrand with the principal branch.
pub fn entropy_e_complex(e: &ComplexSymPolyPoint, cfg: &QuadratureConfig) -> Result<Complex64> {
    let r = complex_reduced(e);
    let e1 = e.coeffs()[0].re;
    integrate_unit(|u| log_form_mapped(&r, e1, u), &breakpoints(&magnitudes(&r)), cfg).map(|est| est.value)
}

/// Analytic continuation of `Q` to a complexified point.
pub fn subentropy_e_complex(e: &ComplexSymPolyPoint, cfg: &QuadratureConfig) -> Result<Complex64> {
    let r = complex_reduced(e);
    integrate_rational(&q_integrand(&r), &magnitudes(&r), cfg).map(|est| est.value)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Builds `int tau^(p d - K) / q^p` after stripping trailing zeros, or the
/// divergence it implies.
fn power_integrand(e: &SymPolyPoint, p: usize, k_sum: usize, sign: f64) -> Result<(Rational<f64>, Vec<f64>)> {
    let d = e.dim();
    let r = reduced(e.coeffs());
    let z = d - r.len();
    let exponent = (p * d) as i64 - k_sum as i64 - (p * z) as i64;
    if exponent < 0 {
        return Err(Error::DivergentIntegral {
            direction: Direction::from_sign(sign),
            detail: format!(
                "integrand behaves like tau^{exponent} at tau = 0 ({z} trailing zero coordinates)"
            ),
        });
    }
    let mut num = vec![0.0; exponent as usize + 1];
    num[0] = 1.0;
    Ok((
        Rational {
            num,
            den: monic(r),
            power: p,
            shifted: false,
        },
        r.to_vec(),
    ))
}

fn divergent_at_origin(what: &str) -> Error {
    Error::DivergentIntegral {
        direction: Direction::PositiveInfinity,
        detail: format!("{what} at e = 0: integrand behaves like 1/tau at tau = 0"),
    }
}

/// Mixed partial derivative of `H` named by `idx`.
pub fn dh(e: &SymPolyPoint, idx: &MultiIndex, cfg: &QuadratureConfig) -> Result<f64> {
    dh_estimate(e, idx, cfg).map(|r| r.value)
}

pub fn dh_estimate(e: &SymPolyPoint, idx: &MultiIndex, cfg: &QuadratureConfig) -> Result<Estimate<f64>> {
    check_index(e, idx)?;
    let m = idx.order();
    if m == 1 && idx.sum() == 1 {
        let r = reduced(e.coeffs());
        if r.is_empty() {
            return Err(divergent_at_origin("dH/de_1"));
        }
        let mut num = vec![1.0 - r[0]];
        num.extend(r[1..].iter().map(|v| -v));
        let f = Rational {
            num,
            den: monic(r),
            power: 1,
            shifted: true,
        };
        let est = integrate_rational(&f, r, cfg)?;
        return Ok(Estimate {
            value: est.value - 1.0,
            ..est
        });
    }
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let pref = sign * factorial(m - 1);
    let (f, r) = power_integrand(e, m, idx.sum(), pref)?;
    let est = integrate_rational(&f, &r, cfg)?;
    Ok(Estimate {
        value: pref * est.value,
        error: pref.abs() * est.error,
        panels: est.panels,
    })
}

/// Mixed partial derivative of `Q` named by `idx`.
pub fn dq(e: &SymPolyPoint, idx: &MultiIndex, cfg: &QuadratureConfig) -> Result<f64> {
    dq_estimate(e, idx, cfg).map(|r| r.value)
}

pub fn dq_estimate(e: &SymPolyPoint, idx: &MultiIndex, cfg: &QuadratureConfig) -> Result<Estimate<f64>> {
    check_index(e, idx)?;
    let m = idx.order();
    if m == 1 && idx.sum() == 1 {
        // tau^(2d-1)/q^2 - 1/(tau+1) over a common denominator
        let r = reduced(e.coeffs());
        if r.is_empty() {
            return Err(divergent_at_origin("dQ/de_1"));
        }
        let q = monic(r);
        let mut q2 = vec![0.0; 2 * q.len() - 1];
        for (i, a) in q.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                q2[i + j] += a * b;
            }
        }
        let mut num = vec![1.0 - q2[1]];
        num.extend(q2[2..].iter().map(|v| -v));
        let f = Rational {
            num,
            den: q,
            power: 2,
            shifted: true,
        };
        return integrate_rational(&f, r, cfg);
    }
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let pref = sign * factorial(m);
    let (f, r) = power_integrand(e, m + 1, idx.sum(), pref)?;
    let est = integrate_rational(&f, &r, cfg)?;
    Ok(Estimate {
        value: pref * est.value,
        error: pref.abs() * est.error,
        panels: est.panels,
    })
}

fn check_index(e: &SymPolyPoint, idx: &MultiIndex) -> Result<()> {
    if let Some(&k) = idx.indices().iter().find(|&&k| k > e.dim()) {
        return Err(Error::domain(format!("index {k} exceeds dimension {}", e.dim())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn pt(v: &[f64]) -> SymPolyPoint {
        SymPolyPoint::new(v.to_vec()).unwrap()
    }
    fn idx(v: &[usize], d: usize) -> MultiIndex {
        MultiIndex::new(v.to_vec(), d).unwrap()
    }
    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn entropy_values() {
        assert!((entropy_e(&pt(&[1.0, 0.25]), &cfg()).unwrap() - LN_2).abs() < 1e-10);
        assert!((entropy_e(&pt(&[1.0, 0.24]), &cfg()).unwrap() - 0.673_011_667_009_256).abs() < 1e-10);
        for d in 1..6 {
            let mut v = vec![0.0; d];
            v[0] = 1.0;
            assert!(entropy_e(&pt(&v), &cfg()).unwrap().abs() < 1e-12);
        }
        let h3 = entropy_e(&pt(&[1.0, 0.2, 0.05]), &cfg()).unwrap();
        assert!((h3 - 0.951_846_362_285_394).abs() < 1e-10);
    }

    #[test]
    fn log_form_values() {
        assert!((entropy_e_log_form(&pt(&[1.0, 0.25]), &cfg()).unwrap() - LN_2).abs() < 1e-10);
        assert!((entropy_e_log_form(&pt(&[1.0, 0.24]), &cfg()).unwrap() - 0.673_011_667_009_256).abs() < 1e-10);
        assert!(entropy_e_log_form(&pt(&[2.0, 1.0]), &cfg()).unwrap().abs() < 1e-10);
        let h3 = entropy_e_log_form(&pt(&[1.0, 0.2, 0.05]), &cfg()).unwrap();
        assert!((h3 - 0.951_846_362_285_394).abs() < 1e-9);
    }

    #[test]
    fn subentropy_values() {
        assert!((subentropy_e(&pt(&[1.0, 0.25]), &cfg()).unwrap() - (LN_2 - 0.5)).abs() < 1e-10);
        assert!((subentropy_e(&pt(&[1.0, 0.24]), &cfg()).unwrap() - 0.186_453_537_279_459).abs() < 1e-10);
        assert!(subentropy_e(&pt(&[1.0, 0.0]), &cfg()).unwrap().abs() < 1e-12);
        assert!((subentropy_e(&pt(&[0.3]), &cfg()).unwrap() + 0.3 * 0.3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn first_and_second_derivatives() {
        let e = pt(&[1.0, 0.25]);
        assert!((dh(&e, &idx(&[2], 2), &cfg()).unwrap() - 2.0).abs() < 1e-10);
        assert!((dh(&e, &idx(&[1], 2), &cfg()).unwrap() - (LN_2 - 2.0)).abs() < 1e-10);
        assert!((dh(&e, &idx(&[1, 1], 2), &cfg()).unwrap() + 2.0 / 3.0).abs() < 1e-10);
        assert!((dq(&e, &idx(&[2], 2), &cfg()).unwrap() - 2.0 / 3.0).abs() < 1e-10);
        assert!((dq(&pt(&[1.0, 0.0]), &idx(&[2], 2), &cfg()).unwrap() - 1.0).abs() < 1e-10);
        let dq1 = dq(&e, &idx(&[1], 2), &cfg()).unwrap();
        assert!((dq1 + 1.140_186_152_773_388).abs() < 1e-9);
    }

    #[test]
    fn point_mass_first_derivative() {
        let v = dh(&pt(&[1.0, 0.0]), &idx(&[1], 2), &cfg()).unwrap();
        assert!((v + 1.0).abs() < 1e-10);
    }

    #[test]
    fn divergence_is_reported_with_sign() {
        let e = pt(&[1.0, 0.0]);
        match dh(&e, &idx(&[2], 2), &cfg()) {
            Err(Error::DivergentIntegral { direction, .. }) => assert_eq!(direction, Direction::PositiveInfinity),
            other => panic!("expected divergence, got {other:?}"),
        }
        match dh(&e, &idx(&[2, 2], 2), &cfg()) {
            Err(Error::DivergentIntegral { direction, .. }) => assert_eq!(direction, Direction::NegativeInfinity),
            other => panic!("expected divergence, got {other:?}"),
        }
        assert!(dq(&e, &idx(&[1, 1], 2), &cfg()).is_ok());
    }

    #[test]
    fn index_validation() {
        assert!(MultiIndex::new(vec![], 2).is_err());
        assert!(MultiIndex::new(vec![3], 2).is_err());
        let i = idx(&[1, 3], 3);
        assert_eq!((i.order(), i.sum()), (2, 4));
        assert!(dh(&pt(&[1.0, 0.2]), &idx(&[3], 3), &cfg()).is_err());
    }

    #[test]
    fn complex_continuation() {
        let c = |re, im| Complex64::new(re, im);
        let real = ComplexSymPolyPoint::new(vec![c(1.0, 0.0), c(0.25, 0.0)]).unwrap();
        let h = entropy_e_complex(&real, &cfg()).unwrap();
        assert!((h.re - LN_2).abs() < 1e-10 && h.im == 0.0);
        let q = subentropy_e_complex(&real, &cfg()).unwrap();
        assert!((q.re - (LN_2 - 0.5)).abs() < 1e-10 && q.im == 0.0);

        for pt in [
            vec![c(1.0, 0.0), c(0.25, 0.5)],
            vec![c(1.0, 0.0), c(0.1, 0.0), c(0.02, 0.3)],
            vec![c(1.0, 0.0), c(0.2, 0.0), c(0.01, 0.1)],
        ] {
            let p = ComplexSymPolyPoint::new(pt).unwrap();
            assert!(entropy_e_complex(&p, &cfg()).unwrap().im > 0.0);
            assert!(subentropy_e_complex(&p, &cfg()).unwrap().im > 0.0);
        }
    }

    #[test]
    fn binomial_tail_matches_closed_form() {
        for &a in &[0.5, 1.0, 2.0, 3.7] {
            for &s in &[0.01, 0.1, 0.2] {
                let direct = ((1.0f64 + s).powf(a) - 1.0 - a * s) / (s * s);
                assert!((binomial_tail(a, s) - direct).abs() < 1e-10 * direct.abs().max(1.0));
            }
        }
    }
}
