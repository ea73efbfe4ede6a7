//! Entropy and subentropy straight from x-coordinates.
//!
//! Subentropy is the divided difference of `g(t) = -t^d ln t` over the
//! points `x_1..x_d`. Nearly coincident points are grouped and their divided
//! differences come from a Taylor expansion of `g`, which is exact in the
//! confluent limit; distinct groups are combined with the usual recursion.

use serde::Serialize;

use crate::sympoly::ProbVector;

/// `H` and `Q` in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyPair {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

/// `-sum x ln x` with `0 ln 0 = 0`.
pub fn entropy_direct(x: &ProbVector) -> f64 {
    entropy_slice(x.values())
}

pub(crate) fn entropy_slice(x: &[f64]) -> f64 {
    x.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum()
}

/// `-sum_i x_i^d ln x_i / prod_{j != i} (x_i - x_j)`, continuously extended to
/// coincident and zero entries.
pub fn subentropy_direct(x: &ProbVector) -> f64 {
    subentropy_slice(x.values())
}

pub(crate) fn subentropy_slice(x: &[f64]) -> f64 {
    let d = x.len();
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    divided_difference(&v, d)
}

pub fn entropy_pair(x: &ProbVector) -> EntropyPair {
    EntropyPair {
        h: entropy_direct(x),
        q: subentropy_direct(x),
    }
}

/// Half-width to center ratio below which a run of points is expanded
/// about its midpoint.
const GROUP_RATIO: f64 = 0.25;
const TAYLOR_TERMS: usize = 80;

/// Divided difference of `-t^n ln t` over sorted non-negative `v`.
pub(crate) fn divided_difference(v: &[f64], n: usize) -> f64 {
    let len = v.len();
    let mut group = vec![0usize; len];
    let mut next = 0;
    partition(v, 0, len, &mut group, &mut next);

    let binom = binomials(n);
    // after pass i, table[j] holds f[v_i..v_j]
    let mut table = vec![0.0; len];
    for i in (0..len).rev() {
        for j in i..len {
            table[j] = if group[i] == group[j] {
                taylor_group(&v[i..=j], n, &binom)
            } else {
                (table[j] - table[j - 1]) / (v[j] - v[i])
            };
        }
    }
    table[len - 1]
}

/// Splits `v[lo..hi]` at its widest gap until each run is narrow enough
/// for a Taylor expansion.
fn partition(v: &[f64], lo: usize, hi: usize, group: &mut [usize], next: &mut usize) {
    let a = v[lo];
    let b = v[hi - 1];
    let narrow = if b == 0.0 {
        true
    } else {
        a > 0.0 && (b - a) <= GROUP_RATIO * (a + b)
    };
    if narrow || hi - lo == 1 {
        for g in &mut group[lo..hi] {
            *g = *next;
        }
        *next += 1;
        return;
    }
    let mut cut = lo + 1;
    let mut widest = -1.0;
    for k in lo + 1..hi {
        let gap = v[k] - v[k - 1];
        if gap > widest {
            widest = gap;
            cut = k;
        }
    }
    partition(v, lo, cut, group, next);
    partition(v, cut, hi, group, next);
}

fn binomials(n: usize) -> Vec<f64> {
    let mut c = vec![1.0; n + 1];
    for k in 1..=n {
        c[k] = c[k - 1] * (n + 1 - k) as f64 / k as f64;
    }
    c
}

/// Divided difference of `-t^n ln t` over points that are all zero or all
/// within a narrow band around their midpoint.
fn taylor_group(pts: &[f64], n: usize, binom: &[f64]) -> f64 {
    let s = pts.len();
    let hi = pts[s - 1];
    if hi == 0.0 {
        // derivatives of order < n vanish at 0
        return 0.0;
    }
    if s == 1 {
        return -hi.powi(n as i32) * hi.ln();
    }
    let c = 0.5 * (pts[0] + hi);
    let u: Vec<f64> = pts.iter().map(|&p| (p - c) / c).collect();
    let ln_c = c.ln();

    // t^n ln t = c^n sum_k b_k u^k
    let b = |k: usize| -> f64 {
        let mut acc = if k <= n { binom[k] * ln_c } else { 0.0 };
        let m_lo = if k > n { k - n } else { 1 };
        for m in m_lo..=k {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            acc += binom[k - m] * sign / m as f64;
        }
        acc
    };

    // complete homogeneous polynomials h_0..h_N of u
    let terms = TAYLOR_TERMS;
    let mut h = vec![0.0; terms + 1];
    h[0] = 1.0;
    for &uj in &u {
        for k in 1..=terms {
            h[k] += uj * h[k - 1];
        }
    }

    // |u| <= GROUP_RATIO, so the tail beyond TAYLOR_TERMS is negligible
    let sum: f64 = (0..=terms).map(|j| b(j + s - 1) * h[j]).sum();
    -c.powi(n as i32 + 1 - s as i32) * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ProbVector {
        ProbVector::new(v.to_vec()).unwrap()
    }

    fn lagrange(x: &[f64]) -> f64 {
        let d = x.len() as i32;
        let mut s = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let mut den = 1.0;
            for (j, &xj) in x.iter().enumerate() {
                if i != j {
                    den *= xi - xj;
                }
            }
            s += -xi.powi(d) * xi.ln() / den;
        }
        s
    }

    #[test]
    fn entropy_values() {
        assert!((entropy_direct(&pv(&[0.5, 0.5])) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(entropy_direct(&pv(&[1.0, 0.0])), 0.0);
        assert!((entropy_direct(&pv(&[0.6, 0.4])) - 0.673_011_667_009_256).abs() < 1e-14);
    }

    #[test]
    fn subentropy_values() {
        assert!((subentropy_direct(&pv(&[0.6, 0.4])) - 0.186_453_537_279_459).abs() < 1e-14);
        assert_eq!(subentropy_direct(&pv(&[1.0, 0.0])), 0.0);
        let ln2 = std::f64::consts::LN_2;
        assert!((subentropy_direct(&pv(&[0.5, 0.5])) - (ln2 - 0.5)).abs() < 1e-15);
        let third = 1.0 / 3.0;
        let q = subentropy_direct(&pv(&[third, third, third]));
        assert!((q - (3f64.ln() - 5.0 / 6.0)).abs() < 1e-14);
        let p = entropy_pair(&pv(&[1.0, 0.0, 0.0]));
        assert_eq!((p.h, p.q), (0.0, 0.0));
    }

    #[test]
    fn matches_lagrange_for_separated_points() {
        for x in [
            vec![0.6, 0.3, 0.1],
            vec![0.05, 0.15, 0.3, 0.5],
            vec![0.7, 0.2, 0.1, 0.0],
            vec![0.01, 0.02, 0.04, 0.08, 0.85],
        ] {
            let a = subentropy_direct(&pv(&x));
            let b = lagrange(&x);
            assert!((a - b).abs() < 1e-12, "{x:?}: {a} vs {b}");
        }
    }

    #[test]
    fn coincidence_limit_is_continuous() {
        let base = subentropy_direct(&pv(&[0.5, 0.5]));
        let mut last = f64::INFINITY;
        for eps in [1e-3, 1e-5, 1e-7] {
            let dev = (subentropy_direct(&pv(&[0.5 + eps, 0.5 - eps])) - base).abs();
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-13);
    }

    #[test]
    fn richardson_limit_for_double_point() {
        let f = |eps: f64| subentropy_direct(&pv(&[0.5 + eps, 0.5 - eps]));
        // even in eps, so one Richardson step removes the eps^2 term
        let r = |eps: f64| (4.0 * f(eps / 2.0) - f(eps)) / 3.0;
        let target = std::f64::consts::LN_2 - 0.5;
        assert!((r(1e-3) - target).abs() < 1e-12);
    }

    #[test]
    fn zeros_and_mixed_clusters() {
        let x = [0.0, 0.0, 0.5, 0.5];
        let q = subentropy_direct(&pv(&x));
        let near = subentropy_direct(&pv(&[0.0, 1e-9, 0.5 + 1e-6, 0.5 - 1e-6]));
        assert!((q - near).abs() < 1e-8);
        assert_eq!(subentropy_direct(&pv(&[0.0, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn permutation_invariance() {
        let a = subentropy_direct(&pv(&[0.1, 0.6, 0.3]));
        let b = subentropy_direct(&pv(&[0.3, 0.1, 0.6]));
        assert_eq!(a, b);
    }
}
