//! Finite-difference helpers used to cross-check analytic derivatives.

use crate::error::Result;

/// Central-difference derivative with Ridders' polynomial extrapolation.
/// Returns `(derivative, error estimate)`. The caller keeps `x - h` inside
/// the domain of `f`.
pub fn ridders(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<(f64, f64)> {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 10;
    const SAFE: f64 = 2.0;

    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut hh = h;
    a[0][0] = (f(x + hh)? - f(x - hh)?) / (2.0 * hh);
    let mut err = f64::INFINITY;
    let mut ans = a[0][0];
    for i in 1..NTAB {
        hh /= CON;
        a[0][i] = (f(x + hh)? - f(x - hh)?) / (2.0 * hh);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let errt = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if errt <= err {
                err = errt;
                ans = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    Ok((ans, err))
}

/// Forward differences `Delta^j f(x0)` for `j = 0..values.len()`, where
/// `values[i] = f(x0 + i h)`.
pub fn forward_differences(values: &[f64]) -> Vec<f64> {
    let mut row = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    while !row.is_empty() {
        out.push(row[0]);
        row = row.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ridders_on_smooth_function() {
        let (d, err) = ridders(|x| Ok(x.exp()), 1.0, 0.1).unwrap();
        assert!((d - 1f64.exp()).abs() < 1e-12);
        assert!(err < 1e-10);
    }

    #[test]
    fn forward_differences_of_cubic() {
        let v: Vec<f64> = (0..5).map(|i| (i as f64).powi(3)).collect();
        let d = forward_differences(&v);
        assert_eq!(d, vec![0.0, 1.0, 6.0, 6.0, 0.0]);
    }
}
