//! Seeded random inputs for the verification suites.
//!
//! Every sample draws from its own ChaCha stream, selected by the sample
//! index, so results do not depend on how samples are spread over threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

/// 64-bit FNV-1a.
pub fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Generator for sample `index` of the suite `label` at dimension `d`.
pub fn stream(seed: u64, label: &str, d: usize, index: u64) -> ChaCha8Rng {
    let key = seed ^ fnv1a(label) ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Uniform point on the probability simplex.
pub fn dirichlet<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    let g: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|v| v / s).collect()
}

/// Simplex point mixed with the uniform vector, so every entry is at least
/// `floor / d`. Entries are distinct with probability one.
pub fn interior<R: Rng>(rng: &mut R, d: usize, floor: f64) -> Vec<f64> {
    dirichlet(rng, d)
        .into_iter()
        .map(|v| (1.0 - floor) * v + floor / d as f64)
        .collect()
}

/// A point of the positive cone with `e_1 = 1` and `e_k` up to twice its
/// value at the uniform vector. Such points need not come from any x.
pub fn cone_point<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    let mut e = vec![1.0; d];
    let mut binom = 1.0;
    for k in 1..=d {
        binom = binom * (d + 1 - k) as f64 / k as f64;
        if k >= 2 {
            let uniform = binom / (d as f64).powi(k as i32);
            e[k - 1] = rng.gen_range(0.05..2.0) * uniform;
        }
    }
    e
}

/// A pair `(x, y)` with `x` majorizing `y`, produced by Robin Hood
/// transfers (richer to poorer, by less than half the gap) starting from `x`.
pub fn robin_hood_pair<R: Rng>(rng: &mut R, d: usize) -> (Vec<f64>, Vec<f64>) {
    let x = dirichlet(rng, d);
    let mut y = x.clone();
    let steps = rng.gen_range(1..=2 * d);
    for _ in 0..steps {
        let i = rng.gen_range(0..d);
        let j = rng.gen_range(0..d);
        let (rich, poor) = if y[i] >= y[j] { (i, j) } else { (j, i) };
        let gap = y[rich] - y[poor];
        if gap <= 0.0 {
            continue;
        }
        let t = rng.gen_range(0.0..0.5) * gap;
        y[rich] -= t;
        y[poor] += t;
    }
    (x, y)
}

/// A random joint distribution with `rows x cols` entries.
pub fn joint<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let flat = dirichlet(rng, rows * cols);
    flat.chunks(cols).map(<[f64]>::to_vec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream(42, "x", 3, 0).gen();
        let b: f64 = stream(42, "x", 3, 0).gen();
        let c: f64 = stream(42, "x", 3, 1).gen();
        let e: f64 = stream(43, "x", 3, 0).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, e);
    }

    #[test]
    fn simplex_points() {
        let mut rng = stream(1, "t", 5, 0);
        for _ in 0..50 {
            let x = interior(&mut rng, 5, 0.1);
            assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(x.iter().all(|&v| v >= 0.02 - 1e-15));
        }
    }

    #[test]
    fn robin_hood_preserves_mass() {
        let mut rng = stream(2, "t", 4, 0);
        for _ in 0..50 {
            let (x, y) = robin_hood_pair(&mut rng, 4);
            let sx: f64 = x.iter().sum();
            let sy: f64 = y.iter().sum();
            assert!((sx - sy).abs() < 1e-12);
        }
    }
}
