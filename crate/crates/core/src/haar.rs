//! Subentropy as the Haar-averaged measurement entropy minus the harmonic
//! tail `1/2 + ... + 1/d`, estimated by Monte Carlo over random bases.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::direct::{entropy_slice, subentropy_slice};
use crate::error::{Error, Result};
use crate::sympoly::ProbVector;

/// Monte Carlo settings for a diagonal state with the given eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaarConfig {
    pub dim: usize,
    pub eigenvalues: ProbVector,
    pub samples: usize,
    pub seed: u64,
}

impl HaarConfig {
    pub fn new(eigenvalues: ProbVector, samples: usize, seed: u64) -> Result<Self> {
        let dim = eigenvalues.dim();
        if dim < 2 {
            return Err(Error::domain("the Haar estimate needs dimension >= 2"));
        }
        if (eigenvalues.sum() - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("eigenvalues sum to {}, not 1", eigenvalues.sum())));
        }
        if samples < 1 {
            return Err(Error::domain("at least one sample is required"));
        }
        Ok(Self {
            dim,
            eigenvalues,
            samples,
            seed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HaarEstimate {
    #[serde(rename = "mean_HM")]
    pub mean_hm: f64,
    pub std_error: f64,
    #[serde(rename = "implied_Q")]
    pub implied_q: f64,
    #[serde(rename = "reference_Q")]
    pub reference_q: f64,
    pub z_score: f64,
}

/// A `d x d` unitary stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl Unitary {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    /// Wraps column-major entries without checking unitarity.
    pub fn from_columns(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::domain("matrix data has the wrong length"));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry in row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.dim + i]
    }

    fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let dot: Complex64 = self.column(a).iter().zip(self.column(b)).map(|(x, y)| x.conj() * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

/// Haar-distributed unitary: a complex Gaussian matrix orthonormalised by
/// Gram-Schmidt, which leaves the triangular factor with a positive real
/// diagonal.
pub fn sample_haar_basis<R: Rng>(d: usize, rng: &mut R) -> Unitary {
    'draw: loop {
        let mut data: Vec<Complex64> = (0..d * d)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect();
        for j in 0..d {
            // two passes keep the columns orthogonal to working precision
            for _ in 0..2 {
                for i in 0..j {
                    let (done, rest) = data.split_at_mut(j * d);
                    let qi = &done[i * d..(i + 1) * d];
                    let v = &mut rest[..d];
                    let proj: Complex64 = qi.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                    for (x, a) in v.iter_mut().zip(qi) {
                        *x -= proj * a;
                    }
                }
            }
            let v = &mut data[j * d..(j + 1) * d];
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-10 {
                continue 'draw;
            }
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
        return Unitary { dim: d, data };
    }
}

/// Entropy of the outcome distribution `p_i = sum_j |U_ji|^2 lambda_j` of
/// measuring in the columns of `u`.
pub fn measurement_entropy(eigs: &ProbVector, u: &Unitary) -> f64 {
    entropy_slice(&measurement_probabilities(eigs, u))
}

fn measurement_probabilities(eigs: &ProbVector, u: &Unitary) -> Vec<f64> {
    let lam = eigs.values();
    let base = lam[0];
    (0..u.dim())
        .map(|i| {
            // written relative to lambda_0 so a flat spectrum gives exactly lambda_0
            base + (0..u.dim())
                .map(|j| u.get(j, i).norm_sqr() * (lam[j] - base))
                .sum::<f64>()
        })
        .collect()
}

/// `1/2 + ... + 1/d`.
pub fn harmonic_tail(d: usize) -> f64 {
    (2..=d).map(|k| 1.0 / k as f64).sum()
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Entropy of one Haar-random measurement; sample `index` always draws
/// from its own stream.
pub fn sample_entropy(cfg: &HaarConfig, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let u = sample_haar_basis(cfg.dim, &mut rng);
    measurement_entropy(&cfg.eigenvalues, &u)
}

/// Mean measurement entropy, its standard error, and the subentropy it
/// implies, compared with the direct value. Bit-identical for any thread
/// count.
pub fn estimate_q(cfg: &HaarConfig) -> HaarEstimate {
    let values: Vec<f64> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| sample_entropy(cfg, i))
        .collect();
    let n = values.len() as f64;
    let h0 = values[0];
    let shifted: Vec<f64> = values.iter().map(|v| v - h0).collect();
    let mean_shift = pairwise_sum(&shifted) / n;
    let mean = h0 + mean_shift;
    let std_error = if values.len() > 1 {
        let sq: Vec<f64> = shifted.iter().map(|v| (v - mean_shift) * (v - mean_shift)).collect();
        (pairwise_sum(&sq) / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let implied = mean - harmonic_tail(cfg.dim);
    let reference = subentropy_slice(cfg.eigenvalues.values());
    let diff = implied - reference;
    let z_score = if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-12 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    HaarEstimate {
        mean_hm: mean,
        std_error,
        implied_q: implied,
        reference_q: reference,
        z_score,
    }
}
