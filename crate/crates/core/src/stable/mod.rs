//! Symmetric p-stable vectors and the version property
//! `sum a_i X_i ~ ||a||_p Y`.

use crate::error::{Error, Result};
use crate::numerics::ks::ks_two_sample;
use crate::numerics::rng::{derive_seed, RngStream};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

const VECTOR_TAG: u64 = 0x5354_4142_4c45_56;
const REFERENCE_TAG: u64 = 0x5354_4142_4c45_52;
/// Rows per RNG substream.
const CHUNK_ROWS: usize = 4096;

/// I.i.d. standard symmetric p-stable components, `E exp(itX) = exp(-|t|^p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableSpec {
    pub p: f64,
    pub n: usize,
}

impl StableSpec {
    pub fn new(p: f64, n: usize) -> Result<Self> {
        check_p(p)?;
        if n == 0 {
            return Err(Error::arg("stable vector dimension must be >= 1"));
        }
        Ok(StableSpec { p, n })
    }

    /// Standard of `sum a_i X_i`, i.e. `||a||_p`.
    pub fn gamma(&self, a: &[f64]) -> f64 {
        a.iter().map(|v| v.abs().powf(self.p)).sum::<f64>().powf(1.0 / self.p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::arg(format!("stability index must lie in (0, 2], got {p}")));
    }
    Ok(())
}

/// One standard symmetric p-stable variate.
pub fn stable_variate(p: f64, rng: &mut RngStream) -> f64 {
    if p == 2.0 {
        return std::f64::consts::SQRT_2 * rng.normal();
    }
    if p == 1.0 {
        return (PI * (rng.uniform() - 0.5)).tan();
    }
    let v = PI * (rng.uniform() - 0.5);
    let w = rng.exponential();
    let c = v.cos();
    (p * v).sin() / c.powf(1.0 / p) * (((1.0 - p) * v).cos() / w).powf((1.0 - p) / p)
}

fn sample_rows(p: f64, n: usize, count: usize, seed: u64, tag: u64) -> Vec<Vec<f64>> {
    let key = derive_seed(seed, tag);
    let chunks = count.div_ceil(CHUNK_ROWS);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = RngStream::new(key, c as u64);
            let rows = CHUNK_ROWS.min(count - c * CHUNK_ROWS);
            (0..rows)
                .map(|_| (0..n).map(|_| stable_variate(p, &mut rng)).collect::<Vec<f64>>())
                .collect::<Vec<_>>()
        })
        .collect()
}

/// `count` i.i.d. rows of n standard symmetric p-stable components;
/// identical for a given seed regardless of thread count.
pub fn sample_stable_vector(p: f64, n: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    StableSpec::new(p, n)?;
    if count == 0 {
        return Err(Error::arg("sample count must be >= 1"));
    }
    Ok(sample_rows(p, n, count, seed, VECTOR_TAG))
}

#[derive(Debug, Clone, Serialize)]
pub struct VersionTestReport {
    pub p: f64,
    pub a: Vec<f64>,
    pub gamma: f64,
    pub m: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
    pub seed: u64,
}

/// Two-sample KS test of `sum a_i X_i` against `||a||_p Y` on independent draws.
pub fn version_ks_test(p: f64, a: &[f64], m: usize, seed: u64) -> Result<VersionTestReport> {
    let spec = StableSpec::new(p, a.len())?;
    if a.iter().all(|v| *v == 0.0) || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("coefficient vector must be finite and non-zero"));
    }
    if m < 1000 {
        return Err(Error::arg(format!("version test needs m >= 1000, got {m}")));
    }
    let gamma = spec.gamma(a);
    let lhs: Vec<f64> = sample_rows(p, a.len(), m, seed, VECTOR_TAG)
        .iter()
        .map(|x| x.iter().zip(a).map(|(xi, ai)| xi * ai).sum())
        .collect();
    let rhs: Vec<f64> = sample_rows(p, 1, m, seed, REFERENCE_TAG).iter().map(|y| gamma * y[0]).collect();
    let (ks_statistic, p_value) = ks_two_sample(&lhs, &rhs);
    Ok(VersionTestReport { p, a: a.to_vec(), gamma, m, ks_statistic, p_value, seed })
}

/// Sample means of `exp(i <x, X_k>)`; each part has standard error at most `1/sqrt(m)`.
pub fn empirical_char_functional(samples: &[Vec<f64>], xs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    if samples.is_empty() {
        return Err(Error::arg("need at least one sample"));
    }
    let n = samples[0].len();
    if samples.iter().any(|s| s.len() != n) || xs.iter().any(|x| x.len() != n) {
        return Err(Error::arg("samples and evaluation points must share one dimension"));
    }
    let m = samples.len() as f64;
    Ok(xs
        .par_iter()
        .map(|x| {
            let (mut re, mut im) = (0.0, 0.0);
            for s in samples {
                let t: f64 = s.iter().zip(x).map(|(a, b)| a * b).sum();
                let (sin, cos) = t.sin_cos();
                re += cos;
                im += sin;
            }
            Complex64::new(re / m, im / m)
        })
        .collect())
}

/// One row per draw.
pub fn samples_csv(samples: &[Vec<f64>]) -> String {
    let mut out = String::new();
    if let Some(first) = samples.first() {
        let header: Vec<String> = (0..first.len()).map(|i| format!("x{i}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
    }
    for s in samples {
        let row: Vec<String> = s.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
