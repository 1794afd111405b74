//! Planar representing measures: `ln ||x|| = int ln|(x, xi)| dmu(xi) + C`.
//!
//! With `h(t) = ln ||(cos t, sin t)||` and `ln|cos u| = sum_k kappa_k e^{iku}`,
//! the density coefficients are `W_k = h_k / kappa_k` for even `k`; the
//! measure is returned as grid weights of the band-limited density, in the
//! convention of the `synth2d` body.

use crate::error::{Error, Result};
use crate::numerics::rng::RngStream;
use crate::starbody::{ln_cos_coefficient, measure_csv, StarBody, MAX_GRID};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryOptions {
    /// Largest admissible `|W_k|` beyond the band `N/2 < k < 2N`.
    pub tail_tol: f64,
    /// Largest admissible odd coefficient of `h`.
    pub odd_tol: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions { tail_tol: 1e-6, odd_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentingMeasure2D {
    /// `2 pi j / N`.
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
    pub c: f64,
    pub min_weight: f64,
    /// Largest odd Fourier coefficient of `h`.
    pub odd_max: f64,
    /// Largest implied density coefficient above the band.
    pub tail_max: f64,
}

impl RepresentingMeasure2D {
    pub fn from_weights(weights: Vec<f64>, c: f64) -> Result<Self> {
        let n = weights.len();
        if n < 2 || n % 2 == 1 {
            return Err(Error::arg(format!("measure grid must have even size, got {n}")));
        }
        Ok(RepresentingMeasure2D {
            angles: (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect(),
            min_weight: weights.iter().cloned().fold(f64::INFINITY, f64::min),
            weights,
            c,
            odd_max: 0.0,
            tail_max: 0.0,
        })
    }

    /// `angle,weight` rows and a trailing `# C=` line.
    pub fn to_csv(&self) -> String {
        measure_csv(&self.weights, self.c)
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `int ln|(x, xi)| dmu + C` for the band-limited density, at `x = r (cos t, sin t)`.
    pub fn representation(&self, r: f64, t: f64) -> f64 {
        let n = self.weights.len();
        let mut v = self.mass() * (r.ln() - LN_2) + self.c;
        for k in (2..=n / 2).step_by(2) {
            let mut wk = Complex64::new(0.0, 0.0);
            for (w, s) in self.weights.iter().zip(&self.angles) {
                wk += Complex64::from_polar(*w, -(k as f64) * s);
            }
            let term = ln_cos_coefficient(k as i64) * (wk * Complex64::from_polar(1.0, k as f64 * t)).re;
            v += if k < n / 2 { 2.0 * term } else { term };
        }
        v
    }
}

pub fn recover_measure_2d(body: &StarBody, n: usize) -> Result<RepresentingMeasure2D> {
    recover_measure_2d_with(body, n, &RecoveryOptions::default())
}

/// Deconvolves `h` against `ln|cos|` on a grid of `n` angles.
pub fn recover_measure_2d_with(body: &StarBody, n: usize, opts: &RecoveryOptions) -> Result<RepresentingMeasure2D> {
    if body.dim() != 2 {
        return Err(Error::arg(format!("measure recovery needs a planar body, got dimension {}", body.dim())));
    }
    if n < 8 || n % 2 == 1 {
        return Err(Error::arg(format!("measure grid N must be even and >= 8, got {n}")));
    }
    if n > MAX_GRID {
        return Err(Error::arg(format!(
            "N = {n} exceeds {MAX_GRID}: kernel coefficients 1/k would be resolved below the sampling accuracy; use a smaller N"
        )));
    }
    let m = 4 * n;
    let mut h: Vec<Complex64> = (0..m)
        .map(|j| {
            let (s, c) = (2.0 * PI * j as f64 / m as f64).sin_cos();
            Complex64::new(body.gauge(&[c, s]).ln(), 0.0)
        })
        .collect();
    if h.iter().any(|v| !v.re.is_finite()) {
        return Err(Error::num(format!("gauge of {} is not finite and positive on the circle", body.spec())));
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut h);
    let coef = |k: usize| h[k] / m as f64;
    let odd_max = (1..2 * n).step_by(2).map(|k| coef(k).norm()).fold(0.0, f64::max);
    if odd_max > opts.odd_tol {
        return Err(Error::num(format!(
            "odd Fourier coefficient {odd_max:.3e} of ln||.|| exceeds {:.1e}; the gauge is not even to sampling accuracy",
            opts.odd_tol
        )));
    }
    let tail_max = (n / 2 + 1..2 * n)
        .filter(|k| k % 2 == 0)
        .map(|k| (coef(k) / ln_cos_coefficient(k as i64)).norm())
        .fold(0.0, f64::max);
    if tail_max > opts.tail_tol {
        return Err(Error::num(format!(
            "coefficient tail {tail_max:.3e} above the band exceeds {:.1e}; increase N",
            opts.tail_tol
        )));
    }
    let c = coef(0).re + LN_2;
    let half = n / 2;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    spectrum[0] = Complex64::new(1.0, 0.0);
    for k in (2..half).step_by(2) {
        let wk = coef(k) / ln_cos_coefficient(k as i64);
        spectrum[k] = wk;
        spectrum[n - k] = wk.conj();
    }
    if half % 2 == 0 {
        spectrum[half] = Complex64::new(2.0 * coef(half).re / ln_cos_coefficient(half as i64), 0.0);
    }
    planner.plan_fft_inverse(n).process(&mut spectrum);
    let weights: Vec<f64> = spectrum.iter().map(|v| v.re / n as f64).collect();
    let mut out = RepresentingMeasure2D::from_weights(weights, c)?;
    out.odd_max = odd_max;
    out.tail_max = tail_max;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepresentationCheck {
    pub max_residual: f64,
    pub samples: usize,
    /// Samples moved by 1e-9 rad off a direction orthogonal to an atom.
    pub flagged: usize,
}

/// Max of `|ln ||x||_K - int ln|(x, xi)| dmu - C|` over `samples` points with
/// log-uniform radii in `[1e-3, 1e3]`.
pub fn verify_representation(
    body: &StarBody,
    measure: &RepresentingMeasure2D,
    samples: usize,
    seed: u64,
) -> Result<RepresentationCheck> {
    if body.dim() != 2 {
        return Err(Error::arg("representation check needs a planar body"));
    }
    if samples == 0 {
        return Err(Error::arg("need at least one sample"));
    }
    let n = measure.weights.len();
    let spacing = 2.0 * PI / n as f64;
    let mut rng = RngStream::new(seed, 0);
    let mut max_residual: f64 = 0.0;
    let mut flagged = 0;
    for _ in 0..samples {
        let mut t = rng.uniform_in(0.0, 2.0 * PI);
        let r = rng.uniform_in(-3.0, 3.0) * std::f64::consts::LN_10;
        let r = r.exp();
        let u = (t - 0.5 * PI).rem_euclid(spacing);
        if u.min(spacing - u) < 1e-12 {
            t += 1e-9;
            flagged += 1;
        }
        let lhs = body.minkowski(&[r * t.cos(), r * t.sin()])?.ln();
        max_residual = max_residual.max((lhs - measure.representation(r, t)).abs());
    }
    Ok(RepresentationCheck { max_residual, samples, flagged })
}
