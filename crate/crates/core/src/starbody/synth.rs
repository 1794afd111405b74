//! Planar bodies with a prescribed representing measure.
//!
//! The measure has grid weights `w_j` at the angles `s_j = 2 pi j / N`,
//! read as the band-limited density whose Fourier coefficients are the
//! discrete transform `W_k = sum_j w_j e^{-i k s_j}` for `|k| <= N/2` (the
//! Nyquist pair sharing `W_{N/2}` equally). With
//! `ln|cos u| = sum_k kappa_k e^{iku}` the gauge is
//!
//! `ln ||x|| = ln |x|_2 + C + sum_k kappa_k W_k e^{ikt}`, `x = |x|_2 (cos t, sin t)`,
//!
//! which is exactly `int ln|(x, xi)| dmu(xi) + C` for that density. Only even
//! `k` contribute, so the measure is identified up to its antipodal
//! symmetrization.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};
use std::path::{Path, PathBuf};

/// Largest grid size accepted for synthetic bodies and measure recovery.
pub const MAX_GRID: usize = 1 << 20;

/// Fourier coefficient `kappa_k` of `ln|cos u|`: `-ln 2` at 0, zero for odd
/// `k`, `(-1)^(m+1) / (2m)` at `k = +-2m`.
pub fn ln_cos_coefficient(k: i64) -> f64 {
    let k = k.unsigned_abs();
    if k == 0 {
        -LN_2
    } else if k % 2 == 1 {
        0.0
    } else {
        let m = k / 2;
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        sign / k as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic2d {
    weights: Vec<f64>,
    c: f64,
    /// `kappa_k W_k` for even `k` in `2..=N/2`, Nyquist already halved
    /// into the single real term.
    coeffs: Vec<(usize, Complex64)>,
    source: Option<PathBuf>,
}

impl Synthetic2d {
    /// Body from grid weights (total mass 1, non-negative) and constant `C`.
    pub fn new(weights: Vec<f64>, c: f64) -> Result<Self> {
        let n = weights.len();
        if n < 4 || n % 2 == 1 || n > MAX_GRID {
            return Err(Error::arg(format!(
                "synthetic measure needs an even grid size in [4, {MAX_GRID}], got {n}"
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::arg("synthetic measure weights must be finite and non-negative"));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!("synthetic measure must have total mass 1, got {mass}")));
        }
        if !c.is_finite() {
            return Err(Error::arg("constant C must be finite"));
        }
        let half = n / 2;
        let mut coeffs = Vec::new();
        for k in (2..=half).step_by(2) {
            let wk = dft(&weights, k);
            let mut term = wk * ln_cos_coefficient(k as i64);
            // +-k together contribute 2 Re(.); the Nyquist pair shares one W
            if k < half {
                term *= 2.0;
            }
            coeffs.push((k, term));
        }
        Ok(Synthetic2d { weights, c, coeffs, source: None })
    }

    pub fn with_source(mut self, path: impl Into<PathBuf>) -> Self {
        self.source = Some(path.into());
        self
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    /// `ln ||(cos t, sin t)||`.
    pub fn log_gauge_angle(&self, t: f64) -> f64 {
        let mut h = self.c - LN_2;
        for &(k, a) in &self.coeffs {
            let (s, c) = (k as f64 * t).sin_cos();
            h += a.re * c - a.im * s;
        }
        h
    }

    pub fn gauge(&self, x: f64, y: f64) -> f64 {
        // fold onto the upper half plane so that evenness holds bit for bit
        let (x, y) = if y < 0.0 || (y == 0.0 && x < 0.0) { (-x, -y) } else { (x, y) };
        let r = x.hypot(y);
        if r == 0.0 {
            return 0.0;
        }
        r * self.log_gauge_angle(y.atan2(x)).exp()
    }

    /// Reads `angle,weight` rows and a `C=<float>` line (optionally behind `#`).
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::arg(format!("cannot read synth2d file {}: {e}", path.display())))?;
        let (angles, weights, c) = parse_measure_csv(&text)?;
        let n = angles.len();
        for (j, a) in angles.iter().enumerate() {
            let want = 2.0 * PI * j as f64 / n as f64;
            if (a - want).abs() > 1e-9 {
                return Err(Error::arg(format!(
                    "synth2d angles must form the uniform grid 2 pi j / N; row {j} has {a}, expected {want}"
                )));
            }
        }
        Ok(Synthetic2d::new(weights, c)?.with_source(path))
    }
}

/// `sum_j w_j e^{-i k s_j}` on the uniform grid.
pub(crate) fn dft(w: &[f64], k: usize) -> Complex64 {
    let n = w.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, wj) in w.iter().enumerate() {
        let phase = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
        acc += Complex64::from_polar(*wj, phase);
    }
    acc
}

/// Parses the `angle,weight` + `C=` text format.
pub fn parse_measure_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mut angles = Vec::new();
    let mut weights = Vec::new();
    let mut c = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let stripped = line.trim_start_matches('#').trim();
        if let Some(v) = stripped.strip_prefix("C=") {
            c = Some(v.trim().parse::<f64>().map_err(|_| {
                Error::arg(format!("line {}: bad constant '{v}'", lineno + 1))
            })?);
            continue;
        }
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("angle,weight") {
            continue;
        }
        let mut cols = line.split(',');
        let (a, w) = match (cols.next(), cols.next(), cols.next()) {
            (Some(a), Some(w), None) => (a.trim(), w.trim()),
            _ => return Err(Error::arg(format!("line {}: expected 'angle,weight'", lineno + 1))),
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::arg(format!("line {}: bad number '{s}'", lineno + 1)))
        };
        angles.push(parse(a)?);
        weights.push(parse(w)?);
    }
    let c = c.ok_or_else(|| Error::arg("measure file lacks a 'C=<float>' line"))?;
    Ok((angles, weights, c))
}

/// Writes the measure in the format read by [`Synthetic2d::from_csv`].
pub fn measure_csv(weights: &[f64], c: f64) -> String {
    let n = weights.len();
    let mut out = String::from("angle,weight\n");
    for (j, w) in weights.iter().enumerate() {
        out.push_str(&format!("{:?},{:?}\n", 2.0 * PI * j as f64 / n as f64, w));
    }
    out.push_str(&format!("# C={c:?}\n"));
    out
}
