//! Quadrature for the normalized surface measure on S^{n-1}, n in {2, 3, 4}.
//!
//! The circle uses the trapezoid rule. For n = 3, 4 the rule is a product of
//! Gauss-Legendre panels in spherical coordinates with the polar angle first:
//! `theta_1 = cos(alpha)`. Panel breaks sit on the coordinate hyperplanes and,
//! in the azimuth, on the diagonals, so gauges with kinks there (l1, l_inf)
//! are integrated piecewise smoothly.
//!
//! The cubed-sphere rule projects the faces of `[-1, 1]^n` radially, one face
//! per signed coordinate maximum, each face split at the coordinate
//! hyperplanes. Gauges with kinks on `|x_i| = |x_j|` or `x_i = 0` are smooth
//! on every panel.

use super::gauss::gauss_legendre;
use super::quad::QuadratureResult;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Points on S^{n-1} (flattened, `n` coordinates each) with weights summing to 1.
#[derive(Debug, Clone)]
pub struct SphereRule {
    n: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

const AZIMUTH_PANELS: usize = 8;

/// Gauss-Legendre nodes of `p` points on each of the consecutive panels
/// delimited by `breaks`, with the rule weights.
fn paneled(breaks: &[f64], p: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(p);
    let mut xs = Vec::with_capacity(p * (breaks.len() - 1));
    let mut ws = Vec::with_capacity(xs.capacity());
    for pair in breaks.windows(2) {
        let c = 0.5 * (pair[0] + pair[1]);
        let h = 0.5 * (pair[1] - pair[0]);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(c + h * x);
            ws.push(h * w);
        }
    }
    (xs, ws)
}

fn azimuths(p: usize) -> (Vec<f64>, Vec<f64>) {
    let breaks: Vec<f64> = (0..=AZIMUTH_PANELS)
        .map(|k| 2.0 * PI * k as f64 / AZIMUTH_PANELS as f64)
        .collect();
    paneled(&breaks, p)
}

impl SphereRule {
    /// Rule with resolution parameter `p`: `8p` trapezoid points on the circle,
    /// `p` Gauss points per panel otherwise.
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::arg("sphere rule resolution must be positive"));
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        match n {
            2 => {
                let m = AZIMUTH_PANELS * p;
                for k in 0..m {
                    let (s, c) = (2.0 * PI * k as f64 / m as f64).sin_cos();
                    points.extend_from_slice(&[c, s]);
                    weights.push(1.0);
                }
            }
            3 => {
                let (zs, wz) = paneled(&[-1.0, 0.0, 1.0], p);
                let (phis, wp) = azimuths(p);
                for (z, a) in zs.iter().zip(&wz) {
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    for (phi, b) in phis.iter().zip(&wp) {
                        let (s, c) = phi.sin_cos();
                        points.extend_from_slice(&[*z, r * c, r * s]);
                        weights.push(a * b);
                    }
                }
            }
            4 => {
                let (alphas, wa) = paneled(&[0.0, 0.5 * PI, PI], p);
                let (ys, wy) = paneled(&[-1.0, 0.0, 1.0], p);
                let (phis, wp) = azimuths(p);
                for (alpha, a) in alphas.iter().zip(&wa) {
                    let (sa, ca) = alpha.sin_cos();
                    for (y, b) in ys.iter().zip(&wy) {
                        let ry = (1.0 - y * y).max(0.0).sqrt();
                        for (phi, c) in phis.iter().zip(&wp) {
                            let (sp, cp) = phi.sin_cos();
                            points.extend_from_slice(&[ca, sa * y, sa * ry * cp, sa * ry * sp]);
                            weights.push(a * sa * sa * b * c);
                        }
                    }
                }
            }
            _ => return Err(Error::arg(format!("sphere rules exist for n in {{2,3,4}}, got {n}"))),
        }
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(SphereRule { n, points, weights })
    }

    /// Cubed-sphere rule with `p` Gauss points per half edge: `2n (2p)^{n-1}` points.
    pub fn cubed(n: usize, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::arg("sphere rule resolution must be positive"));
        }
        if n < 2 {
            return Err(Error::arg(format!("sphere rules need n >= 2, got {n}")));
        }
        let (us, wu) = paneled(&[-1.0, 0.0, 1.0], p);
        let m = us.len();
        let face = m.pow(n as u32 - 1);
        let mut points = Vec::with_capacity(2 * n * face * n);
        let mut weights = Vec::with_capacity(2 * n * face);
        let mut u = vec![0.0; n];
        for axis in 0..n {
            for sign in [1.0, -1.0] {
                for code in 0..face {
                    let mut c = code;
                    let mut w = 1.0;
                    for (j, uj) in u.iter_mut().enumerate() {
                        if j == axis {
                            *uj = sign;
                        } else {
                            *uj = us[c % m];
                            w *= wu[c % m];
                            c /= m;
                        }
                    }
                    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                    points.extend(u.iter().map(|v| v / norm));
                    weights.push(w / norm.powi(n as i32));
                }
            }
        }
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(SphereRule { n, points, weights })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.n)
    }

    /// Mean of `g` over the sphere.
    pub fn mean(&self, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        let mut s = 0.0;
        let mut wsum = 0.0;
        for (p, w) in self.points().zip(&self.weights) {
            s += w * g(p);
            wsum += w;
        }
        s / wsum
    }
}

/// Mean of `g` over S^{n-1}; the error estimate compares resolutions
/// `8 level` and `16 level`.
pub fn integrate_sphere(
    n: usize,
    mut g: impl FnMut(&[f64]) -> f64,
    level: usize,
) -> Result<QuadratureResult> {
    if level == 0 {
        return Err(Error::arg("sphere quadrature level must be >= 1"));
    }
    let coarse = SphereRule::new(n, 8 * level)?;
    let fine = SphereRule::new(n, 16 * level)?;
    let a = coarse.mean(&mut g);
    let b = fine.mean(&mut g);
    Ok(QuadratureResult {
        value: b,
        error_estimate: (a - b).abs(),
        evaluations: coarse.len() + fine.len(),
    })
}
