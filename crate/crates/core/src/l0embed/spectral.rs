//! Fourier transforms of test functions, one radial transform per harmonic
//! degree, sampled on Gauss-Legendre panels in `s = |xi|`.

use super::{fill_zonal, zonal_coefficients, Bump, TestFunction};
use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_j_seq;
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::special::{gamma, sphere_area};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Sampling of the radial transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Largest `|xi|` sampled before declaring the decay fit failed.
    pub s_limit: f64,
    /// Gauss nodes per panel.
    pub nodes: usize,
    /// Oscillation periods `2 pi / r1` per panel.
    pub periods: f64,
    /// Geometric refinement levels of the first panel toward `s = 0`.
    pub geometric: usize,
    /// Truncate once `|H_l(s)| s^{n-1} (1 + |ln s|)` stays below this
    /// fraction of its maximum for four panels.
    pub decay_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { s_limit: 4000.0, nodes: 20, periods: 2.0, geometric: 30, decay_tol: 1e-10 }
    }
}

impl GridSpec {
    fn key(&self) -> [u64; 5] {
        [
            self.s_limit.to_bits(),
            self.nodes as u64,
            self.periods.to_bits(),
            self.geometric as u64,
            self.decay_tol.to_bits(),
        ]
    }
}

/// Radial transforms `H_l`, `l = 0, 2, ..., max_degree`, of one bump, with
/// their moments computed by the sampling rule. Sampled once per annulus
/// ratio on the reference annulus `[1, q]` and dilated:
/// `H_l^{[r0, q r0]}(s) = r0^n H_l^{[1, q]}(r0 s)`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialTransform {
    pub n: usize,
    pub bump: Bump,
    pub max_degree: usize,
    pub cutoff: f64,
    /// `max_s |H_l(s)| (1 + s)^8` over all degrees and grid nodes.
    pub decay_constant: f64,
    /// `int H_l s^{n-1} ds`, index `l / 2`.
    pub moments: Vec<f64>,
    /// `int |H_l| s^{n-1} ds`, index `l / 2`.
    pub abs_moments: Vec<f64>,
    /// `int ln(s) H_0 s^{n-1} ds`.
    pub log_moment: f64,
    /// `int rho(r) / r dr`.
    pub inverse_moment: f64,
    #[serde(skip)]
    table: Arc<Table>,
}

/// Samples of the reference transforms on Gauss-Legendre panels.
#[derive(Debug)]
struct Table {
    panels: Vec<(f64, f64)>,
    values: Vec<Vec<f64>>,
    nodes_per_panel: usize,
    /// Gauss nodes on `[-1, 1]` and their barycentric weights.
    rule: Vec<f64>,
    bary: Vec<f64>,
    moments: Vec<f64>,
    abs_moments: Vec<f64>,
    log_moment: f64,
}

/// `(2 pi)^{n/2} (-1)^{l/2} 2^{n/2} Gamma((l+n)/2) / Gamma(l/2) int rho / r`
/// for `l >= 2`, zero for `l = 0`.
pub fn closed_form_moment(n: usize, bump: &Bump, l: usize) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let sign = if (l / 2) % 2 == 1 { -1.0 } else { 1.0 };
    let lf = l as f64;
    (2.0 * PI).powf(0.5 * nf) * sign * 2f64.powf(0.5 * nf) * gamma(0.5 * (lf + nf)) / gamma(0.5 * lf)
        * bump.moment(-1.0)
}

/// `-(2 pi)^n int rho / r / |S^{n-1}|`, from `(ln|x|)^ = -(2 pi)^n |xi|^{-n} / |S^{n-1}|` off 0.
pub fn closed_form_log_moment(n: usize, bump: &Bump) -> f64 {
    -(2.0 * PI).powi(n as i32) * bump.moment(-1.0) / sphere_area(n)
}

/// `H_l(s)` for even `l <= max_degree`, index `l / 2`.
fn transform_at(n: usize, bump: &Bump, max_degree: usize, s: f64) -> Vec<f64> {
    let nu = 0.5 * (n as f64 - 2.0);
    let w = bump.r1 - bump.r0;
    let panels = bump.base_panels().max((s * w / 10.0).ceil() as usize);
    let (rs, ws) = bump.rule(panels);
    let mut j = vec![0.0; max_degree + 1];
    let mut acc = vec![0.0; max_degree / 2 + 1];
    for (r, wr) in rs.iter().zip(&ws) {
        let f = wr * bump.eval(*r) * r.powf(0.5 * n as f64);
        if f == 0.0 {
            continue;
        }
        bessel_j_seq(nu, r * s, &mut j);
        for (i, a) in acc.iter_mut().enumerate() {
            *a += f * j[2 * i];
        }
    }
    let scale = (2.0 * PI).powf(0.5 * n as f64) * s.powf(-nu);
    acc.iter()
        .enumerate()
        .map(|(i, a)| if i % 2 == 1 { -scale * a } else { scale * a })
        .collect()
}

fn panel_nodes(rule: &[f64], (a, b): (f64, f64)) -> impl Iterator<Item = f64> + '_ {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.iter().map(move |x| c + h * x)
}

type CacheKey = (usize, u64, usize, [u64; 5]);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Table>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Table>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Radial transforms of `bump` in dimension `n` up to even degree
/// `max_degree`; the reference samples are memoized per process.
pub fn radial_transform(n: usize, bump: &Bump, max_degree: usize, grid: &GridSpec) -> Result<RadialTransform> {
    if n < 2 {
        return Err(Error::arg(format!("radial transforms need n >= 2, got {n}")));
    }
    if grid.nodes < 4 || !(grid.periods > 0.0) || !(grid.s_limit > 0.0) || !(grid.decay_tol > 0.0) {
        return Err(Error::arg("invalid spectral grid specification"));
    }
    let max_degree = max_degree + max_degree % 2;
    let reference = bump.reference();
    let key = (n, reference.r1.to_bits(), max_degree, grid.key());
    let hit = cache().lock().unwrap().get(&key).cloned();
    let table = match hit {
        Some(t) => t,
        None => {
            let t = Arc::new(sample(n, &reference, max_degree, grid)?);
            cache().lock().unwrap().insert(key, t.clone());
            t
        }
    };
    let r0 = bump.r0;
    let dilation = r0.powi(n as i32);
    let rule = gauss_legendre(grid.nodes);
    let mut decay_constant: f64 = 0.0;
    for (i, p) in table.panels.iter().enumerate() {
        for (j, sigma) in panel_nodes(&rule.nodes, *p).enumerate() {
            let envelope = dilation * (1.0 + sigma / r0).powi(8);
            for v in &table.values {
                decay_constant = decay_constant.max(v[i * grid.nodes + j].abs() * envelope);
            }
        }
    }
    Ok(RadialTransform {
        n,
        bump: *bump,
        max_degree,
        cutoff: table.panels.last().map(|p| p.1).unwrap_or(0.0) / r0,
        decay_constant,
        moments: table.moments.clone(),
        abs_moments: table.abs_moments.clone(),
        log_moment: table.log_moment - r0.ln() * table.moments[0],
        inverse_moment: bump.moment(-1.0),
        table,
    })
}

fn sample(n: usize, bump: &Bump, max_degree: usize, grid: &GridSpec) -> Result<Table> {
    let rule = gauss_legendre(grid.nodes);
    let width = (grid.periods * 2.0 * PI / bump.r1).min(4.0);
    let mut panels = vec![(0.0, width * 0.5f64.powi(grid.geometric as i32))];
    for j in (0..grid.geometric).rev() {
        panels.push((width * 0.5f64.powi(j as i32 + 1), width * 0.5f64.powi(j as i32)));
    }
    let degrees = max_degree / 2 + 1;
    let nf = n as f64;
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); degrees];
    let mut moments = vec![0.0; degrees];
    let mut abs_moments = vec![0.0; degrees];
    let mut log_moment = 0.0;
    let mut peak: f64 = 0.0;
    let mut quiet = 0usize;
    let mut next = width;
    let batch = 32;
    let mut done = false;
    let mut start = 0;
    while !done {
        if start == panels.len() {
            if next >= grid.s_limit {
                return Err(Error::num(format!(
                    "radial transform of [{}, {}] in dimension {n} has not decayed by |xi| = {}; increase s_limit or refine the spectral grid",
                    bump.r0, bump.r1, grid.s_limit
                )));
            }
            for _ in 0..batch {
                panels.push((next, next + width));
                next += width;
            }
        }
        let todo = &panels[start..];
        let sampled: Vec<Vec<(f64, Vec<f64>)>> = todo
            .par_iter()
            .map(|&p| panel_nodes(&rule.nodes, p).map(|s| (s, transform_at(n, bump, max_degree, s))).collect())
            .collect();
        let mut consumed = 0;
        for (p, samples) in todo.iter().zip(sampled) {
            let h = 0.5 * (p.1 - p.0);
            let mut panel_max: f64 = 0.0;
            for ((s, hs), w) in samples.iter().zip(&rule.weights) {
                let jac = w * h * s.powf(nf - 1.0);
                for (i, v) in hs.iter().enumerate() {
                    values[i].push(*v);
                    moments[i] += jac * v;
                    abs_moments[i] += jac * v.abs();
                    panel_max = panel_max.max(v.abs() * s.powf(nf - 1.0) * (1.0 + s.ln().abs()));
                }
                log_moment += jac * s.ln() * hs[0];
            }
            consumed += 1;
            peak = peak.max(panel_max);
            if p.0 >= width && panel_max <= grid.decay_tol * peak {
                quiet += 1;
                if quiet >= 4 {
                    done = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        start += consumed;
    }
    panels.truncate(start);
    let bary = barycentric_weights(&rule.nodes);
    Ok(Table {
        panels,
        values,
        nodes_per_panel: grid.nodes,
        rule: rule.nodes.clone(),
        bary,
        moments,
        abs_moments,
        log_moment,
    })
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| 1.0 / (0..x.len()).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
        .collect()
}

impl RadialTransform {
    /// Interpolated `H_l(s)`; zero beyond the cutoff.
    pub fn eval(&self, l: usize, s: f64) -> f64 {
        let s = s.abs();
        if l % 2 == 1 || l > self.max_degree || s >= self.cutoff {
            return 0.0;
        }
        let t = &self.table;
        let sigma = s * self.bump.r0;
        let i = t.panels.partition_point(|p| p.1 <= sigma).min(t.panels.len() - 1);
        let (a, b) = t.panels[i];
        let x = (2.0 * sigma - a - b) / (b - a);
        let vals = &t.values[l / 2][i * t.nodes_per_panel..(i + 1) * t.nodes_per_panel];
        let dilation = self.bump.r0.powi(self.n as i32);
        let (mut num, mut den) = (0.0, 0.0);
        for ((xj, wj), vj) in t.rule.iter().zip(&t.bary).zip(vals) {
            let d = x - xj;
            if d == 0.0 {
                return dilation * vj;
            }
            num += wj / d * vj;
            den += wj / d;
        }
        dilation * num / den
    }

    /// Exact `H_l(s)` by quadrature over the bump.
    pub fn exact(&self, l: usize, s: f64) -> f64 {
        if l % 2 == 1 || l > self.max_degree {
            return 0.0;
        }
        transform_at(self.n, &self.bump, self.max_degree, s.abs().max(f64::MIN_POSITIVE))[l / 2]
    }

    /// Sampling panels in `|xi|`, `nodes_per_panel` Gauss points each.
    pub fn panels(&self) -> Vec<(f64, f64)> {
        self.table.panels.iter().map(|(a, b)| (a / self.bump.r0, b / self.bump.r0)).collect()
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.table.nodes_per_panel
    }

    pub fn moment(&self, l: usize) -> f64 {
        if l % 2 == 1 || l > self.max_degree {
            0.0
        } else {
            self.moments[l / 2]
        }
    }
}

/// `phi^` as a sum of radial transforms times zonal harmonics.
#[derive(Debug, Clone)]
pub struct SpectralTransform {
    pub radial: RadialTransform,
    pub phi: TestFunction,
    /// Zonal coefficients `alpha_l` of each angular term.
    pub coefficients: Vec<Vec<f64>>,
}

/// Harmonic expansion of `phi^`, `phi^(xi) = int phi(x) e^{-i(x, xi)} dx`.
/// Real and even because `phi` is.
pub fn fourier_of_test_function(phi: &TestFunction, grid: &GridSpec) -> Result<SpectralTransform> {
    let deg = phi.max_degree();
    let radial = radial_transform(phi.n, &phi.radial, deg, grid)?;
    let coefficients = phi.terms.iter().map(|t| zonal_coefficients(phi.n, &t.profile, deg)).collect();
    Ok(SpectralTransform { radial, phi: phi.clone(), coefficients })
}

impl SpectralTransform {
    fn combine(&self, xi: &[f64], h: impl Fn(usize, f64) -> f64) -> f64 {
        let s = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let deg = self.radial.max_degree;
        let hs: Vec<f64> = (0..=deg).step_by(2).map(|l| h(l, s)).collect();
        let mut z = vec![0.0; deg + 1];
        let mut total = 0.0;
        for (term, alpha) in self.phi.terms.iter().zip(&self.coefficients) {
            let t = if s > 0.0 {
                (term.axis.iter().zip(xi).map(|(a, x)| a * x).sum::<f64>() / s).clamp(-1.0, 1.0)
            } else {
                1.0
            };
            fill_zonal(self.phi.n, t, &mut z);
            let v: f64 = (0..=deg).step_by(2).map(|l| alpha[l] * hs[l / 2] * z[l]).sum();
            total += term.weight * v;
        }
        total
    }

    /// Interpolated `phi^(xi)`.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.combine(xi, |l, s| self.radial.eval(l, s))
    }

    /// `phi^(xi)` with radial transforms evaluated by direct quadrature.
    pub fn eval_exact(&self, xi: &[f64]) -> f64 {
        self.combine(xi, |l, s| self.radial.exact(l, s))
    }

    /// `int phi^ d xi`, which equals `(2 pi)^n phi(0) = 0`.
    pub fn total_integral(&self) -> f64 {
        sphere_area(self.phi.n) * self.phi.angular_mean() * self.radial.moment(0)
    }

    /// Upper bound for `int |phi^|` from the per-degree radial norms.
    pub fn l1_bound(&self) -> f64 {
        let n = self.phi.n;
        let lam = 0.5 * (n as f64 - 2.0);
        let mut total = 0.0;
        for (term, alpha) in self.phi.terms.iter().zip(&self.coefficients) {
            for l in (0..=self.radial.max_degree).step_by(2) {
                // |Z_l| <= Z_l(1) on [-1, 1]
                let zmax = if n == 2 { 1.0 } else { gamma(l as f64 + 2.0 * lam) / (gamma(2.0 * lam) * gamma(l as f64 + 1.0)) };
                total += term.weight * alpha[l].abs() * zmax * self.radial.abs_moments[l / 2];
            }
        }
        sphere_area(n) * total
    }
}
