//! The epsilon machinery relating positive definiteness of `f(||x||_K)` to
//! the L0 criterion. With `r = ||x||_K`,
//!
//! ```text
//! A(r) = eps int_0^r t^{-1+eps} f(t) dt,   B(r) = eps int_r^inf t^{-1-eps} f(t) dt,
//! g(eps) = int (r^{-eps} A + r^{eps} B) / eps  phi^(x) dx = u + v + w,
//! u = int (r^{-eps} - 1) / eps A phi^,  v = int (r^{eps} - 1) / eps B phi^,  w = int (A + B) / eps phi^.
//! ```
//!
//! The x-integrals run over the image of `phi^(x) dx` under `x -> ||x||_K`,
//! a weighted rule in `r` (see [`NormProfile`]). Because `int phi^ = 0`,
//! brackets are only needed up to additive constants. Writing
//! `a(r) = int_0^r t^{-1+eps} (f - f(0))` and `b(r) = int_r^inf t^{-1-eps} (f - f(inf))`:
//!
//! ```text
//! g: r^{-eps} a + r^{eps} b
//! u: (r^{-eps} - 1) a - f(0) (r^{eps} - 1) / eps
//! v: (r^{eps} - 1) b - f(inf) (r^{-eps} - 1) / eps
//! w: a + b + f(0) (r^{eps} - 1) / eps + f(inf) (r^{-eps} - 1) / eps
//! ```
//!
//! `u`, `v`, `w` use `a`, `b` accumulated node to node. `g` is evaluated per
//! node in the split form `int_0^1 s^{-1+eps} (f(rs) - f(0)) ds + int_1^inf s^{-1-eps} (f(rs) - f(inf)) ds`,
//! so `g = u + v + w` compares two independent quadratures.

mod limits;
mod tail;

pub use limits::{
    epsilon_grid, extrapolate, h_eps, lemma_eps, psi, upper_integral, Estimate, LemmaRow, LemmaScan, TAIL_TOL,
};
pub use tail::{gaussian_tail_check, ProbabilityLaw, TailRow, MAX_MC_ERROR};

use crate::error::{Error, Result};
use crate::l0embed::{
    fourier_of_test_function, log_pairing_with, Bump, GridSpec, PairingOptions, TestFunction, ZonalProfile,
};
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::quad::{integrate, QuadOptions};
use crate::numerics::special::sphere_area;
use crate::numerics::sphere::SphereRule;
use crate::posdef::NormFunction;
use crate::starbody::StarBody;
use limits::{check_eps, tail_integral};
use rayon::prelude::*;
use serde::Serialize;

const QUAD_REL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofOptions {
    /// Multiplier of the base sphere resolution; the error estimate compares
    /// it with twice it.
    pub sphere_level: usize,
    pub grid: GridSpec,
    /// Absolute tolerance of every inner t-integral; the relative one is `1e-13`.
    pub quad_tol: f64,
    /// Target bound for the truncated part of `b` beyond the last node.
    pub tail_tol: f64,
    /// Largest acceptable error estimate, relative to the scale.
    pub max_error: f64,
}

impl Default for ProofOptions {
    fn default() -> Self {
        ProofOptions { sphere_level: 1, grid: GridSpec::default(), quad_tol: 1e-14, tail_tol: 1e-13, max_error: 1e-6 }
    }
}

/// `int F(||x||_K) phi^(x) dx ~ sum_j weights_j F(nodes_j)`, from
/// `weights_j = w_j r_j^{n-1} |S| mean_eta[ ||eta||^{-n} phi^(r_j eta / ||eta||) ]`.
#[derive(Debug, Clone, Serialize)]
pub struct NormProfile {
    pub n: usize,
    /// Increasing radii.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// The same rule with the coarser sphere rule.
    pub coarse: Vec<f64>,
    /// `sum_j |weights_j|`, an approximation of `int |phi^|`.
    pub scale: f64,
}

impl NormProfile {
    /// `(sum_j W_j F_j, |sum_j (W_j - W_coarse_j) F_j|)`.
    pub fn apply(&self, f: impl Fn(usize) -> f64) -> (f64, f64) {
        let (mut fine, mut diff) = (0.0, 0.0);
        for (j, (w, c)) in self.weights.iter().zip(&self.coarse).enumerate() {
            let v = f(j);
            fine += w * v;
            diff += (w - c) * v;
        }
        (fine, diff.abs())
    }

    /// `sum_j W_j`, zero up to quadrature error.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `int ln ||x||_K phi^(x) dx` with its sphere-rule error.
    pub fn log_pairing(&self) -> Estimate {
        let (value, error) = self.apply(|j| self.nodes[j].ln());
        Estimate { value, error }
    }

    pub fn scaled(&self, c: f64) -> NormProfile {
        NormProfile {
            n: self.n,
            nodes: self.nodes.clone(),
            weights: self.weights.iter().map(|w| c * w).collect(),
            coarse: self.coarse.iter().map(|w| c * w).collect(),
            scale: c.abs() * self.scale,
        }
    }
}

fn sphere_base(n: usize) -> Result<usize> {
    match n {
        2 => Ok(32),
        3 => Ok(8),
        4 => Ok(4),
        _ => Err(Error::Unsupported(format!("epsilon scans need sphere quadrature, available for n in 2..=4, got {n}"))),
    }
}

pub fn norm_profile(body: &StarBody, phi: &TestFunction, opts: &ProofOptions) -> Result<NormProfile> {
    let n = body.dim();
    if n != phi.n {
        return Err(Error::arg(format!("body dimension {n} differs from test function dimension {}", phi.n)));
    }
    if opts.sphere_level == 0 {
        return Err(Error::arg("sphere level must be >= 1"));
    }
    let base = sphere_base(n)? * opts.sphere_level;
    let spectral = fourier_of_test_function(phi, &opts.grid)?;
    let rules = [SphereRule::cubed(n, base)?, SphereRule::cubed(n, 2 * base)?];
    let gauges: Vec<Vec<f64>> = rules.iter().map(|r| r.points().map(|e| body.gauge(e)).collect()).collect();
    let all = gauges.iter().flatten();
    if all.clone().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(Error::arg("the gauge must be positive and finite on the unit sphere"));
    }
    let kmin = all.clone().fold(f64::INFINITY, |a, k| a.min(*k));
    let kmax = all.fold(0.0f64, |a, k| a.max(*k));

    // the transform panels in |xi|, stretched to the fastest direction and
    // continued uniformly to the slowest one's cutoff
    let mut panels: Vec<(f64, f64)> = spectral.radial.panels().iter().map(|(a, b)| (kmin * a, kmin * b)).collect();
    let &(a, b) = panels.last().ok_or_else(|| Error::num("empty spectral grid"))?;
    let mut x = b;
    while x < kmax * spectral.radial.cutoff {
        panels.push((x, x + (b - a)));
        x += b - a;
    }
    let rule = gauss_legendre(spectral.radial.nodes_per_panel());
    let mut nodes = Vec::with_capacity(panels.len() * rule.nodes.len());
    let mut quad = Vec::with_capacity(nodes.capacity());
    for (a, b) in panels {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let mut pairs: Vec<(f64, f64)> = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| (c + h * x, h * w)).collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        for (x, w) in pairs {
            nodes.push(x);
            quad.push(w);
        }
    }
    let area = sphere_area(n);
    let weights_for = |k: usize| -> Vec<f64> {
        nodes
            .par_iter()
            .zip(&quad)
            .map(|(&rho, &wq)| {
                let mut xi = vec![0.0; n];
                let mut s = 0.0;
                for ((eta, w), kappa) in rules[k].points().zip(rules[k].weights()).zip(&gauges[k]) {
                    let c = rho / kappa;
                    for (x, e) in xi.iter_mut().zip(eta) {
                        *x = c * e;
                    }
                    s += w * spectral.eval(&xi) / kappa.powi(n as i32);
                }
                wq * rho.powi(n as i32 - 1) * area * s
            })
            .collect()
    };
    let coarse = weights_for(0);
    let weights = weights_for(1);
    let scale = weights.iter().map(|w| w.abs()).sum();
    Ok(NormProfile { n, nodes, weights, coarse, scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub eps: f64,
    pub g: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub psi: f64,
    /// Sphere-rule plus quadrature error bound, shared by `g, u, v, w`.
    pub err: f64,
    /// `|g - (u + v + w)|`.
    pub identity_residual: f64,
}

struct Cumulative {
    values: Vec<f64>,
    errors: Vec<f64>,
}

/// `a(r_j)` from 0 upward.
fn lower_parts(f: &NormFunction, rho: &[f64], eps: f64, q: &QuadOptions) -> Result<Cumulative> {
    let f0 = f.eval(0.0);
    let mut values = Vec::with_capacity(rho.len());
    let mut errors = Vec::with_capacity(rho.len());
    let first = integrate(|t| f.eval(t) - f0, 0.0, rho[0], Some(eps), q)?;
    let (mut acc, mut err) = (first.value, first.error_estimate);
    values.push(acc);
    errors.push(err);
    for pair in rho.windows(2) {
        let r = integrate(|t| t.powf(eps - 1.0) * (f.eval(t) - f0), pair[0], pair[1], None, q)?;
        acc += r.value;
        err += r.error_estimate;
        values.push(acc);
        errors.push(err);
    }
    Ok(Cumulative { values, errors })
}

/// `b(r_j)` from the tail downward.
fn upper_parts(f: &NormFunction, rho: &[f64], eps: f64, tail: Estimate, q: &QuadOptions) -> Result<Cumulative> {
    let l = f.limit_at_infinity();
    let m = rho.len();
    let mut values = vec![0.0; m];
    let mut errors = vec![0.0; m];
    let (mut acc, mut err) = (tail.value, tail.error);
    values[m - 1] = acc;
    errors[m - 1] = err;
    for j in (0..m - 1).rev() {
        let r = integrate(|t| t.powf(-1.0 - eps) * (f.eval(t) - l), rho[j], rho[j + 1], None, q)?;
        acc += r.value;
        err += r.error_estimate;
        values[j] = acc;
        errors[j] = err;
    }
    Ok(Cumulative { values, errors })
}

/// The split form of the `g` bracket at one radius.
fn g_bracket(f: &NormFunction, r: f64, rmax: f64, eps: f64, tail: Estimate, q: &QuadOptions) -> Result<Estimate> {
    let (f0, l) = (f.eval(0.0), f.limit_at_infinity());
    let inner = integrate(|s| f.eval(r * s) - f0, 0.0, 1.0, Some(eps), q)?;
    let mut value = inner.value;
    let mut error = inner.error_estimate;
    if r < rmax {
        let outer = integrate(|tau| (-eps * tau).exp() * (f.eval(r * tau.exp()) - l), 0.0, (rmax / r).ln(), None, q)?;
        value += outer.value;
        error += outer.error_estimate;
    }
    let re = r.powf(eps);
    Ok(Estimate { value: value + re * tail.value, error: error + re * tail.error })
}

/// `g, u, v, w` and `psi` at one `eps` on a precomputed profile.
pub fn epsilon_row(f: &NormFunction, prof: &NormProfile, eps: f64, opts: &ProofOptions) -> Result<EpsilonRow> {
    check_eps(eps)?;
    let rho = &prof.nodes;
    if rho.is_empty() {
        return Err(Error::arg("empty profile"));
    }
    let (f0, l) = (f.eval(0.0), f.limit_at_infinity());
    let q = QuadOptions { rel_tol: QUAD_REL, ..QuadOptions::abs(opts.quad_tol) };
    let rmax = rho[rho.len() - 1];
    let tail = tail_integral(f, rmax, eps, opts.tail_tol, opts.quad_tol)?;
    let a = lower_parts(f, rho, eps, &q)?;
    let b = upper_parts(f, rho, eps, tail, &q)?;
    let direct: Vec<Estimate> =
        rho.par_iter().map(|&r| g_bracket(f, r, rmax, eps, tail, &q)).collect::<Result<_>>()?;

    let em: Vec<f64> = rho.iter().map(|r| (-eps * r.ln()).exp_m1()).collect();
    let ep: Vec<f64> = rho.iter().map(|r| (eps * r.ln()).exp_m1()).collect();
    let (a, b) = (&a.values, (&b.values, &b.errors, &a.errors));
    let (bv, be, ae) = b;
    let (u, du) = prof.apply(|j| em[j] * a[j] - f0 * ep[j] / eps);
    let (v, dv) = prof.apply(|j| ep[j] * bv[j] - l * em[j] / eps);
    let (w, dw) = prof.apply(|j| a[j] + bv[j] + f0 * ep[j] / eps + l * em[j] / eps);
    let (g, dg) = prof.apply(|j| direct[j].value);
    let quad_err: f64 = (0..rho.len())
        .map(|j| prof.weights[j].abs() * ((ae[j] + be[j]) * (1.0 + em[j].abs() + ep[j].abs()) + direct[j].error))
        .sum();
    let err = du.max(dv).max(dw).max(dg) + quad_err;
    if !(err <= opts.max_error * prof.scale) {
        return Err(Error::num(format!(
            "eps = {eps}: error estimate {err:.3e} exceeds {:.1e} of the scale {:.3e}; raise the sphere level",
            opts.max_error, prof.scale
        )));
    }
    let p = psi(f, eps)?;
    let bound = eps.powf(eps);
    if p.value.abs() > bound + p.error {
        return Err(Error::num(format!("psi({eps}) = {} leaves [-eps^eps, eps^eps]", p.value)));
    }
    Ok(EpsilonRow { eps, g, u, v, w, psi: p.value, err, identity_residual: (g - (u + v + w)).abs() })
}

/// Rows for a strictly decreasing grid in `(0, 1)`, evaluated in parallel.
pub fn scan_profile(f: &NormFunction, prof: &NormProfile, eps: &[f64], opts: &ProofOptions) -> Result<Vec<EpsilonRow>> {
    if eps.is_empty() {
        return Err(Error::arg("epsilon grid is empty"));
    }
    for e in eps {
        check_eps(*e)?;
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::arg("epsilon grid must be strictly decreasing"));
    }
    eps.par_iter().map(|&e| epsilon_row(f, prof, e, opts)).collect()
}

/// `g(eps)` for one test function.
pub fn g_eps(f: &NormFunction, body: &StarBody, phi: &TestFunction, eps: f64, opts: &ProofOptions) -> Result<f64> {
    check_eps(eps)?;
    Ok(epsilon_row(f, &norm_profile(body, phi, opts)?, eps, opts)?.g)
}

/// `(u, v, w)` for one test function.
pub fn uvw(f: &NormFunction, body: &StarBody, phi: &TestFunction, eps: f64, opts: &ProofOptions) -> Result<(f64, f64, f64)> {
    check_eps(eps)?;
    let r = epsilon_row(f, &norm_profile(body, phi, opts)?, eps, opts)?;
    Ok((r.u, r.v, r.w))
}

/// Radial test function on the annulus `[1, 2]`.
pub fn default_test_function(n: usize) -> Result<TestFunction> {
    let mut axis = vec![0.0; n];
    if let Some(a) = axis.first_mut() {
        *a = 1.0;
    }
    TestFunction::zonal(Bump::dyadic(0), axis, ZonalProfile::Constant)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub g: Option<Estimate>,
    pub u: Option<Estimate>,
    pub v: Option<Estimate>,
    pub w: Option<Estimate>,
    /// `int ln ||x||_K phi^` through the spectral moments.
    pub log_pairing: Estimate,
    /// The same pairing on the norm profile.
    pub profile_log_pairing: Estimate,
    /// `-f(0) int ln ||x||_K phi^`, the limit of `u`.
    pub u_target: f64,
    pub psi_inf: f64,
    pub psi_sup: f64,
    /// `psi` at the smallest `eps`.
    pub c_estimate: f64,
    /// `(c - f(0)) int ln ||x||_K phi^`, when `psi` has settled on the grid.
    pub target: Option<f64>,
    pub max_identity_residual: f64,
    pub min_g: f64,
    pub max_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonScan {
    pub function: String,
    pub body: String,
    pub test_function: TestFunction,
    pub f0: f64,
    pub limit_at_infinity: f64,
    pub scale: f64,
    pub rows: Vec<EpsilonRow>,
    pub summary: ScanSummary,
}

impl EpsilonScan {
    /// Columns `eps,g,u,v,w,err`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,g,u,v,w,err\n");
        for r in &self.rows {
            out.push_str(&format!("{:e},{:e},{:e},{:e},{:e},{:e}\n", r.eps, r.g, r.u, r.v, r.w, r.err));
        }
        out
    }
}

/// Settled when the last two `psi` values agree to this tolerance.
const PSI_SETTLED: f64 = 1e-3;

pub fn proof_scan(
    f: &NormFunction,
    body: &StarBody,
    phi: &TestFunction,
    eps: &[f64],
    opts: &ProofOptions,
) -> Result<EpsilonScan> {
    let prof = norm_profile(body, phi, opts)?;
    let rows = scan_profile(f, &prof, eps, opts)?;
    let pairing = log_pairing_with(
        body,
        phi,
        &PairingOptions { level: opts.sphere_level, grid: opts.grid, ..PairingOptions::default() },
    )?;
    let f0 = f.eval(0.0);
    let lim = |sel: fn(&EpsilonRow) -> f64| extrapolate(&rows.iter().map(|r| (r.eps, sel(r))).collect::<Vec<_>>());
    let psis: Vec<f64> = rows.iter().map(|r| r.psi).collect();
    let c_estimate = *psis.last().unwrap();
    let settled = psis.len() >= 2 && (psis[psis.len() - 1] - psis[psis.len() - 2]).abs() <= PSI_SETTLED;
    let summary = ScanSummary {
        g: lim(|r| r.g),
        u: lim(|r| r.u),
        v: lim(|r| r.v),
        w: lim(|r| r.w),
        log_pairing: Estimate { value: pairing.value, error: pairing.error_estimate },
        profile_log_pairing: prof.log_pairing(),
        u_target: -f0 * pairing.value,
        psi_inf: psis.iter().cloned().fold(f64::INFINITY, f64::min),
        psi_sup: psis.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        c_estimate,
        target: settled.then(|| (c_estimate - f0) * pairing.value),
        max_identity_residual: rows.iter().map(|r| r.identity_residual).fold(0.0, f64::max),
        min_g: rows.iter().map(|r| r.g).fold(f64::INFINITY, f64::min),
        max_err: rows.iter().map(|r| r.err).fold(0.0, f64::max),
    };
    Ok(EpsilonScan {
        function: f.tag(),
        body: body.spec(),
        test_function: phi.clone(),
        f0,
        limit_at_infinity: f.limit_at_infinity(),
        scale: prof.scale,
        rows,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn euclidean_profile() -> &'static NormProfile {
        static P: OnceLock<NormProfile> = OnceLock::new();
        P.get_or_init(|| {
            let body = StarBody::euclidean(2).unwrap();
            norm_profile(&body, &default_test_function(2).unwrap(), &ProofOptions::default()).unwrap()
        })
    }

    fn gauss() -> NormFunction {
        NormFunction::exp_pow(2.0).unwrap()
    }

    #[test]
    fn profile_is_balanced_and_pairs_like_the_spectral_route() {
        let prof = euclidean_profile();
        assert!(prof.mass().abs() <= 1e-9 * prof.scale, "{}", prof.mass());
        let body = StarBody::euclidean(2).unwrap();
        let phi = default_test_function(2).unwrap();
        let spectral = crate::l0embed::log_pairing(&body, &phi).unwrap();
        assert!((prof.log_pairing().value - spectral.value).abs() <= 1e-8 * spectral.scale);
    }

    #[test]
    fn profile_of_a_polyhedral_gauge() {
        let body = StarBody::lq(2, 1.0).unwrap();
        let phi = default_test_function(2).unwrap();
        let prof = norm_profile(&body, &phi, &ProofOptions::default()).unwrap();
        let spectral = crate::l0embed::log_pairing(&body, &phi).unwrap();
        let lp = prof.log_pairing();
        assert!((lp.value - spectral.value).abs() <= 1e-6 * spectral.scale + lp.error + spectral.error_estimate);
    }

    #[test]
    fn constant_function_gives_zero() {
        let prof = euclidean_profile();
        for eps in [0.5, 0.1, 0.01] {
            let r = epsilon_row(&NormFunction::Constant, prof, eps, &ProofOptions::default()).unwrap();
            assert!(r.g.abs() <= 1e-8, "{r:?}");
            assert!(r.identity_residual <= 1e-8);
        }
    }

    #[test]
    fn zero_profile_gives_zero() {
        let prof = euclidean_profile().scaled(0.0);
        let r = epsilon_row(&gauss(), &prof, 0.2, &ProofOptions::default()).unwrap();
        assert_eq!((r.u, r.v, r.w, r.g), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn gaussian_kernel_is_nonnegative_and_decomposes() {
        let rows = scan_profile(&gauss(), euclidean_profile(), &[0.5, 0.2, 0.1, 0.05], &ProofOptions::default()).unwrap();
        for r in &rows {
            assert!(r.g >= -1e-8, "{r:?}");
            assert!(r.identity_residual <= 1e-8 * (1.0 + r.g.abs()), "{r:?}");
        }
    }

    #[test]
    fn w_vanishes_and_u_tends_to_the_pairing() {
        let prof = euclidean_profile();
        let opts = ProofOptions::default();
        let w1 = epsilon_row(&gauss(), prof, 0.1, &opts).unwrap();
        let w2 = epsilon_row(&gauss(), prof, 0.01, &opts).unwrap();
        assert!(w2.w.abs() < w1.w.abs(), "{w1:?} {w2:?}");
        assert!(w1.w.abs() <= 0.2 * w1.u.abs());
        let r = epsilon_row(&gauss(), prof, 1e-3, &opts).unwrap();
        let lp = prof.log_pairing().value;
        assert!((r.u + lp).abs() <= 1e-2, "{} {}", r.u, -lp);
    }

    #[test]
    fn full_scan_summary() {
        let body = StarBody::euclidean(2).unwrap();
        let phi = default_test_function(2).unwrap();
        let scan = proof_scan(&gauss(), &body, &phi, &epsilon_grid(), &ProofOptions::default()).unwrap();
        let s = &scan.summary;
        let u = s.u.unwrap();
        assert!((u.value - s.u_target).abs() <= u.error + s.log_pairing.error, "{s:?}");
        assert!(s.max_identity_residual <= 1e-8);
        assert!(s.min_g >= -1e-8);
        let g = s.g.unwrap();
        let target = s.target.unwrap();
        assert!((g.value - target).abs() <= g.error + 1e-6, "{g:?} {target}");
        assert!(scan.to_csv().lines().count() == 13);
        assert!(scan.to_csv().starts_with("eps,g,u,v,w,err\n"));
    }

    #[test]
    fn rejects_bad_grids() {
        let prof = euclidean_profile();
        let opts = ProofOptions::default();
        assert!(scan_profile(&gauss(), prof, &[0.1, 0.2], &opts).is_err());
        assert!(scan_profile(&gauss(), prof, &[], &opts).is_err());
        assert!(scan_profile(&gauss(), prof, &[1.0], &opts).is_err());
        let body = StarBody::euclidean(3).unwrap();
        assert!(norm_profile(&body, &default_test_function(2).unwrap(), &opts).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn decomposition_identity(p in 0.5f64..2.0, eps in 0.01f64..0.9) {
            let f = NormFunction::exp_pow(p).unwrap();
            let r = epsilon_row(&f, euclidean_profile(), eps, &ProofOptions::default()).unwrap();
            prop_assert!(r.identity_residual <= 1e-8 * (1.0 + r.g.abs()));
            prop_assert!(r.g >= -1e-8);
        }
    }
}
