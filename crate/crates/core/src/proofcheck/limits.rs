//! One-dimensional epsilon limits: `psi`, `h_eps`, the averages
//! `eps int_0^A t^{-1+eps} h` and extrapolation to `eps = 0`.

use crate::error::{Error, Result};
use crate::numerics::quad::{integrate, integrate_adaptive, QuadOptions};
use crate::posdef::NormFunction;
use crate::starbody::StarBody;
use serde::Serialize;

/// Requested bound on the truncated tail of `eps int_a^inf t^{-1-eps} f`.
pub const TAIL_TOL: f64 = 1e-12;
/// Tail integrals stop at `max(a, 1) * TAIL_SPAN` at the latest.
const TAIL_SPAN: f64 = 16_384.0;
const CHUNK: f64 = 64.0;
const QUAD_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// `2^-1, ..., 2^-12`.
pub fn epsilon_grid() -> Vec<f64> {
    (1..=12).map(|k| 0.5f64.powi(k)).collect()
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::arg(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// `int_a^inf t^{-1-eps} (f(t) - f(inf)) dt` for `a > 0`. The part beyond the
/// truncation point `T` is bounded by `envelope(T) T^{-eps} / eps` and added
/// to the error; `tol` is the target for that bound.
pub(crate) fn tail_integral(f: &NormFunction, a: f64, eps: f64, tol: f64, quad_tol: f64) -> Result<Estimate> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::arg(format!("tail integral needs a finite positive start, got {a}")));
    }
    let l = f.limit_at_infinity();
    let cap = a.max(1.0) * TAIL_SPAN;
    let opts = QuadOptions::abs(quad_tol);
    let (mut x, mut value, mut error) = (a, 0.0, 0.0);
    loop {
        let bound = f.tail_envelope(x) * x.powf(-eps) / eps;
        if bound <= tol || x >= cap {
            error += bound;
            break;
        }
        let y = (2.0 * x).min(x + CHUNK);
        let r = integrate_adaptive(|t| t.powf(-1.0 - eps) * (f.eval(t) - l), x, y, None, &opts)?;
        value += r.result.value;
        error += r.result.error_estimate;
        x = y;
    }
    Ok(Estimate { value, error })
}

/// `eps int_a^inf t^{-1-eps} f(t) dt = f(inf) a^{-eps} + eps int_a^inf t^{-1-eps} (f - f(inf))`.
pub fn upper_integral(f: &NormFunction, a: f64, eps: f64) -> Result<Estimate> {
    check_eps(eps)?;
    let tail = tail_integral(f, a, eps, TAIL_TOL / eps, QUAD_TOL)?;
    Ok(Estimate { value: f.limit_at_infinity() * a.powf(-eps) + eps * tail.value, error: eps * tail.error })
}

/// `psi(eps) = eps int_{1/eps}^inf t^{-1-eps} f(t) dt`.
pub fn psi(f: &NormFunction, eps: f64) -> Result<Estimate> {
    check_eps(eps)?;
    upper_integral(f, 1.0 / eps, eps)
}

/// `h_eps(y) = eps int_{1/eps}^inf t^{-1-eps} (1 - f(t ||y||_K)) dt
///           = eps^eps - ||y||^eps eps int_{||y|| / eps}^inf s^{-1-eps} f(s) ds`.
pub fn h_eps(f: &NormFunction, body: &StarBody, y: &[f64], eps: f64) -> Result<Estimate> {
    check_eps(eps)?;
    let r = body.minkowski(y)?;
    if r == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let up = upper_integral(f, r / eps, eps)?;
    let re = r.powf(eps);
    Ok(Estimate { value: eps.powf(eps) - re * up.value, error: re * up.error })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaRow {
    pub eps: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaScan {
    pub rows: Vec<LemmaRow>,
    pub limit: Option<Estimate>,
}

/// `eps int_0^A t^{-1+eps} h(t) dt` along the grid; `[0, min(eps, A)]` is
/// integrated against the exact weight.
pub fn lemma_eps(h: impl Fn(f64) -> f64, a: f64, eps: &[f64]) -> Result<LemmaScan> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::arg(format!("upper limit must be finite and positive, got {a}")));
    }
    let opts = QuadOptions { rel_tol: 1e-14, ..QuadOptions::abs(1e-15) };
    let mut rows = Vec::with_capacity(eps.len());
    for &e in eps {
        check_eps(e)?;
        let s = e.min(a);
        let head = integrate(&h, 0.0, s, Some(e), &opts)?;
        let (rest, rest_err) = if s < a {
            let r = integrate(|t| t.powf(e - 1.0) * h(t), s, a, None, &opts)?;
            (r.value, r.error_estimate)
        } else {
            (0.0, 0.0)
        };
        rows.push(LemmaRow { eps: e, value: e * (head.value + rest), error: e * (head.error_estimate + rest_err) });
    }
    let limit = extrapolate(&rows.iter().map(|r| (r.eps, r.value)).collect::<Vec<_>>());
    Ok(LemmaScan { rows, limit })
}

/// Value at 0 of `a + b eps ln(1/eps) + c eps` through three points.
fn fit(pts: &[(f64, f64)]) -> f64 {
    let mut m = [[0.0; 4]; 3];
    for (row, &(e, v)) in m.iter_mut().zip(pts) {
        *row = [1.0, -e * e.ln(), e, v];
    }
    for k in 0..3 {
        let p = (k..3).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
        m.swap(k, p);
        for i in k + 1..3 {
            let r = m[i][k] / m[k][k];
            for j in k..4 {
                m[i][j] -= r * m[k][j];
            }
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = (k + 1..3).map(|j| m[k][j] * x[j]).sum();
        x[k] = (m[k][3] - s) / m[k][k];
    }
    x[0]
}

/// Limit at `eps = 0` from the three smallest `eps`; the error is the change
/// against the fit on the next three (or against the smallest-eps value).
pub fn extrapolate(points: &[(f64, f64)]) -> Option<Estimate> {
    if points.len() < 3 || points.iter().any(|(e, v)| !(*e > 0.0 && v.is_finite())) {
        return None;
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let value = fit(&pts[..3]);
    let error = if pts.len() >= 4 { (value - fit(&pts[1..4])).abs() } else { (value - pts[0].1).abs() };
    Some(Estimate { value, error })
}
