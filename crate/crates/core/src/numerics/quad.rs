//! Globally adaptive one-dimensional quadrature.
//!
//! Interior panels use the 7/15-point Gauss-Kronrod pair with the QUADPACK
//! error heuristic. An optional algebraic endpoint weight `(t - a)^(-1+eps)`
//! is integrated exactly on the leftmost panel by a Gauss-Jacobi rule, so the
//! singular factor never has to be resolved by bisection. A semi-infinite
//! range is mapped onto (0, 1] with `t = a + (1 - s) / s`.

use super::gauss::gauss_jacobi;
use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl QuadOptions {
    pub fn abs(tol: f64) -> Self {
        QuadOptions { abs_tol: tol, rel_tol: 0.0, max_evals: 200_000 }
    }

    pub fn rel(tol: f64) -> Self {
        QuadOptions { abs_tol: 0.0, rel_tol: tol, max_evals: 200_000 }
    }

    pub fn with_max_evals(mut self, n: usize) -> Self {
        self.max_evals = n;
        self
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const JACOBI_LOW: usize = 10;
const JACOBI_HIGH: usize = 20;

/// Kronrod estimate and error for `f` on `[a, b]`.
fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = resk * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err, resabs)
}

/// `int_a^b (t - a)^(-1+eps) f(t) dt` by paired Gauss-Jacobi rules.
fn jacobi_panel(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, eps: f64) -> (f64, f64, f64) {
    let beta = eps - 1.0;
    let h = b - a;
    let scale = (0.5 * h).powf(eps);
    let mut apply = |n: usize| {
        let rule = gauss_jacobi(n, 0.0, beta);
        let mut s = 0.0;
        let mut sabs = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let v = w * f(a + 0.5 * h * (1.0 + x));
            s += v;
            sabs += v.abs();
        }
        (s * scale, sabs * scale)
    };
    let (lo, _) = apply(JACOBI_LOW);
    let (hi, habs) = apply(JACOBI_HIGH);
    let err = (hi - lo).abs().max(50.0 * f64::EPSILON * habs);
    (hi, err, habs)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    /// Roundoff level of the panel's error estimate.
    floor: f64,
    weighted: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Outcome of an adaptive run, converged or not.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub result: QuadratureResult,
    pub converged: bool,
}

/// Adaptive integration over a finite interval; `weight_eps` selects the
/// endpoint weight `(t - a)^(-1+eps)`.
fn adaptive_finite(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    weight_eps: Option<f64>,
    opts: &QuadOptions,
) -> Adaptive {
    let per_weighted = JACOBI_LOW + JACOBI_HIGH;
    let mut evals = 0usize;
    let eval_panel = |f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64, weighted: bool| {
        let (value, err, abs) = if weighted {
            jacobi_panel(f, lo, hi, weight_eps.unwrap())
        } else if let Some(eps) = weight_eps {
            let mut g = |t: f64| (t - a).powf(eps - 1.0) * f(t);
            gk15(&mut g, lo, hi)
        } else {
            gk15(f, lo, hi)
        };
        Panel { a: lo, b: hi, value, err, floor: 50.0 * f64::EPSILON * abs, weighted }
    };
    let mut heap = BinaryHeap::new();
    let first = eval_panel(f, a, b, weight_eps.is_some());
    evals += if first.weighted { per_weighted } else { 15 };
    let mut total = first.value;
    let mut total_err = first.err;
    let mut total_floor = first.floor;
    heap.push(first);
    let mut converged = false;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            converged = true;
            break;
        }
        if evals + 2 * per_weighted > opts.max_evals {
            break;
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || worst.err <= worst.floor {
            // the largest error is at roundoff; bisection cannot reduce it
            converged = total_err <= target.max(2.0 * total_floor);
            heap.push(worst);
            break;
        }
        let left = eval_panel(f, worst.a, mid, worst.weighted);
        let right = eval_panel(f, mid, worst.b, false);
        evals += if worst.weighted { per_weighted } else { 15 } + 15;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        total_floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error_estimate: f64 = panels.iter().map(|p| p.err).sum();
    let target = opts.abs_tol.max(opts.rel_tol * value.abs());
    Adaptive {
        result: QuadratureResult { value, error_estimate, evaluations: evals },
        converged: converged || error_estimate <= target,
    }
}

/// Best-effort adaptive integration of `f` over `[a, b]`, `b` possibly `+inf`,
/// with optional endpoint weight `(t - a)^(-1+eps)`, `eps > 0`.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    weight_eps: Option<f64>,
    opts: &QuadOptions,
) -> Result<Adaptive> {
    if !(a.is_finite() && a < b) || b.is_nan() {
        return Err(Error::arg(format!("invalid interval [{a}, {b}]")));
    }
    if let Some(eps) = weight_eps {
        if !(eps > 0.0) {
            return Err(Error::arg("endpoint weight exponent must be positive"));
        }
    }
    if b.is_finite() {
        return Ok(adaptive_finite(&mut f, a, b, weight_eps, opts));
    }
    let split_opts = QuadOptions { abs_tol: 0.5 * opts.abs_tol, ..*opts };
    let (head, start) = match weight_eps {
        Some(_) => (Some(adaptive_finite(&mut f, a, a + 1.0, weight_eps, &split_opts)), a + 1.0),
        None => (None, a),
    };
    let mut g = |s: f64| {
        let t = start + (1.0 - s) / s;
        let w = match weight_eps {
            Some(eps) => (t - a).powf(eps - 1.0),
            None => 1.0,
        };
        let v = w * f(t) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let tail = adaptive_finite(&mut g, 0.0, 1.0, None, &split_opts);
    Ok(match head {
        None => tail,
        Some(h) => Adaptive {
            result: QuadratureResult {
                value: h.result.value + tail.result.value,
                error_estimate: h.result.error_estimate + tail.result.error_estimate,
                evaluations: h.result.evaluations + tail.result.evaluations,
            },
            converged: h.converged && tail.converged,
        },
    })
}

/// Adaptive integration that fails with a numerical error when the requested
/// tolerance is not reached within the evaluation budget.
pub fn integrate(
    f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    weight_eps: Option<f64>,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let out = integrate_adaptive(f, a, b, weight_eps, opts)?;
    if out.converged {
        Ok(out.result)
    } else {
        Err(Error::num(format!(
            "quadrature on [{a}, {b}] did not converge: value {:.6e}, error estimate {:.3e} after {} evaluations",
            out.result.value, out.result.error_estimate, out.result.evaluations
        )))
    }
}

/// `int_a^b f` to absolute tolerance `tol`.
pub fn integrate_1d(f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate(f, a, b, None, &QuadOptions::abs(tol))
}

/// `int_a^b (t - a)^(-1+eps) f(t) dt` to absolute tolerance `tol`.
pub fn integrate_1d_weighted(
    f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    eps: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    integrate(f, a, b, Some(eps), &QuadOptions::abs(tol))
}
