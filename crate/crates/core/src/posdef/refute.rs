//! Randomized search for negative Gram quadratic forms.

use super::{check_points, gram_unchecked, NormFunction};
use crate::error::{Error, Result};
use crate::numerics::eigen::sym_eigen_min;
use crate::numerics::rng::{derive_seed, RngStream};
use crate::starbody::StarBody;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const STREAM_TAG: u64 = 0x5043_4f4e_4649_47;
const SCALES: usize = 8;
const SCALE_LO: f64 = 0.1;
const SCALE_HI: f64 = 3.0;
const CHUNK: usize = 512;
const REFINED: usize = 5;

/// Points and coefficients with `c^T G c < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramWitness {
    pub body: String,
    pub f: String,
    pub points: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub quadratic_form_value: f64,
    pub min_eigenvalue: f64,
    pub seed: u64,
    pub trial: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefuteOptions {
    pub m: usize,
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
}

impl RefuteOptions {
    pub fn new(m: usize, budget: usize, seed: u64, tol: f64) -> Self {
        RefuteOptions { m, budget, seed, tol }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefuteOutcome {
    pub witness: Option<GramWitness>,
    /// Smallest eigenvalue seen over all trials.
    pub best_min_eigenvalue: f64,
    pub trials_used: usize,
}

#[derive(Debug, Clone)]
struct Candidate {
    points: Vec<Vec<f64>>,
    lambda: f64,
    scale: f64,
    trial: u64,
}

fn scale_for(trial: u64) -> f64 {
    let k = (trial % SCALES as u64) as f64;
    SCALE_LO * (SCALE_HI / SCALE_LO).powf(k / (SCALES - 1) as f64)
}

/// Deterministic configuration for one trial: even trials subsample a scaled
/// cubic lattice, odd trials draw a Gaussian cloud.
fn random_configuration(n: usize, m: usize, seed: u64, trial: u64) -> (Vec<Vec<f64>>, f64) {
    let mut rng = RngStream::new(derive_seed(seed, STREAM_TAG), trial);
    let scale = scale_for(trial / 2) * rng.uniform_in(0.85, 1.15);
    if trial % 2 == 0 {
        let mut k = 2usize;
        while (k as f64).powi(n as i32) < (2 * m) as f64 {
            k += 1;
        }
        let total = k.pow(n as u32);
        // partial Fisher-Yates over lattice indices
        let mut idx: Vec<usize> = (0..total).collect();
        for i in 0..m {
            let j = i + rng.below(total - i);
            idx.swap(i, j);
        }
        let half = 0.5 * (k - 1) as f64;
        let pts = idx[..m]
            .iter()
            .map(|&v| {
                let mut v = v;
                (0..n)
                    .map(|_| {
                        let c = (v % k) as f64;
                        v /= k;
                        scale * (c - half)
                    })
                    .collect()
            })
            .collect();
        (pts, scale)
    } else {
        let pts = (0..m).map(|_| (0..n).map(|_| scale * rng.normal()).collect()).collect();
        (pts, scale)
    }
}

fn min_eig(f: &NormFunction, body: &StarBody, pts: &[Vec<f64>]) -> f64 {
    sym_eigen_min(&gram_unchecked(f, body, pts)).map(|r| r.0).unwrap_or(f64::INFINITY)
}

/// Pattern search on point coordinates with step halving.
fn refine(f: &NormFunction, body: &StarBody, start: &Candidate, evals: usize, tol: f64) -> (Candidate, usize) {
    let mut best = start.clone();
    let mut step = 0.25 * start.scale;
    let floor = 1e-6 * start.scale;
    let mut used = 0;
    while used < evals && step > floor && best.lambda >= -tol {
        let mut improved = false;
        'pass: for i in 0..best.points.len() {
            for d in 0..body.dim() {
                for sign in [1.0, -1.0] {
                    if used >= evals {
                        break 'pass;
                    }
                    let mut pts = best.points.clone();
                    pts[i][d] += sign * step;
                    let lambda = min_eig(f, body, &pts);
                    used += 1;
                    if lambda < best.lambda {
                        best.points = pts;
                        best.lambda = lambda;
                        improved = true;
                        if lambda < -tol {
                            break 'pass;
                        }
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, used)
}

fn make_witness(f: &NormFunction, body: &StarBody, c: &Candidate, seed: u64) -> Result<GramWitness> {
    let g = gram_unchecked(f, body, &c.points);
    let (lambda, v) = sym_eigen_min(&g)?;
    Ok(GramWitness {
        body: body.spec(),
        f: f.tag(),
        quadratic_form_value: g.quadratic_form(&v),
        points: c.points.clone(),
        coefficients: v,
        min_eigenvalue: lambda,
        seed,
        trial: c.trial,
    })
}

fn order(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    a.lambda.total_cmp(&b.lambda).then(a.trial.cmp(&b.trial))
}

/// Searches for a configuration whose Gram matrix has an eigenvalue below
/// `-tol`. Half of the budget goes to random configurations, the rest to
/// coordinate descent from the best few. The result does not depend on the
/// number of worker threads. Absence of a witness proves nothing.
pub fn refute_positive_definiteness(
    f: &NormFunction,
    body: &StarBody,
    opts: &RefuteOptions,
) -> Result<RefuteOutcome> {
    if opts.m < 2 {
        return Err(Error::arg(format!("need m >= 2 points per trial, got {}", opts.m)));
    }
    if opts.budget < 1 {
        return Err(Error::arg("budget must be at least 1"));
    }
    if !(opts.tol >= 0.0) {
        return Err(Error::arg("tol must be non-negative"));
    }
    let n = body.dim();
    let random_trials = opts.budget.div_ceil(2);
    let mut top: Vec<Candidate> = Vec::new();
    let mut used = 0;
    let mut start = 0;
    while start < random_trials {
        let end = (start + CHUNK).min(random_trials);
        let mut chunk: Vec<Candidate> = (start..end)
            .into_par_iter()
            .map(|t| {
                let (points, scale) = random_configuration(n, opts.m, opts.seed, t as u64);
                let lambda = min_eig(f, body, &points);
                Candidate { points, lambda, scale, trial: t as u64 }
            })
            .collect();
        used += end - start;
        chunk.sort_by(order);
        top.extend(chunk.into_iter().take(REFINED));
        top.sort_by(order);
        top.truncate(REFINED);
        if top[0].lambda < -opts.tol {
            return Ok(RefuteOutcome {
                witness: Some(make_witness(f, body, &top[0], opts.seed)?),
                best_min_eigenvalue: top[0].lambda,
                trials_used: used,
            });
        }
        start = end;
    }
    let remaining = opts.budget - used;
    let per = remaining / top.len().max(1);
    let refined: Vec<(Candidate, usize)> = if per == 0 {
        Vec::new()
    } else {
        top.par_iter().map(|c| refine(f, body, c, per, opts.tol)).collect()
    };
    used += refined.iter().map(|r| r.1).sum::<usize>();
    let mut all: Vec<Candidate> = top.into_iter().chain(refined.into_iter().map(|r| r.0)).collect();
    all.sort_by(order);
    let best = &all[0];
    let witness = if best.lambda < -opts.tol { Some(make_witness(f, body, best, opts.seed)?) } else { None };
    Ok(RefuteOutcome { witness, best_min_eigenvalue: best.lambda, trials_used: used })
}

/// Independent recomputation of a witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub recomputed: f64,
    pub stored: f64,
    /// `|recomputed - stored| <= 1e-10`.
    pub consistent: bool,
    /// `recomputed < -tol`.
    pub negative: bool,
}

/// Rebuilds the Gram matrix from the stored body, function and points and
/// evaluates the quadratic form. Uses no randomness.
pub fn verify_witness(w: &GramWitness, tol: f64) -> Result<WitnessCheck> {
    let body = StarBody::parse(&w.body)?;
    let f = NormFunction::parse(&w.f)?;
    check_points(&body, &w.points)?;
    if w.coefficients.len() != w.points.len() {
        return Err(Error::arg(format!(
            "witness has {} coefficients for {} points",
            w.coefficients.len(),
            w.points.len()
        )));
    }
    let mut value = 0.0;
    let mut diff = vec![0.0; body.dim()];
    for (i, (pi, ci)) in w.points.iter().zip(&w.coefficients).enumerate() {
        for (j, (pj, cj)) in w.points.iter().zip(&w.coefficients).enumerate() {
            let fv = if i == j {
                f.eval(0.0)
            } else {
                for (d, (a, b)) in diff.iter_mut().zip(pi.iter().zip(pj)) {
                    *d = a - b;
                }
                f.eval(body.minkowski(&diff)?)
            };
            value += ci * cj * fv;
        }
    }
    Ok(WitnessCheck {
        recomputed: value,
        stored: w.quadratic_form_value,
        consistent: (value - w.quadratic_form_value).abs() <= 1e-10,
        negative: value < -tol,
    })
}

/// Summary of random Gram matrices drawn like the search's first phase.
#[derive(Debug, Clone, Serialize)]
pub struct PdCheckReport {
    pub samples: usize,
    pub m: usize,
    pub min_eigenvalue: f64,
    pub worst_trial: u64,
    /// Samples with min eigenvalue below `-tol`.
    pub violations: usize,
    pub tol: f64,
}

pub fn pd_check(
    f: &NormFunction,
    body: &StarBody,
    m: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PdCheckReport> {
    if m < 1 || samples < 1 {
        return Err(Error::arg("pd_check needs m >= 1 and samples >= 1"));
    }
    let lambdas: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|t| {
            let (pts, _) = random_configuration(body.dim(), m, seed, t);
            sym_eigen_min(&gram_unchecked(f, body, &pts)).map(|r| r.0)
        })
        .collect::<Result<_>>()?;
    let (worst, min) = lambdas
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
    Ok(PdCheckReport {
        samples,
        m,
        min_eigenvalue: min,
        worst_trial: worst as u64,
        violations: lambdas.iter().filter(|&&l| l < -tol).count(),
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configurations_are_deterministic_and_distinct() {
        let (a, _) = random_configuration(3, 16, 7, 4);
        let (b, _) = random_configuration(3, 16, 7, 4);
        assert_eq!(a, b);
        for i in 0..16 {
            for j in (i + 1)..16 {
                assert_ne!(a[i], a[j]);
            }
        }
        let (c, _) = random_configuration(3, 16, 8, 4);
        assert_ne!(a, c);
    }

    #[test]
    fn finds_witness_for_gaussian_on_cube_norm() {
        let f = NormFunction::exp_pow(2.0).unwrap();
        let body = StarBody::linf(3).unwrap();
        let out = refute_positive_definiteness(&f, &body, &RefuteOptions::new(16, 4000, 1, 1e-6)).unwrap();
        let w = out.witness.expect("witness");
        assert!(w.quadratic_form_value < -1e-6);
        let check = verify_witness(&w, 0.0).unwrap();
        assert!(check.consistent && check.negative);
        let json = serde_json::to_string(&w).unwrap();
        let back: GramWitness = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn exponential_on_euclidean_space_is_not_refuted() {
        let f = NormFunction::exp_pow(1.0).unwrap();
        let body = StarBody::euclidean(3).unwrap();
        let out = refute_positive_definiteness(&f, &body, &RefuteOptions::new(8, 600, 3, 1e-10)).unwrap();
        assert!(out.witness.is_none());
        assert!(out.best_min_eigenvalue >= -1e-10);
        assert_eq!(out.trials_used <= 600, true);
    }

    #[test]
    fn zeroed_coefficients_do_not_verify() {
        let f = NormFunction::exp_pow(2.0).unwrap();
        let body = StarBody::linf(3).unwrap();
        let out = refute_positive_definiteness(&f, &body, &RefuteOptions::new(16, 2000, 2, 1e-6)).unwrap();
        let mut w = out.witness.unwrap();
        w.coefficients.iter_mut().for_each(|c| *c = 0.0);
        let check = verify_witness(&w, 0.0).unwrap();
        assert!(!check.negative && !check.consistent);
    }

    #[test]
    fn pd_check_counts_violations() {
        let body = StarBody::lq(2, 4.0).unwrap();
        let f = NormFunction::exp_pow(1.0).unwrap();
        let r = pd_check(&f, &body, 12, 200, 1, 1e-8).unwrap();
        assert_eq!(r.violations, 0);
        let f = NormFunction::exp_pow(2.0).unwrap();
        let body = StarBody::linf(3).unwrap();
        let r = pd_check(&f, &body, 16, 400, 1, 1e-8).unwrap();
        assert!(r.violations > 0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = NormFunction::Constant;
        let body = StarBody::euclidean(2).unwrap();
        assert!(refute_positive_definiteness(&f, &body, &RefuteOptions::new(1, 10, 0, 0.0)).is_err());
        assert!(refute_positive_definiteness(&f, &body, &RefuteOptions::new(4, 0, 0, 0.0)).is_err());
    }
}
