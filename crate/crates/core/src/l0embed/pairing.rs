//! `<ln ||x||_K, phi^>` and the scan over a test-function family.

use super::spectral::{closed_form_log_moment, closed_form_moment, radial_transform, GridSpec, RadialTransform};
use super::{fill_zonal, zonal_coefficients, Bump, TestFunction, ZonalProfile};
use crate::error::{Error, Result};
use crate::numerics::special::sphere_area;
use crate::numerics::sphere::SphereRule;
use crate::starbody::StarBody;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingOptions {
    /// Multiplier of the base sphere resolution; the error estimate compares
    /// this resolution with twice it.
    pub level: usize,
    pub grid: GridSpec,
    /// Largest acceptable error estimate, relative to the scale.
    pub max_error: f64,
}

impl Default for PairingOptions {
    fn default() -> Self {
        PairingOptions { level: 1, grid: GridSpec::default(), max_error: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingResult {
    /// `<ln ||x||_K, phi^>` through the sampled radial transforms.
    pub value: f64,
    /// `(2 pi)^n psibar int rho / r`, the magnitude of the `ln|x|_2` part.
    pub scale: f64,
    pub normalized: f64,
    pub error_estimate: f64,
    /// Coarse versus fine sphere rule.
    pub angular_error: f64,
    /// Sampled versus closed-form radial moments.
    pub radial_error: f64,
}

/// `ln ||eta||_K` minus its mean, at two sphere resolutions.
struct SphereSamples {
    rules: [SphereRule; 2],
    g: [Vec<f64>; 2],
}

fn base_resolution(n: usize) -> Result<usize> {
    match n {
        2 => Ok(32),
        3 => Ok(16),
        4 => Ok(8),
        _ => Err(Error::Unsupported(format!("L0 pairings need sphere quadrature, available for n in 2..=4, got {n}"))),
    }
}

fn sphere_samples(body: &StarBody, level: usize) -> Result<SphereSamples> {
    let n = body.dim();
    if level == 0 {
        return Err(Error::arg("sphere resolution level must be >= 1"));
    }
    let p = base_resolution(n)? * level;
    let rules = [SphereRule::cubed(n, p)?, SphereRule::cubed(n, 2 * p)?];
    let sample = |rule: &SphereRule| -> Result<Vec<f64>> {
        let pts: Vec<&[f64]> = rule.points().collect();
        let mut g: Vec<f64> = pts.par_iter().map(|eta| body.gauge(eta).ln()).collect();
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::num(format!("gauge of {} is not finite and positive on the sphere", body.spec())));
        }
        let mean = g.iter().zip(rule.weights()).map(|(v, w)| v * w).sum::<f64>() / rule.weights().iter().sum::<f64>();
        g.iter_mut().for_each(|v| *v -= mean);
        Ok(g)
    };
    let g = [sample(&rules[0])?, sample(&rules[1])?];
    Ok(SphereSamples { rules, g })
}

/// `mean_S (g Z_l(<a, eta>))`, `l = 0..=deg`, at both resolutions.
fn zonal_moments(samples: &SphereSamples, n: usize, axis: &[f64], deg: usize) -> [Vec<f64>; 2] {
    let one = |k: usize| {
        let rule = &samples.rules[k];
        let mut z = vec![0.0; deg + 1];
        let mut acc = vec![0.0; deg + 1];
        for ((eta, w), g) in rule.points().zip(rule.weights()).zip(&samples.g[k]) {
            let t = axis.iter().zip(eta).map(|(a, e)| a * e).sum::<f64>().clamp(-1.0, 1.0);
            fill_zonal(n, t, &mut z);
            let wg = w * g;
            for (a, zl) in acc.iter_mut().zip(&z) {
                *a += wg * zl;
            }
        }
        acc
    };
    [one(0), one(1)]
}

/// One test function prepared for pairing: per-term zonal coefficients and moments.
struct Prepared<'a> {
    phi: &'a TestFunction,
    radial: &'a RadialTransform,
    coefficients: Vec<Vec<f64>>,
    moments: Vec<&'a [Vec<f64>; 2]>,
}

fn evaluate(p: &Prepared<'_>) -> PairingResult {
    let n = p.phi.n;
    let area = sphere_area(n);
    let psibar = p.phi.angular_mean();
    let bump = &p.phi.radial;
    let deg = p.radial.max_degree;
    let total = |k: usize, closed: bool| {
        let log = if closed { closed_form_log_moment(n, bump) } else { p.radial.log_moment };
        let mut v = area * psibar * log;
        for ((term, alpha), m) in p.phi.terms.iter().zip(&p.coefficients).zip(&p.moments) {
            for l in (2..=deg.min(alpha.len() - 1)).step_by(2) {
                let r = if closed { closed_form_moment(n, bump, l) } else { p.radial.moment(l) };
                v += term.weight * alpha[l] * r * area * m[k][l];
            }
        }
        v
    };
    let fine = total(1, false);
    let coarse = total(0, false);
    let closed = total(1, true);
    let scale = (2.0 * PI).powi(n as i32) * psibar * p.radial.inverse_moment;
    let angular_error = (fine - coarse).abs();
    let radial_error = (fine - closed).abs();
    PairingResult {
        value: fine,
        scale,
        normalized: fine / scale,
        error_estimate: angular_error + radial_error,
        angular_error,
        radial_error,
    }
}

fn check_error(id: &str, r: &PairingResult, max_error: f64) -> Result<()> {
    if r.error_estimate > max_error * r.scale {
        return Err(Error::num(format!(
            "{id}: pairing error estimate {:.3e} exceeds {:.1e} of the scale {:.3e}; raise the sphere level or refine the spectral grid",
            r.error_estimate, max_error, r.scale
        )));
    }
    Ok(())
}

/// `<(ln ||x||_K)^, phi> = int ln ||x||_K phi^(x) dx` with default options.
pub fn log_pairing(body: &StarBody, phi: &TestFunction) -> Result<PairingResult> {
    log_pairing_with(body, phi, &PairingOptions::default())
}

pub fn log_pairing_with(body: &StarBody, phi: &TestFunction, opts: &PairingOptions) -> Result<PairingResult> {
    if body.dim() != phi.n {
        return Err(Error::arg(format!("body dimension {} differs from test function dimension {}", body.dim(), phi.n)));
    }
    let deg = phi.max_degree();
    let radial = radial_transform(phi.n, &phi.radial, deg, &opts.grid)?;
    let samples = sphere_samples(body, opts.level)?;
    let moments: Vec<[Vec<f64>; 2]> = phi.terms.iter().map(|t| zonal_moments(&samples, phi.n, &t.axis, deg)).collect();
    let prepared = Prepared {
        phi,
        radial: &radial,
        coefficients: phi.terms.iter().map(|t| zonal_coefficients(phi.n, &t.profile, deg)).collect(),
        moments: moments.iter().collect(),
    };
    let r = evaluate(&prepared);
    check_error("test function", &r, opts.max_error)?;
    Ok(r)
}

/// Axes `v / |v|` for `v` in `{-1, 0, 1}^n` up to sign (13 for n = 3, 40 for
/// n = 4); in the plane, `planar` equally spaced directions in `[0, pi)`.
pub fn standard_axes(n: usize, planar: usize) -> Vec<Vec<f64>> {
    if n == 2 {
        return (0..planar)
            .map(|j| {
                let (s, c) = (PI * j as f64 / planar as f64).sin_cos();
                vec![c, s]
            })
            .collect();
    }
    let mut out = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 1..total {
        let mut c = code;
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let d = c % 3;
                c /= 3;
                d as f64 - 1.0
            })
            .collect();
        let first = v.iter().find(|x| **x != 0.0);
        if first != Some(&1.0) {
            continue;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(v.iter().map(|x| x / norm).collect());
    }
    out.sort_by(|a, b| {
        let nz = |v: &Vec<f64>| v.iter().filter(|x| **x != 0.0).count();
        nz(a).cmp(&nz(b)).then_with(|| b.partial_cmp(a).unwrap())
    });
    out
}

/// Test functions: dyadic annuli times zonal factors around the standard axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySpec {
    /// Annuli `[2^k, 2^{k+1}]`.
    pub annuli: Vec<i32>,
    /// Zonal powers `t^k` for even `k` up to this degree.
    pub max_power: usize,
    /// Squared zonal harmonics up to this degree.
    pub max_zonal_squared: usize,
    /// `1 + T_{2m}(t)` for `m` up to this.
    pub max_chebyshev: usize,
    /// Axes in the plane.
    pub planar_axes: usize,
    /// Refutation threshold on normalized pairings.
    pub tol: f64,
    pub pairing: PairingOptions,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            annuli: (-2..=2).collect(),
            max_power: 24,
            max_zonal_squared: 4,
            max_chebyshev: 4,
            planar_axes: 8,
            tol: 1e-6,
            pairing: PairingOptions::default(),
        }
    }
}

impl FamilySpec {
    fn profiles(&self, n: usize) -> Vec<ZonalProfile> {
        let mut p: Vec<ZonalProfile> = (1..=self.max_chebyshev).map(|m| ZonalProfile::OnePlusChebyshev { m }).collect();
        if n > 2 {
            p.extend((1..=self.max_zonal_squared).map(|d| ZonalProfile::ZonalSquared { d }));
        }
        p.extend((2..=self.max_power).step_by(2).map(|k| ZonalProfile::Power { k }));
        p
    }

    fn max_degree(&self, n: usize) -> usize {
        self.profiles(n).iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Number of test functions in dimension `n`.
    pub fn size(&self, n: usize) -> usize {
        let axes = standard_axes(n, self.planar_axes).len();
        self.annuli.len() * (1 + axes * self.profiles(n).len())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct L0Entry {
    pub id: String,
    pub annulus: i32,
    pub axis: Vec<f64>,
    pub profile: String,
    pub pairing: f64,
    pub scale: f64,
    pub normalized: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Refuted,
    Consistent,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Refuted => "refuted",
            Verdict::Consistent => "consistent",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct L0Report {
    pub body: String,
    pub n: usize,
    pub family: FamilySpec,
    pub functions: usize,
    pub axes: usize,
    pub max_degree: usize,
    pub entries: Vec<L0Entry>,
    pub max_normalized: f64,
    pub max_error_estimate: f64,
    /// Largest `|sampled - closed form| / |closed form|` over radial moments.
    pub radial_check: f64,
    pub tol: f64,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub note: String,
}

/// Pairs `ln ||x||_K` with every function of the family. Refuted iff some
/// normalized pairing exceeds `tol`; "consistent" does not prove an embedding.
pub fn l0_scan(body: &StarBody, family: &FamilySpec) -> Result<L0Report> {
    let n = body.dim();
    let size = family.size(n);
    if size < 20 {
        return Err(Error::arg(format!("the test-function family has {size} members; at least 20 are required")));
    }
    if family.annuli.is_empty() {
        return Err(Error::arg("family needs at least one annulus"));
    }
    let deg = family.max_degree(n);
    let opts = &family.pairing;
    let samples = sphere_samples(body, opts.level)?;
    let axes = standard_axes(n, family.planar_axes);
    let moments: Vec<[Vec<f64>; 2]> = axes.par_iter().map(|a| zonal_moments(&samples, n, a, deg)).collect();
    let profiles = family.profiles(n);
    let mut radial_check: f64 = 0.0;
    let mut entries = Vec::with_capacity(size);
    for &k in &family.annuli {
        let bump = Bump::dyadic(k);
        let radial = radial_transform(n, &bump, deg, &opts.grid)?;
        for l in (2..=deg).step_by(2) {
            let cf = closed_form_moment(n, &bump, l);
            radial_check = radial_check.max((radial.moment(l) - cf).abs() / cf.abs());
        }
        let cf = closed_form_log_moment(n, &bump);
        radial_check = radial_check.max((radial.log_moment - cf).abs() / cf.abs());
        let mut jobs: Vec<(usize, ZonalProfile)> = vec![(0, ZonalProfile::Constant)];
        for i in 0..axes.len() {
            jobs.extend(profiles.iter().map(|p| (i, *p)));
        }
        let results: Vec<Result<L0Entry>> = jobs
            .par_iter()
            .map(|(i, profile)| {
                let phi = TestFunction::zonal(bump, axes[*i].clone(), *profile)?;
                let id = format!("annulus={k};axis={i};psi={}", profile.tag());
                let prepared = Prepared {
                    phi: &phi,
                    radial: &radial,
                    coefficients: vec![zonal_coefficients(n, profile, deg)],
                    moments: vec![&moments[*i]],
                };
                let r = evaluate(&prepared);
                check_error(&id, &r, opts.max_error)?;
                Ok(L0Entry {
                    id,
                    annulus: k,
                    axis: axes[*i].clone(),
                    profile: profile.tag(),
                    pairing: r.value,
                    scale: r.scale,
                    normalized: r.normalized,
                    error_estimate: r.error_estimate / r.scale,
                })
            })
            .collect();
        for r in results {
            entries.push(r?);
        }
    }
    let best = entries
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, e)| match acc {
            Some((_, v)) if v >= e.normalized => acc,
            _ => Some((i, e.normalized)),
        })
        .expect("non-empty family");
    let verdict = if best.1 > family.tol { Verdict::Refuted } else { Verdict::Consistent };
    Ok(L0Report {
        body: body.spec(),
        n,
        family: family.clone(),
        functions: entries.len(),
        axes: axes.len(),
        max_degree: deg,
        max_normalized: best.1,
        max_error_estimate: entries.iter().map(|e| e.error_estimate).fold(0.0, f64::max),
        radial_check,
        tol: family.tol,
        witness: (verdict == Verdict::Refuted).then(|| entries[best.0].id.clone()),
        verdict,
        entries,
        note: "consistent means no family member refutes the criterion; it does not prove an embedding".into(),
    })
}
