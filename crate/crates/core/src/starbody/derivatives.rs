//! Finite-difference derivatives of gauges along a coordinate axis.
//!
//! Second derivatives use the 5-point central stencil at the steps
//! `h, h/2, h/4, h/8`, extrapolated under the error model `a h + c h^4`.
//! The linear term is what a `|s|^3` component (q-sums, Orlicz powers,
//! `l_3`) leaves in a symmetric stencil; the quartic term is the smooth
//! truncation error.

use super::{sphere_directions, StarBody};
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeEstimate {
    pub value: f64,
    pub error: f64,
}

fn stencil2(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

fn stencil1(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Eliminates `a h + c h^4` from stencil values at `h, h/2, h/4`.
fn extrapolate(d1: f64, d2: f64, d3: f64) -> f64 {
    let p1 = 2.0 * d2 - d1;
    let p2 = 2.0 * d3 - d2;
    (16.0 * p2 - p1) / 15.0
}

/// `f''(x)` with an error estimate.
pub fn second_derivative_1d(f: impl Fn(f64) -> f64, x: f64, h: f64) -> DerivativeEstimate {
    let f: &dyn Fn(f64) -> f64 = &f;
    let d: Vec<f64> = (0..4).map(|k| stencil2(f, x, h / (1 << k) as f64)).collect();
    let coarse = extrapolate(d[0], d[1], d[2]);
    let fine = extrapolate(d[1], d[2], d[3]);
    let h8 = h / 8.0;
    let roundoff = 40.0 * f64::EPSILON * f(x).abs() / (h8 * h8);
    DerivativeEstimate { value: fine, error: (fine - coarse).abs() + roundoff }
}

/// `f'(x)` by Richardson extrapolation of the 4-point central stencil.
pub fn first_derivative_1d(f: impl Fn(f64) -> f64, x: f64, h: f64) -> DerivativeEstimate {
    let f: &dyn Fn(f64) -> f64 = &f;
    let a = stencil1(f, x, h);
    let b = stencil1(f, x, 0.5 * h);
    let value = (16.0 * b - a) / 15.0;
    let roundoff = 4.0 * f64::EPSILON * f(x).abs() / h;
    DerivativeEstimate { value, error: (value - b).abs() + roundoff }
}

fn along_axis<'a>(body: &'a StarBody, axis: usize, base: &[f64]) -> impl Fn(f64) -> f64 + 'a {
    let base = base.to_vec();
    move |s: f64| {
        let mut p = base.clone();
        p[axis] = s;
        body.gauge(&p)
    }
}

fn require_smooth(body: &StarBody) -> Result<()> {
    if body.is_smooth() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "second derivatives of the non-smooth body {body} are not defined"
        )))
    }
}

/// `d^2/dx_1^2 ||x_1 e_1 + sum_{i>=2} x_i e_i||` at `x_1`.
pub fn second_derivative_x1(body: &StarBody, x1: f64, xrest: &[f64], h: f64) -> Result<DerivativeEstimate> {
    require_smooth(body)?;
    if xrest.len() + 1 != body.dim() {
        return Err(Error::arg(format!(
            "xrest has {} coordinates, expected {}",
            xrest.len(),
            body.dim() - 1
        )));
    }
    if xrest.iter().all(|v| *v == 0.0) {
        return Err(Error::arg("xrest must be non-zero"));
    }
    if !(h > 0.0) {
        return Err(Error::arg("step h must be positive"));
    }
    let mut base = vec![0.0];
    base.extend_from_slice(xrest);
    Ok(second_derivative_1d(along_axis(body, 0, &base), x1, h))
}

/// Sampling parameters for the derivative-condition scan.
#[derive(Debug, Clone, Serialize)]
pub struct Prop3Grid {
    /// Coordinate playing the role of `x_1`.
    pub axis: usize,
    /// Directions sampled on the section sphere `||x_rest|| = 1`.
    pub sphere_samples: usize,
    /// Positive `x_1` values for the profile, in decreasing order.
    pub x1_values: Vec<f64>,
    /// Largest finite-difference step.
    pub h: f64,
}

impl Default for Prop3Grid {
    fn default() -> Self {
        Prop3Grid {
            axis: 0,
            sphere_samples: 200,
            x1_values: (0..=10).map(|k| 2f64.powi(-k)).collect(),
            h: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop3Report {
    pub body: String,
    pub grid: Prop3Grid,
    /// Max over the section sphere of `|f'(0)| + |f''(0)|`.
    pub cond1_max_violation: f64,
    /// Max of `f''` over the `x_1` grid (both signs, plus 0 and a few large
    /// values) and the section sphere.
    pub cond2_c: f64,
    /// `(x_1, sup over the section sphere of |f''(x_1)|)` for decreasing `x_1`.
    pub cond3_profile: Vec<(f64, f64)>,
    /// Whether the profile decays toward 0 on the sampled grid. A sampled
    /// trend only; uniform convergence is not established by a finite grid.
    pub cond3_plausible: bool,
    /// Largest finite-difference error estimate encountered.
    pub max_error_estimate: f64,
}

/// Samples the three derivative conditions on a grid.
pub fn prop3_conditions_scan(body: &StarBody, grid: &Prop3Grid) -> Result<Prop3Report> {
    require_smooth(body)?;
    let n = body.dim();
    if n < 4 {
        return Err(Error::arg(format!("the derivative conditions need n >= 4, got {n}")));
    }
    if grid.axis >= n {
        return Err(Error::arg(format!("axis {} out of range for n = {n}", grid.axis)));
    }
    if grid.x1_values.iter().any(|x| !(*x > 0.0)) || !(grid.h > 0.0) {
        return Err(Error::arg("x1 grid values and the step must be positive"));
    }
    let mut sections = Vec::new();
    for d in sphere_directions(n - 1, grid.sphere_samples) {
        let mut p = Vec::with_capacity(n);
        let mut it = d.iter();
        for i in 0..n {
            p.push(if i == grid.axis { 0.0 } else { *it.next().unwrap() });
        }
        let g = body.minkowski(&p)?;
        sections.push(p.iter().map(|v| v / g).collect::<Vec<f64>>());
    }
    // keep the stencil on one side of x1 = 0 away from the origin of the scan
    let step = |x1: f64| if x1 == 0.0 { grid.h } else { grid.h.min(0.25 * x1.abs()) };
    let mut max_err: f64 = 0.0;
    let mut cond1: f64 = 0.0;
    let mut cond2 = f64::NEG_INFINITY;
    for p in &sections {
        let f = along_axis(body, grid.axis, p);
        let d1 = first_derivative_1d(&f, 0.0, grid.h);
        let d2 = second_derivative_1d(&f, 0.0, grid.h);
        max_err = max_err.max(d1.error).max(d2.error);
        cond1 = cond1.max(d1.value.abs() + d2.value.abs());
        cond2 = cond2.max(d2.value);
    }
    let mut profile = Vec::with_capacity(grid.x1_values.len());
    let mut extra: Vec<f64> = grid.x1_values.clone();
    extra.extend([2.0, 4.0, 8.0]);
    for (i, &x1) in extra.iter().enumerate() {
        let mut sup: f64 = 0.0;
        for p in &sections {
            let f = along_axis(body, grid.axis, p);
            for s in [x1, -x1] {
                let d2 = second_derivative_1d(&f, s, step(s));
                max_err = max_err.max(d2.error);
                cond2 = cond2.max(d2.value);
                sup = sup.max(d2.value.abs());
            }
        }
        if i < grid.x1_values.len() {
            profile.push((x1, sup));
        }
    }
    let peak = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    let last = profile.last().map(|p| p.1).unwrap_or(f64::INFINITY);
    let tail_decreasing = profile
        .windows(2)
        .rev()
        .take(4)
        .all(|w| w[1].1 <= w[0].1 + 10.0 * max_err.max(1e-12));
    let cond3_plausible = tail_decreasing && last <= 1e-2 * peak.max(1.0);
    Ok(Prop3Report {
        body: body.spec(),
        grid: grid.clone(),
        cond1_max_violation: cond1,
        cond2_c: cond2,
        cond3_profile: profile,
        cond3_plausible,
        max_error_estimate: max_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn euclidean_second_derivative() {
        // d^2/ds^2 sqrt(s^2 + r^2) at 0 is 1/r
        let body = StarBody::euclidean(4).unwrap();
        let d = second_derivative_x1(&body, 0.0, &[1.0, 0.0, 0.0], 1e-2).unwrap();
        assert!((d.value - 1.0).abs() < 1e-8, "{d:?}");
        let d = second_derivative_x1(&body, 0.0, &[0.0, 2.0, 0.0], 1e-2).unwrap();
        assert!((d.value - 0.5).abs() < 1e-8);
        assert!(d.error < 1e-6);
    }

    #[test]
    fn lq_second_derivative_vanishes() {
        let l4 = StarBody::lq(4, 4.0).unwrap();
        let d = second_derivative_x1(&l4, 0.0, &[1.0, 0.0, 0.0], 1e-2).unwrap();
        assert!(d.value.abs() < 1e-6, "{d:?}");
        let l3 = StarBody::lq(4, 3.0).unwrap();
        let d = second_derivative_x1(&l3, 0.0, &[1.0, 0.0, 0.0], 1e-2).unwrap();
        assert!(d.value.abs() < 1e-5, "{d:?}");
    }

    #[test]
    fn away_from_zero_matches_calculus() {
        // l3: f(s) = (s^3 + 1)^(1/3), f'' = 2 s (1 + s^3)^(-5/3) for s > 0
        let l3 = StarBody::lq(4, 3.0).unwrap();
        let s: f64 = 0.3;
        let d = second_derivative_x1(&l3, s, &[1.0, 0.0, 0.0], 0.05).unwrap();
        let want = 2.0 * s * (1.0 + s.powi(3)).powf(-5.0 / 3.0);
        assert!((d.value - want).abs() < 1e-8, "{} vs {want}", d.value);
    }

    #[test]
    fn non_smooth_bodies_are_unsupported() {
        for b in [StarBody::lq(4, 1.0).unwrap(), StarBody::linf(4).unwrap()] {
            assert!(matches!(
                second_derivative_x1(&b, 0.0, &[1.0, 0.0, 0.0], 1e-2),
                Err(Error::Unsupported(_))
            ));
            assert!(matches!(prop3_conditions_scan(&b, &Prop3Grid::default()), Err(Error::Unsupported(_))));
        }
    }

    #[test]
    fn scan_l4() {
        let r = prop3_conditions_scan(&StarBody::lq(4, 4.0).unwrap(), &Prop3Grid::default()).unwrap();
        assert!(r.cond1_max_violation < 1e-6, "{}", r.cond1_max_violation);
        assert!(r.cond3_plausible);
        assert!(r.cond3_profile.last().unwrap().1 < 1e-4);
        assert!(r.cond2_c.is_finite() && r.cond2_c > 0.0);
    }

    #[test]
    fn scan_euclidean_fails_condition_one() {
        let r = prop3_conditions_scan(&StarBody::euclidean(4).unwrap(), &Prop3Grid::default()).unwrap();
        assert!((r.cond1_max_violation - 1.0).abs() < 1e-6, "{}", r.cond1_max_violation);
        assert!(!r.cond3_plausible);
    }

    #[test]
    fn scan_qsum() {
        let body = StarBody::qsum(StarBody::euclidean(3).unwrap(), StarBody::euclidean(1).unwrap(), 3.0)
            .unwrap();
        let grid = Prop3Grid { axis: 3, ..Prop3Grid::default() };
        let r = prop3_conditions_scan(&body, &grid).unwrap();
        assert!(r.cond1_max_violation < 1e-5, "{}", r.cond1_max_violation);
        assert!(r.cond3_plausible);
    }

    #[test]
    fn scan_needs_dimension_four() {
        assert!(matches!(
            prop3_conditions_scan(&StarBody::lq(3, 4.0).unwrap(), &Prop3Grid::default()),
            Err(Error::Argument(_))
        ));
    }
}
