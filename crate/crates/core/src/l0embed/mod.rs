//! The Fourier-analytic L0 criterion: a space embeds in L0 only if
//! `(ln ||x||)^` is non-positive off the origin, i.e. `<ln||x||, phi^> <= 0`
//! for every even non-negative test function `phi` vanishing near 0.
//!
//! Test functions are `phi(x) = rho(|x|) psi(x/|x|)` with a bump `rho` on an
//! annulus and a zonal angular factor `psi(eta) = p(<a, eta>)`. Writing
//! `psi = sum_l psi_l` in spherical harmonics,
//!
//! `phi^(s eta) = sum_l H_l(s) psi_l(eta)`,
//! `H_l(s) = (2 pi)^{n/2} (-1)^{l/2} s^{-nu} int rho(r) J_{l+nu}(rs) r^{n/2} dr`,
//!
//! and the pairing splits into `|S| psibar int ln(s) H_0 s^{n-1} ds` (the
//! `ln|x|_2` part) plus `sum_l int H_l s^{n-1} ds * int g psi_l` with
//! `g = ln ||eta||_K`.

mod pairing;
mod recover;
mod spectral;

pub use pairing::{
    l0_scan, log_pairing, log_pairing_with, standard_axes, FamilySpec, L0Entry, L0Report,
    PairingOptions, PairingResult, Verdict,
};
pub use recover::{
    recover_measure_2d, recover_measure_2d_with, verify_representation, RecoveryOptions,
    RepresentationCheck, RepresentingMeasure2D,
};
pub use spectral::{
    closed_form_log_moment, closed_form_moment, fourier_of_test_function, radial_transform, GridSpec,
    RadialTransform, SpectralTransform,
};

use crate::error::{Error, Result};
use crate::numerics::gauss::{gauss_jacobi, gauss_legendre};
use crate::numerics::special::sphere_area;
use serde::Serialize;

/// Panels and nodes of the fixed radial rule on the bump's support.
const BUMP_PANELS: usize = 16;
const BUMP_NODES: usize = 16;

/// `exp(-1/((r-r0)(r1-r)))` on `(r0, r1)`, zero elsewhere, scaled to peak 1.
pub fn bump_radial(r0: f64, r1: f64, r: f64) -> Result<f64> {
    Bump::new(r0, r1)?;
    if r <= r0 || r >= r1 {
        return Ok(0.0);
    }
    let w = r1 - r0;
    Ok((4.0 / (w * w) - 1.0 / ((r - r0) * (r1 - r))).exp())
}

/// Radial profile `r -> bump_radial(1, q, r / r0)`, `q = r1 / r0`: annuli of
/// equal ratio carry dilates of one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub r0: f64,
    pub r1: f64,
}

impl Bump {
    pub fn new(r0: f64, r1: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 < r1 && r1.is_finite()) {
            return Err(Error::arg(format!("bump needs 0 < r0 < r1, got [{r0}, {r1}]")));
        }
        Ok(Bump { r0, r1 })
    }

    /// The dyadic annulus `[2^k, 2^{k+1}]`.
    pub fn dyadic(k: i32) -> Self {
        Bump { r0: 2f64.powi(k), r1: 2f64.powi(k + 1) }
    }

    pub fn ratio(&self) -> f64 {
        self.r1 / self.r0
    }

    /// The dilate supported in `[1, q]`.
    pub fn reference(&self) -> Bump {
        Bump { r0: 1.0, r1: self.ratio() }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let q = self.ratio();
        let u = r / self.r0;
        if u <= 1.0 || u >= q {
            return 0.0;
        }
        let w = q - 1.0;
        (4.0 / (w * w) - 1.0 / ((u - 1.0) * (q - u))).exp()
    }

    /// Composite Gauss-Legendre rule on `[r0, r1]` with `panels` panels.
    pub(crate) fn rule(&self, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let g = gauss_legendre(BUMP_NODES);
        let h = (self.r1 - self.r0) / panels as f64;
        let mut xs = Vec::with_capacity(panels * BUMP_NODES);
        let mut ws = Vec::with_capacity(panels * BUMP_NODES);
        for p in 0..panels {
            let c = self.r0 + (p as f64 + 0.5) * h;
            for (x, w) in g.nodes.iter().zip(&g.weights) {
                xs.push(c + 0.5 * h * x);
                ws.push(0.5 * h * w);
            }
        }
        (xs, ws)
    }

    /// Panels resolving the edge layers of the profile.
    pub(crate) fn base_panels(&self) -> usize {
        let w = self.ratio() - 1.0;
        BUMP_PANELS * (w * w).ceil().max(1.0) as usize
    }

    /// `int rho(r) r^e dr`.
    pub fn moment(&self, e: f64) -> f64 {
        let (xs, ws) = self.rule(self.base_panels());
        xs.iter().zip(&ws).map(|(r, w)| w * self.eval(*r) * r.powf(e)).sum()
    }
}

/// Zonal polynomial profile `p(t)`, `t = <a, eta>`; every profile is even and
/// non-negative on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ZonalProfile {
    Constant,
    /// `1 + T_{2m}(t)`, i.e. `1 + cos(2m theta)` in the plane.
    OnePlusChebyshev { m: usize },
    /// Square of the degree-`d` zonal harmonic.
    ZonalSquared { d: usize },
    /// `t^k`, `k` even.
    Power { k: usize },
}

impl ZonalProfile {
    pub fn degree(&self) -> usize {
        match self {
            ZonalProfile::Constant => 0,
            ZonalProfile::OnePlusChebyshev { m } => 2 * m,
            ZonalProfile::ZonalSquared { d } => 2 * d,
            ZonalProfile::Power { k } => *k,
        }
    }

    pub fn eval(&self, n: usize, t: f64) -> f64 {
        match self {
            ZonalProfile::Constant => 1.0,
            ZonalProfile::OnePlusChebyshev { m } => 1.0 + zonal_values(2, 2 * m, t)[2 * m],
            ZonalProfile::ZonalSquared { d } => zonal_values(n, *d, t)[*d].powi(2),
            ZonalProfile::Power { k } => t.powi(*k as i32),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            ZonalProfile::Constant => "const".into(),
            ZonalProfile::OnePlusChebyshev { m } => format!("1+cheb:{}", 2 * m),
            ZonalProfile::ZonalSquared { d } => format!("zonal_sq:{d}"),
            ZonalProfile::Power { k } => format!("pow:{k}"),
        }
    }

    fn validate(&self) -> Result<()> {
        if let ZonalProfile::Power { k } = self {
            if k % 2 == 1 {
                return Err(Error::arg(format!("power profile needs an even exponent, got {k}")));
            }
        }
        Ok(())
    }
}

/// Gegenbauer index `lambda = (n-2)/2`.
pub(crate) fn lambda(n: usize) -> f64 {
    0.5 * (n as f64 - 2.0)
}

/// Zonal harmonics `Z_0..=Z_deg` at `t`: Chebyshev `T_l` for n = 2,
/// Gegenbauer `C_l^lambda` otherwise.
pub(crate) fn zonal_values(n: usize, deg: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; deg + 1];
    fill_zonal(n, t, &mut out);
    out
}

pub(crate) fn fill_zonal(n: usize, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    let lam = lambda(n);
    if n == 2 {
        out[1] = t;
        for l in 1..out.len() - 1 {
            out[l + 1] = 2.0 * t * out[l] - out[l - 1];
        }
    } else {
        out[1] = 2.0 * lam * t;
        for l in 1..out.len() - 1 {
            let lf = l as f64;
            out[l + 1] = (2.0 * t * (lf + lam) * out[l] - (lf + 2.0 * lam - 1.0) * out[l - 1]) / (lf + 1.0);
        }
    }
}

/// Projection coefficients `alpha_l`, `l = 0..=deg`, with
/// `p(<a, eta>) = sum_l alpha_l Z_l(<a, eta>)` on S^{n-1}.
pub(crate) fn zonal_coefficients(n: usize, profile: &ZonalProfile, deg: usize) -> Vec<f64> {
    let e = lambda(n) - 0.5;
    let rule = gauss_jacobi(deg + 8, e, e);
    let mut num = vec![0.0; deg + 1];
    let mut den = vec![0.0; deg + 1];
    let mut z = vec![0.0; deg + 1];
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        fill_zonal(n, *t, &mut z);
        let p = profile.eval(n, *t);
        for l in 0..=deg {
            num[l] += w * p * z[l];
            den[l] += w * z[l] * z[l];
        }
    }
    num.iter().zip(&den).map(|(a, b)| a / b).collect()
}

/// `weight * p(<axis, eta>)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularTerm {
    pub weight: f64,
    pub axis: Vec<f64>,
    pub profile: ZonalProfile,
}

/// `phi(x) = rho(|x|) sum_j w_j p_j(<a_j, x/|x|>)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    pub n: usize,
    pub radial: Bump,
    pub terms: Vec<AngularTerm>,
}

impl TestFunction {
    pub fn new(n: usize, radial: Bump, terms: Vec<AngularTerm>) -> Result<Self> {
        if n < 2 {
            return Err(Error::arg(format!("test functions need n >= 2, got {n}")));
        }
        if terms.is_empty() || terms.iter().all(|t| t.weight == 0.0) {
            return Err(Error::arg("test function needs a positive angular weight"));
        }
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            t.profile.validate()?;
            if !(t.weight >= 0.0 && t.weight.is_finite()) {
                return Err(Error::arg("angular weights must be non-negative"));
            }
            if t.axis.len() != n {
                return Err(Error::arg(format!("axis has {} coordinates, expected {n}", t.axis.len())));
            }
            let norm = t.axis.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::arg("axis must be a non-zero vector"));
            }
            out.push(AngularTerm { axis: t.axis.iter().map(|v| v / norm).collect(), ..t });
        }
        Ok(TestFunction { n, radial, terms: out })
    }

    /// Single zonal term with unit weight.
    pub fn zonal(radial: Bump, axis: Vec<f64>, profile: ZonalProfile) -> Result<Self> {
        let n = axis.len();
        TestFunction::new(n, radial, vec![AngularTerm { weight: 1.0, axis, profile }])
    }

    /// `a phi + b other` for test functions on the same annulus.
    pub fn combine(&self, a: f64, other: &TestFunction, b: f64) -> Result<Self> {
        if self.n != other.n || self.radial != other.radial {
            return Err(Error::arg("combined test functions must share dimension and radial profile"));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| (t, a))
            .chain(other.terms.iter().map(|t| (t, b)))
            .map(|(t, c)| AngularTerm { weight: c * t.weight, ..t.clone() })
            .collect();
        TestFunction::new(self.n, self.radial, terms)
    }

    pub fn angular(&self, eta: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let c: f64 = t.axis.iter().zip(eta).map(|(a, e)| a * e).sum();
                t.weight * t.profile.eval(self.n, c.clamp(-1.0, 1.0))
            })
            .sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rho = self.radial.eval(r);
        if rho == 0.0 {
            return 0.0;
        }
        let eta: Vec<f64> = x.iter().map(|v| v / r).collect();
        rho * self.angular(&eta)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.profile.degree()).max().unwrap_or(0)
    }

    /// Mean of the angular factor over the sphere.
    pub fn angular_mean(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * zonal_coefficients(self.n, &t.profile, t.profile.degree())[0])
            .sum()
    }

    /// `int phi dx`.
    pub fn integral(&self) -> f64 {
        sphere_area(self.n) * self.angular_mean() * self.radial.moment(self.n as f64 - 1.0)
    }
}
