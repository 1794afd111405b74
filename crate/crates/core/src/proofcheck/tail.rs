//! Probability laws with a known characteristic functional, and the
//! Gaussian-average tail bound `mu{|x|_2 > 1/t} <= 3 int (1 - mu^(t y)) dgamma(y)`.

use crate::error::{Error, Result};
use crate::numerics::quad::{integrate, QuadOptions};
use crate::numerics::special::gamma_q;
use crate::stable::sample_stable_vector;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

/// Largest accepted Monte-Carlo error bound on a tail probability.
pub const MAX_MC_ERROR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ProbabilityLaw {
    /// Standard Gaussian, `mu^(xi) = exp(-|xi|^2 / 2)`.
    Gaussian { n: usize },
    /// I.i.d. standard symmetric p-stable coordinates, `mu^(xi) = exp(-sum |xi_i|^p)`.
    Stable { p: f64, n: usize },
    /// Unit mass at the origin.
    Atom { n: usize },
}

impl ProbabilityLaw {
    pub fn gaussian(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(ProbabilityLaw::Gaussian { n })
    }

    pub fn stable(p: f64, n: usize) -> Result<Self> {
        check_dim(n)?;
        if !(p > 0.0 && p <= 2.0) {
            return Err(Error::arg(format!("stability index must lie in (0, 2], got {p}")));
        }
        Ok(ProbabilityLaw::Stable { p, n })
    }

    pub fn atom(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(ProbabilityLaw::Atom { n })
    }

    pub fn dim(&self) -> usize {
        match *self {
            ProbabilityLaw::Gaussian { n } | ProbabilityLaw::Stable { n, .. } | ProbabilityLaw::Atom { n } => n,
        }
    }

    pub fn char_functional(&self, xi: &[f64]) -> f64 {
        match *self {
            ProbabilityLaw::Gaussian { .. } => (-0.5 * xi.iter().map(|v| v * v).sum::<f64>()).exp(),
            ProbabilityLaw::Stable { p, .. } => (-xi.iter().map(|v| v.abs().powf(p)).sum::<f64>()).exp(),
            ProbabilityLaw::Atom { .. } => 1.0,
        }
    }

    /// `gaussian:n=<int>` | `stable:p=<float>,n=<int>` | `atom:n=<int>`.
    pub fn parse(tag: &str) -> Result<Self> {
        const GRAMMAR: &str = "gaussian:n=<int> | stable:p=<float>,n=<int> | atom:n=<int>";
        let (kind, rest) = tag
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::arg(format!("unknown law '{tag}'; expected {GRAMMAR}")))?;
        let mut p = None;
        let mut n = None;
        for kv in rest.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::arg(format!("malformed law '{tag}'; expected {GRAMMAR}")))?;
            let bad = || Error::arg(format!("'{kv}' is not a valid field in '{tag}'"));
            match k.trim() {
                "p" => p = Some(v.trim().parse::<f64>().map_err(|_| bad())?),
                "n" => n = Some(v.trim().parse::<usize>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let n = n.ok_or_else(|| Error::arg(format!("law '{tag}' lacks 'n'; expected {GRAMMAR}")))?;
        match kind.trim() {
            "gaussian" => ProbabilityLaw::gaussian(n),
            "atom" => ProbabilityLaw::atom(n),
            "stable" => ProbabilityLaw::stable(p.ok_or_else(|| Error::arg(format!("law '{tag}' lacks 'p'")))?, n),
            _ => Err(Error::arg(format!("unknown law '{kind}'; expected {GRAMMAR}"))),
        }
    }
}

impl fmt::Display for ProbabilityLaw {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbabilityLaw::Gaussian { n } => write!(fm, "gaussian:n={n}"),
            ProbabilityLaw::Stable { p, n } => write!(fm, "stable:p={p},n={n}"),
            ProbabilityLaw::Atom { n } => write!(fm, "atom:n={n}"),
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("law dimension must be >= 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    /// `mu{|x|_2 > 1/t}`.
    pub lhs: f64,
    /// `3 int (1 - mu^(t y)) dgamma(y)`, `gamma` the standard Gaussian.
    pub rhs: f64,
    /// Monte-Carlo bound on `lhs`, zero for closed forms.
    pub mc_error: f64,
    pub holds: bool,
}

/// `E exp(-t^p |Y|^p)` for a standard normal `Y`.
fn gaussian_stable_mean(p: f64, t: f64) -> Result<f64> {
    let c = (2.0 / PI).sqrt();
    let r = integrate(|y| c * (-(t * y).powf(p) - 0.5 * y * y).exp(), 0.0, f64::INFINITY, None, &QuadOptions::abs(1e-14))?;
    Ok(r.value)
}

/// One row per `t`. Stable laws estimate `lhs` from `mc_samples` draws with
/// the bound `4 sqrt(max(q(1-q), 1/m) / m)`.
pub fn gaussian_tail_check(law: &ProbabilityLaw, ts: &[f64], mc_samples: usize, seed: u64) -> Result<Vec<TailRow>> {
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::arg("t grid must be non-empty, finite and positive"));
    }
    let row = |t: f64, lhs: f64, rhs: f64, mc_error: f64| TailRow { t, lhs, rhs, mc_error, holds: lhs <= rhs + mc_error };
    match *law {
        ProbabilityLaw::Gaussian { n } => Ok(ts
            .iter()
            .map(|&t| {
                let h = 0.5 * n as f64;
                row(t, gamma_q(h, 0.5 / (t * t)), 3.0 * (1.0 - (1.0 + t * t).powf(-h)), 0.0)
            })
            .collect()),
        ProbabilityLaw::Atom { .. } => Ok(ts.iter().map(|&t| row(t, 0.0, 0.0, 0.0)).collect()),
        ProbabilityLaw::Stable { p, n } => {
            if mc_samples < 1000 {
                return Err(Error::arg(format!("tail check needs at least 1000 samples, got {mc_samples}")));
            }
            let norms: Vec<f64> = sample_stable_vector(p, n, mc_samples, seed)?
                .iter()
                .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
                .collect();
            let m = mc_samples as f64;
            ts.iter()
                .map(|&t| {
                    let q = norms.iter().filter(|r| **r * t > 1.0).count() as f64 / m;
                    let mc_error = 4.0 * ((q * (1.0 - q)).max(1.0 / m) / m).sqrt();
                    if mc_error > MAX_MC_ERROR {
                        return Err(Error::num(format!(
                            "Monte-Carlo error {mc_error:.3} at t = {t} exceeds {MAX_MC_ERROR}; use more samples"
                        )));
                    }
                    let mean = gaussian_stable_mean(p, t)?;
                    Ok(row(t, q, 3.0 * (1.0 - mean.powi(n as i32)), mc_error))
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;
    use proptest::prelude::*;

    #[test]
    fn gaussian_closed_forms() {
        let law = ProbabilityLaw::gaussian(2).unwrap();
        let r = gaussian_tail_check(&law, &[1.0], 0, 0).unwrap()[0];
        assert!((r.lhs - (-0.5f64).exp()).abs() <= 1e-14);
        assert!((r.rhs - 1.5).abs() <= 1e-14);
        assert!(r.holds);
    }

    #[test]
    fn gaussian_closed_forms_match_sampling() {
        let (n, m) = (3, 200_000);
        let mut rng = RngStream::new(5, 0);
        let xs: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.normal()).collect()).collect();
        let ys: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.normal()).collect()).collect();
        let law = ProbabilityLaw::gaussian(n).unwrap();
        let ts = [0.5, 1.0, 2.0];
        for r in gaussian_tail_check(&law, &ts, 0, 0).unwrap() {
            let lhs = xs.iter().filter(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt() * r.t > 1.0).count() as f64 / m as f64;
            let rhs = 3.0
                * ys.iter()
                    .map(|y| 1.0 - law.char_functional(&y.iter().map(|v| r.t * v).collect::<Vec<_>>()))
                    .sum::<f64>()
                / m as f64;
            assert!((lhs - r.lhs).abs() <= 4.0 * 0.5 / (m as f64).sqrt());
            assert!((rhs - r.rhs).abs() <= 4.0 * 3.0 / (m as f64).sqrt());
        }
    }

    #[test]
    fn atom_is_trivial() {
        let rows = gaussian_tail_check(&ProbabilityLaw::atom(2).unwrap(), &[0.5, 1.0], 0, 0).unwrap();
        assert!(rows.iter().all(|r| r.lhs == 0.0 && r.rhs == 0.0 && r.holds));
    }

    #[test]
    fn cauchy_inequality_holds() {
        let law = ProbabilityLaw::stable(1.0, 2).unwrap();
        let rows = gaussian_tail_check(&law, &[0.25, 0.5, 1.0, 2.0, 4.0], 50_000, 3).unwrap();
        assert!(rows.iter().all(|r| r.holds), "{rows:?}");
        assert!(rows.windows(2).all(|w| w[0].lhs <= w[1].lhs && w[0].rhs <= w[1].rhs));
    }

    #[test]
    fn stable_two_has_closed_form_rhs() {
        // coordinates sqrt(2) N(0, 1): E exp(-t^2 Y^2) = (1 + 2 t^2)^{-1/2}
        let law = ProbabilityLaw::stable(2.0, 2).unwrap();
        for r in gaussian_tail_check(&law, &[0.3, 1.0, 3.0], 20_000, 1).unwrap() {
            assert!((r.rhs - 3.0 * (1.0 - 1.0 / (1.0 + 2.0 * r.t * r.t))).abs() <= 1e-12);
            // |X|^2 / 2 is chi-square(2) / 2, so P(|X| > 1/t) = exp(-1 / (4 t^2))
            assert!((r.lhs - (-0.25 / (r.t * r.t)).exp()).abs() <= r.mc_error);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let law = ProbabilityLaw::stable(1.0, 2).unwrap();
        assert!(gaussian_tail_check(&law, &[1.0], 10, 0).is_err());
        assert!(gaussian_tail_check(&law, &[], 10_000, 0).is_err());
        assert!(gaussian_tail_check(&law, &[-1.0], 10_000, 0).is_err());
        assert!(matches!(gaussian_tail_check(&law, &[1.0], 1000, 0), Ok(_) | Err(Error::Numerical(_))));
        assert!(ProbabilityLaw::stable(2.5, 2).is_err());
        assert!(ProbabilityLaw::parse("stable:n=2").is_err());
        assert!(ProbabilityLaw::parse("poisson:n=2").is_err());
    }

    #[test]
    fn tags_round_trip() {
        for law in [ProbabilityLaw::gaussian(2).unwrap(), ProbabilityLaw::stable(1.5, 3).unwrap(), ProbabilityLaw::atom(1).unwrap()] {
            assert_eq!(ProbabilityLaw::parse(&law.to_string()).unwrap(), law);
        }
    }

    proptest! {
        #[test]
        fn char_functional_is_even_and_normalized(p in 0.1f64..2.0, x in prop::collection::vec(-5.0f64..5.0, 3)) {
            for law in [ProbabilityLaw::gaussian(3).unwrap(), ProbabilityLaw::stable(p, 3).unwrap(), ProbabilityLaw::atom(3).unwrap()] {
                prop_assert_eq!(law.char_functional(&[0.0; 3]), 1.0);
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                prop_assert_eq!(law.char_functional(&x), law.char_functional(&neg));
                prop_assert!((0.0..=1.0).contains(&law.char_functional(&x)));
            }
        }
    }
}
