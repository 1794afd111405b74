//! Positive definiteness of `f(||x||_K)`: Gram matrices, Schoenberg's kernel
//! `Omega_n`, and a randomized refutation search.

mod refute;

pub use refute::{
    pd_check, refute_positive_definiteness, verify_witness, GramWitness, PdCheckReport,
    RefuteOptions, RefuteOutcome, WitnessCheck,
};

use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_j;
use crate::numerics::eigen::{sym_eigen_min, Matrix};
use crate::numerics::special::gamma;
use crate::starbody::StarBody;
use std::fmt;

/// Landau's uniform bound `|J_nu(x)| <= b x^(-1/3)` for `nu >= 0`.
const LANDAU_B: f64 = 0.785_8;

/// Even continuous `f` with `f(0) = 1` from the supported catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum NormFunction {
    /// `exp(-|t|^p)`, `0 < p <= 2`.
    ExpPow { p: f64 },
    /// Schoenberg's kernel `Omega_n`.
    Omega { n: usize },
    /// `sum_k w_k Omega_n(r_k t)`.
    Mixture { n: usize, atoms: Vec<(f64, f64)> },
    /// `f = 1`.
    Constant,
}

impl NormFunction {
    pub fn exp_pow(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 2.0) {
            return Err(Error::arg(format!("exp_pow exponent must lie in (0, 2], got {p}")));
        }
        Ok(NormFunction::ExpPow { p })
    }

    pub fn omega(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::arg(format!("omega needs n >= 2, got {n}")));
        }
        Ok(NormFunction::Omega { n })
    }

    pub fn mixture(n: usize, atoms: Vec<(f64, f64)>) -> Result<Self> {
        check_atoms(n, &atoms)?;
        Ok(NormFunction::Mixture { n, atoms })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self {
            NormFunction::ExpPow { p } => {
                if *p == 2.0 {
                    (-t * t).exp()
                } else if *p == 1.0 {
                    (-t).exp()
                } else {
                    (-t.powf(*p)).exp()
                }
            }
            NormFunction::Omega { n } => omega(*n, t),
            NormFunction::Mixture { n, atoms } => atoms.iter().map(|(r, w)| w * omega(*n, r * t)).sum(),
            NormFunction::Constant => 1.0,
        }
    }

    /// `lim_{t -> inf} f(t)`.
    pub fn limit_at_infinity(&self) -> f64 {
        match self {
            NormFunction::ExpPow { .. } | NormFunction::Omega { .. } => 0.0,
            NormFunction::Mixture { atoms, .. } => {
                atoms.iter().filter(|(r, _)| *r == 0.0).map(|(_, w)| w).sum()
            }
            NormFunction::Constant => 1.0,
        }
    }

    /// An upper bound for `sup_{t >= T} |f(t) - f(inf)|`, non-increasing in `T`.
    pub fn tail_envelope(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            NormFunction::ExpPow { p } => (-t.powf(*p)).exp(),
            NormFunction::Omega { n } => omega_envelope(*n, t),
            NormFunction::Mixture { n, atoms } => atoms
                .iter()
                .filter(|(r, _)| *r > 0.0)
                .map(|(r, w)| w * omega_envelope(*n, r * t))
                .sum(),
            NormFunction::Constant => 0.0,
        }
    }

    /// Catalog tag, e.g. `exp_pow:p=2`.
    pub fn tag(&self) -> String {
        self.to_string()
    }

    /// Parses a catalog tag:
    /// `exp_pow:p=<float>` | `omega:n=<int>` | `mixture:n=<int>,atoms=<r>:<w>;...` | `constant`.
    pub fn parse(tag: &str) -> Result<Self> {
        const GRAMMAR: &str =
            "exp_pow:p=<float> | omega:n=<int> | mixture:n=<int>,atoms=<r>:<w>;... | constant";
        let tag = tag.trim();
        if tag == "constant" {
            return Ok(NormFunction::Constant);
        }
        let (kind, rest) = tag
            .split_once(':')
            .ok_or_else(|| Error::arg(format!("unknown function tag '{tag}'; expected {GRAMMAR}")))?;
        let fields: Vec<(&str, &str)> = rest
            .split(',')
            .map(|kv| kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::arg(format!("malformed function tag '{tag}'; expected {GRAMMAR}")))?;
        let get = |key: &str| {
            fields
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::arg(format!("function tag '{tag}' lacks '{key}'; expected {GRAMMAR}")))
        };
        let num = |key: &str| -> Result<f64> {
            let v = get(key)?;
            v.parse().map_err(|_| Error::arg(format!("'{key}={v}' is not a number in '{tag}'")))
        };
        match kind {
            "exp_pow" => NormFunction::exp_pow(num("p")?),
            "omega" => NormFunction::omega(num("n")? as usize),
            "mixture" => {
                let n = num("n")? as usize;
                let atoms = get("atoms")?
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(|a| {
                        let (r, w) = a
                            .split_once(':')
                            .ok_or_else(|| Error::arg(format!("atom '{a}' must be <r>:<w>")))?;
                        let r = r.trim().parse().map_err(|_| Error::arg(format!("bad atom radius '{r}'")))?;
                        let w = w.trim().parse().map_err(|_| Error::arg(format!("bad atom weight '{w}'")))?;
                        Ok((r, w))
                    })
                    .collect::<Result<Vec<_>>>()?;
                NormFunction::mixture(n, atoms)
            }
            _ => Err(Error::arg(format!("unknown function kind '{kind}'; expected {GRAMMAR}"))),
        }
    }
}

impl fmt::Display for NormFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormFunction::ExpPow { p } => write!(f, "exp_pow:p={p}"),
            NormFunction::Omega { n } => write!(f, "omega:n={n}"),
            NormFunction::Mixture { n, atoms } => {
                let a: Vec<String> = atoms.iter().map(|(r, w)| format!("{r}:{w}")).collect();
                write!(f, "mixture:n={n},atoms={}", a.join(";"))
            }
            NormFunction::Constant => write!(f, "constant"),
        }
    }
}

fn check_atoms(n: usize, atoms: &[(f64, f64)]) -> Result<()> {
    if n < 2 {
        return Err(Error::arg(format!("mixture needs n >= 2, got {n}")));
    }
    if atoms.is_empty() {
        return Err(Error::arg("mixture needs at least one atom"));
    }
    if atoms.iter().any(|(r, w)| !(*r >= 0.0 && r.is_finite()) || !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::arg("mixture atoms need r >= 0 and non-negative weights"));
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::arg(format!("mixture weights must sum to 1, got {total}")));
    }
    Ok(())
}

/// `Omega_n(r) = Gamma(n/2) (2/r)^nu J_nu(r)`, `nu = (n-2)/2`: the Fourier
/// transform of the uniform probability measure on S^{n-1} at radius `r`.
pub fn omega(n: usize, r: f64) -> f64 {
    assert!(n >= 2, "omega needs n >= 2");
    let r = r.abs();
    if r == 0.0 {
        return 1.0;
    }
    let nu = 0.5 * (n as f64 - 2.0);
    if r < 2.0 {
        // sum_k (-1)^k (r/2)^{2k} Gamma(n/2) / (k! Gamma(k + n/2))
        let q = 0.25 * r * r;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -q / (k * (k + nu));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    if n == 3 {
        return r.sin() / r;
    }
    gamma(nu + 1.0) * (2.0 / r).powf(nu) * bessel_j(nu, r)
}

fn omega_envelope(n: usize, t: f64) -> f64 {
    if t <= 1.0 {
        return 1.0;
    }
    let nu = 0.5 * (n as f64 - 2.0);
    (gamma(nu + 1.0) * (2.0 / t).powf(nu) * LANDAU_B * t.powf(-1.0 / 3.0)).min(1.0)
}

/// `sum_k w_k Omega_n(t r_k)`, a member of Phi(l_2^n).
pub fn schoenberg_mixture(n: usize, atoms: &[(f64, f64)], t: f64) -> Result<f64> {
    check_atoms(n, atoms)?;
    Ok(atoms.iter().map(|(r, w)| w * omega(n, t * r)).sum())
}

fn check_points(body: &StarBody, points: &[Vec<f64>]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::arg("need at least one point"));
    }
    for p in points {
        if p.len() != body.dim() {
            return Err(Error::arg(format!(
                "point has {} coordinates, body dimension is {}",
                p.len(),
                body.dim()
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("point coordinates must be finite"));
        }
    }
    Ok(())
}

/// Gram matrix `f(||x_i - x_j||_K)`, exactly symmetric.
pub fn gram_matrix(f: &NormFunction, body: &StarBody, points: &[Vec<f64>]) -> Result<Matrix> {
    check_points(body, points)?;
    Ok(gram_unchecked(f, body, points))
}

pub(crate) fn gram_unchecked(f: &NormFunction, body: &StarBody, points: &[Vec<f64>]) -> Matrix {
    let m = points.len();
    let mut g = Matrix::zeros(m);
    let f0 = f.eval(0.0);
    let mut diff = vec![0.0; body.dim()];
    for i in 0..m {
        g[(i, i)] = f0;
        for j in (i + 1)..m {
            for (d, (a, b)) in diff.iter_mut().zip(points[i].iter().zip(&points[j])) {
                *d = a - b;
            }
            let v = f.eval(body.gauge(&diff));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Smallest eigenvalue of the Gram matrix.
pub fn min_gram_eigenvalue(f: &NormFunction, body: &StarBody, points: &[Vec<f64>]) -> Result<f64> {
    Ok(sym_eigen_min(&gram_matrix(f, body, points)?)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;
    use crate::numerics::sphere::integrate_sphere;
    use std::f64::consts::PI;

    #[test]
    fn omega_values() {
        for n in 2..=6 {
            assert_eq!(omega(n, 0.0), 1.0);
        }
        for r in [0.1, 1.0, 1.9, 2.0, 5.0, 17.0] {
            assert!((omega(3, r) - r.sin() / r).abs() < 1e-14);
        }
        assert!(omega(3, PI).abs() < 1e-15);
        assert!(omega(2, 2.404826).abs() < 1e-5);
    }

    #[test]
    fn omega_matches_sphere_quadrature() {
        for n in 2..=4 {
            for i in 0..=40 {
                let r = 0.5 * i as f64;
                let oracle = integrate_sphere(n, |t| (r * t[0]).cos(), 3).unwrap();
                assert!(oracle.error_estimate <= 1e-7, "n={n} r={r} {}", oracle.error_estimate);
                assert!((omega(n, r) - oracle.value).abs() <= 1e-6, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn envelope_bounds_omega() {
        for n in 2..=5 {
            let f = NormFunction::omega(n).unwrap();
            for i in 1..2000 {
                let t = 0.05 * i as f64;
                assert!(f.eval(t).abs() <= f.tail_envelope(t) + 1e-15, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn tags_round_trip() {
        for tag in ["exp_pow:p=2", "exp_pow:p=0.5", "omega:n=3", "mixture:n=3,atoms=0:0.5;1:0.5", "constant"] {
            let f = NormFunction::parse(tag).unwrap();
            assert_eq!(f.tag(), tag);
        }
        assert!(NormFunction::parse("exp_pow:p=3").is_err());
        assert!(NormFunction::parse("gauss").is_err());
        assert!(NormFunction::parse("mixture:n=3,atoms=1:-1").is_err());
    }

    #[test]
    fn norm_function_invariants() {
        let fs = [
            NormFunction::exp_pow(0.5).unwrap(),
            NormFunction::exp_pow(2.0).unwrap(),
            NormFunction::omega(3).unwrap(),
            NormFunction::mixture(4, vec![(0.0, 0.2), (1.5, 0.8)]).unwrap(),
            NormFunction::Constant,
        ];
        for f in &fs {
            assert_eq!(f.eval(0.0), 1.0);
            for i in 0..500 {
                let t = 0.1 * i as f64;
                assert_eq!(f.eval(t), f.eval(-t));
                assert!(f.eval(t).abs() <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn mixture_examples() {
        let atoms = [(1.0, 1.0)];
        assert_eq!(schoenberg_mixture(3, &atoms, 2.0).unwrap(), omega(3, 2.0));
        let atoms = [(0.0, 0.5), (1.0, 0.5)];
        let v = schoenberg_mixture(4, &atoms, 1.3).unwrap();
        assert!((v - 0.5 * (1.0 + omega(4, 1.3))).abs() < 1e-15);
        assert!(schoenberg_mixture(3, &[(1.0, -0.5), (2.0, 1.5)], 1.0).is_err());
    }

    #[test]
    fn gram_examples() {
        let l2 = StarBody::euclidean(2).unwrap();
        let f = NormFunction::exp_pow(1.0).unwrap();
        let g = gram_matrix(&f, &l2, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(g.rows(), vec![vec![1.0]]);
        let pts = vec![vec![0.0, 0.0], vec![0.6, 0.8]];
        let g = gram_matrix(&f, &l2, &pts).unwrap();
        let e = (-1f64).exp();
        assert!((g[(0, 1)] - e).abs() < 1e-16 && g[(0, 0)] == 1.0);
        let lam = min_gram_eigenvalue(&f, &l2, &pts).unwrap();
        assert!((lam - (1.0 - e)).abs() < 1e-12);
        let ones = gram_matrix(&NormFunction::Constant, &l2, &[vec![0.0, 1.0], vec![2.0, 3.0], vec![1.0, 1.0]])
            .unwrap();
        assert!(ones.rows().iter().flatten().all(|v| *v == 1.0));
        assert!(min_gram_eigenvalue(&NormFunction::Constant, &l2, &[vec![0.0, 1.0], vec![2.0, 3.0], vec![1.0, 1.0]])
            .unwrap()
            .abs()
            < 1e-12);
        assert!(gram_matrix(&f, &l2, &[vec![0.0]]).is_err());
    }

    fn random_points(rng: &mut RngStream, m: usize, n: usize, scale: f64) -> Vec<Vec<f64>> {
        (0..m).map(|_| (0..n).map(|_| scale * rng.normal()).collect()).collect()
    }

    #[test]
    fn gaussian_kernel_is_psd_on_euclidean_space() {
        let f = NormFunction::exp_pow(2.0).unwrap();
        let body = StarBody::euclidean(3).unwrap();
        for seed in 0..100 {
            let mut rng = RngStream::new(seed, 0);
            let pts = random_points(&mut rng, 10, 3, 1.0);
            assert!(min_gram_eigenvalue(&f, &body, &pts).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn schoenberg_mixtures_are_psd_on_l2_3() {
        let f = NormFunction::mixture(3, vec![(0.5, 0.3), (2.0, 0.5), (4.0, 0.2)]).unwrap();
        let body = StarBody::euclidean(3).unwrap();
        for seed in 0..100 {
            let mut rng = RngStream::new(seed, 1);
            let pts = random_points(&mut rng, 10, 3, 1.5);
            assert!(min_gram_eigenvalue(&f, &body, &pts).unwrap() >= -1e-8);
        }
    }

    #[test]
    fn translation_and_scale_invariance() {
        let body = StarBody::lq(3, 4.0).unwrap();
        let mut rng = RngStream::new(5, 0);
        let pts = random_points(&mut rng, 8, 3, 1.0);
        let f = NormFunction::exp_pow(1.5).unwrap();
        let g = gram_matrix(&f, &body, &pts).unwrap();
        let shift = [0.3, -2.0, 7.5];
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&shift).map(|(a, b)| a + b).collect()).collect();
        let g2 = gram_matrix(&f, &body, &moved).unwrap();
        for (a, b) in g.rows().iter().flatten().zip(g2.rows().iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
        // scaling points by s and using f(t / s) reproduces the matrix
        let s = 2.5;
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| v * s).collect()).collect();
        for i in 0..8 {
            for j in 0..8 {
                let d: Vec<f64> = scaled[i].iter().zip(&scaled[j]).map(|(a, b)| a - b).collect();
                let v = f.eval(body.gauge(&d) / s);
                assert!((v - g[(i, j)]).abs() < 1e-12);
            }
        }
    }
}
