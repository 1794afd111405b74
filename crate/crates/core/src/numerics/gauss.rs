//! Gauss rules: Legendre by Newton iteration, Jacobi by Golub-Welsch.

use super::eigen::{sym_eigen, Matrix};
use super::special::ln_gamma;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of an interpolatory rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Applies the rule to `f` mapped onto `[a, b]` (unweighted rules only).
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    if n == 1 {
        return GaussRule { nodes: vec![0.0], weights: vec![2.0] };
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

type Cache = Mutex<HashMap<(usize, u64, u64), Arc<GaussRule>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: (usize, u64, u64), build: impl FnOnce() -> GaussRule) -> Arc<GaussRule> {
    if let Some(r) = cache().lock().unwrap().get(&key) {
        return r.clone();
    }
    let rule = Arc::new(build());
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

/// n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    cached((n, u64::MAX, u64::MAX), || compute_legendre(n))
}

/// n-point Gauss-Jacobi rule for the weight `(1-x)^a (1+x)^b` on [-1, 1],
/// `a, b > -1`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Arc<GaussRule> {
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    cached((n, a.to_bits(), b.to_bits()), || compute_jacobi(n, a, b))
}

fn compute_jacobi(n: usize, a: f64, b: f64) -> GaussRule {
    assert!(n >= 1);
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    diag[0] = (b - a) / (ab + 2.0);
    for (k, d) in diag.iter_mut().enumerate().skip(1) {
        let k = k as f64;
        let s = 2.0 * k + ab;
        *d = (b * b - a * a) / (s * (s + 2.0));
    }
    for (i, o) in off.iter_mut().enumerate() {
        let k = (i + 1) as f64;
        let s = 2.0 * k + ab;
        let beta = if i == 0 {
            // the (k + a + b) / (2k + a + b - 1) factor cancels at k = 1
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        *o = beta.sqrt();
    }
    let mut t = Matrix::zeros(n);
    for i in 0..n {
        t[(i, i)] = diag[i];
        if i + 1 < n {
            t[(i, i + 1)] = off[i];
            t[(i + 1, i)] = off[i];
        }
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let e = sym_eigen(&t).expect("Jacobi matrix is symmetric");
    // polish nodes by Newton on the orthonormal recurrence and take weights from
    // the Christoffel function, which stays accurate for nodes near x = -1
    let mut nodes = e.values;
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp, _) = orthonormal_eval(&diag, &off, mu0, *x);
            if dp != 0.0 {
                *x -= p / dp;
            }
        }
        let (_, _, christoffel) = orthonormal_eval(&diag, &off, mu0, *x);
        weights.push(1.0 / christoffel);
    }
    GaussRule { nodes, weights }
}

/// `(p_n(x), p_n'(x), sum_{k<n} p_k(x)^2)` for the orthonormal polynomials of
/// the Jacobi matrix `(diag, off)` with `p_0 = mu0^(-1/2)`.
fn orthonormal_eval(diag: &[f64], off: &[f64], mu0: f64, x: f64) -> (f64, f64, f64) {
    let n = diag.len();
    let mut p_prev = 0.0;
    let mut p = 1.0 / mu0.sqrt();
    let mut d_prev = 0.0;
    let mut d = 0.0;
    let mut sum = p * p;
    for k in 0..n {
        let b_next = if k + 1 < n {
            off[k]
        } else {
            // the last coefficient only scales p_n, whose root is unaffected
            1.0
        };
        let b_here = if k == 0 { 0.0 } else { off[k - 1] };
        let p_next = ((x - diag[k]) * p - b_here * p_prev) / b_next;
        let d_next = ((x - diag[k]) * d + p - b_here * d_prev) / b_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        if k + 1 < n {
            sum += p * p;
        }
    }
    (p, d, sum)
}
