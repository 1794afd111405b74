//! Dense symmetric matrices and the cyclic Jacobi eigenvalue method.

use crate::error::{Error, Result};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::arg("matrix rows must form a square array"));
        }
        Ok(Matrix { n, data: rows.concat() })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v^T A v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues ascending, with
/// `vectors[k]` the unit eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `1e-12` relative to the matrix norm (or to exact zero for tiny entries).
pub fn sym_eigen(a: &Matrix) -> Result<SymEigen> {
    let n = a.dim();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    if a.max_asymmetry() > 1e-12 * scale.max(1.0) {
        return Err(Error::arg(format!(
            "matrix is not symmetric (max asymmetry {:.3e})",
            a.max_asymmetry()
        )));
    }
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let off = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        s.sqrt()
    };
    let target = 1e-12 * scale;
    let mut sweeps = 0;
    while off(&m) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::num(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (off-norm {:.3e})",
                off(&m)
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[(k, i)]).collect())
        .collect();
    Ok(SymEigen { values, vectors })
}

/// Smallest eigenpair of a symmetric matrix.
pub fn sym_eigen_min(a: &Matrix) -> Result<(f64, Vec<f64>)> {
    if a.dim() == 0 {
        return Err(Error::arg("empty matrix"));
    }
    let e = sym_eigen(a)?;
    Ok((e.values[0], e.vectors[0].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;

    fn residual(a: &Matrix, lambda: f64, v: &[f64]) -> f64 {
        a.mul_vec(v)
            .iter()
            .zip(v)
            .map(|(av, x)| (av - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn identity() {
        let (l, _) = sym_eigen_min(&Matrix::identity(3)).unwrap();
        assert_eq!(l, 1.0);
    }

    #[test]
    fn two_by_two_closed_form() {
        let e = (-1f64).exp();
        let a = Matrix::from_rows(&[vec![1.0, e], vec![e, 1.0]]).unwrap();
        let (l, v) = sym_eigen_min(&a).unwrap();
        assert!((l - (1.0 - e)).abs() < 1e-15);
        assert!((l - 0.632_120_558_828_557_7).abs() < 1e-12);
        assert!(residual(&a, l, &v) < 1e-14);
    }

    #[test]
    fn rank_one() {
        let a = Matrix::from_fn(4, |_, _| 1.0);
        let (l, _) = sym_eigen_min(&a).unwrap();
        assert!(l.abs() < 1e-12);
    }

    #[test]
    fn asymmetric_is_rejected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eigen_min(&a), Err(Error::Argument(_))));
    }

    #[test]
    fn residuals_on_random_matrices() {
        let mut rng = RngStream::new(3, 0);
        for m in [1usize, 2, 5, 16, 30] {
            let mut a = Matrix::zeros(m);
            for i in 0..m {
                for j in i..m {
                    let x = rng.normal();
                    a[(i, j)] = x;
                    a[(j, i)] = x;
                }
            }
            let e = sym_eigen(&a).unwrap();
            let norm = a.frobenius_norm();
            for (l, v) in e.values.iter().zip(&e.vectors) {
                assert!(residual(&a, *l, v) <= 1e-10 * norm);
            }
            let trace: f64 = (0..m).map(|i| a[(i, i)]).sum();
            assert!((trace - e.values.iter().sum::<f64>()).abs() < 1e-10 * norm);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
