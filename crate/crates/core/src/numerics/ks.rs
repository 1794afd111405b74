//! Two-sample Kolmogorov-Smirnov test.

/// Exact sup-distance between the empirical CDFs and the asymptotic
/// Kolmogorov p-value with effective size `sqrt(n m / (n + m))`.
pub fn ks_two_sample(sample1: &[f64], sample2: &[f64]) -> (f64, f64) {
    assert!(
        !sample1.is_empty() && !sample2.is_empty(),
        "KS test needs non-empty samples"
    );
    let mut a = sample1.to_vec();
    let mut b = sample2.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n1, n2) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n1 && j < n2 {
        let x = a[i].min(b[j]);
        while i < n1 && a[i] <= x {
            i += 1;
        }
        while j < n2 && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let en = (n1 as f64 * n2 as f64 / (n1 + n2) as f64).sqrt();
    (d, kolmogorov_q((en + 0.12 + 0.11 / en) * d))
}

/// Survival function of the Kolmogorov distribution,
/// `Q(l) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 l^2)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        // Jacobi theta form of the CDF, fast for small arguments
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let mut s = 0.0;
        let mut k = 1;
        loop {
            let term = y.powi(k * k);
            s += term;
            if term < 1e-17 * s || k > 100 {
                break;
            }
            k += 2;
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        let mut s = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-17 {
                break;
            }
        }
        2.0 * s
    };
    q.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;

    #[test]
    fn identical_samples() {
        let x = [0.3, 0.1, 0.7, 0.7, 2.0];
        let (d, p) = ks_two_sample(&x, &x);
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn disjoint_samples() {
        let (d, p) = ks_two_sample(&[0.0, 0.5, 1.0], &[2.0, 2.5, 3.0]);
        assert_eq!(d, 1.0);
        assert!(p < 0.2);
    }

    #[test]
    fn brute_force_statistic() {
        let mut r = RngStream::new(8, 0);
        let a: Vec<f64> = (0..37).map(|_| (r.uniform() * 10.0).floor()).collect();
        let b: Vec<f64> = (0..23).map(|_| (r.uniform() * 10.0).floor()).collect();
        let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        let brute = a
            .iter()
            .chain(&b)
            .map(|&x| (cdf(&a, x) - cdf(&b, x)).abs())
            .fold(0.0, f64::max);
        assert_eq!(ks_two_sample(&a, &b).0, brute);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // the two series agree at the switchover, and Q(1.36) is about 0.05
        let a = kolmogorov_q(1.18 - 1e-12);
        let b = kolmogorov_q(1.18);
        assert!((a - b).abs() < 1e-10);
        assert!((kolmogorov_q(1.358_099) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_q(1.627_624) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn uniform_samples_within_quantile() {
        let m = 10_000;
        let bound = 1.95 / (m as f64 / 2.0).sqrt();
        let mut inside = 0;
        for seed in 0..100 {
            let mut r1 = RngStream::new(seed, 0);
            let mut r2 = RngStream::new(seed, 1);
            let a: Vec<f64> = (0..m).map(|_| r1.uniform()).collect();
            let b: Vec<f64> = (0..m).map(|_| r2.uniform()).collect();
            if ks_two_sample(&a, &b).0 <= bound {
                inside += 1;
            }
        }
        assert!(inside >= 99, "{inside} of 100");
    }
}
