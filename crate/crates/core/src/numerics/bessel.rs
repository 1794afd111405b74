//! Bessel functions of the first kind for integer and half-integer orders.
//!
//! Small arguments (`r < 12`) use the power series. Large arguments use the
//! Hankel asymptotic expansion for `J0`/`J1` (closed sine/cosine forms for the
//! half-integer base orders) followed by upward recurrence while the order is
//! below the argument, and Miller's backward recurrence above it.

use super::special::gamma;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Argument at which evaluation switches from the power series to the
/// asymptotic route.
pub const SERIES_CUTOFF: f64 = 12.0;

fn check_order(nu: f64) {
    assert!(
        nu >= 0.0 && (2.0 * nu).fract() == 0.0,
        "Bessel order must be a non-negative integer or half-integer, got {nu}"
    );
}

/// `J_nu(r)` for `nu` in {0, 1/2, 1, 3/2, ...} and `r >= 0`.
pub fn bessel_j(nu: f64, r: f64) -> f64 {
    let mut out = [0.0];
    bessel_j_seq(nu, r, &mut out);
    out[0]
}

/// Power series for `J_nu(r)`; accurate for any real `nu >= 0` and moderate `r`.
pub fn bessel_j_series(nu: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * r;
    let mut term = if nu < 100.0 {
        half.powf(nu) / gamma(nu + 1.0)
    } else {
        (nu * half.ln() - super::special::ln_gamma(nu + 1.0)).exp()
    };
    let mut sum = term;
    let q = half * half;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > half {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion of `J_nu(x)` for `nu` in {0, 1}.
fn bessel_j01_asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64).powi(2);
    let inv8x = 1.0 / (8.0 * x);
    // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! (8x)^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) * inv8x / k as f64;
        if a.abs() >= last || a == 0.0 {
            break;
        }
        last = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    // chi = x - (nu/2 + 1/4) pi
    let (cos_chi, sin_chi) = if nu == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, (-s - c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Base pair `(J_b(x), J_{b+1}(x))` with `b` in {0, 1/2}, for `x >= SERIES_CUTOFF`.
fn base_pair(half_integer: bool, x: f64) -> (f64, f64) {
    if half_integer {
        let (s, c) = x.sin_cos();
        let amp = (2.0 / (PI * x)).sqrt();
        (amp * s, amp * (s / x - c))
    } else {
        (bessel_j01_asymptotic(0, x), bessel_j01_asymptotic(1, x))
    }
}

/// Fills `out[k] = J_{nu0 + k}(r)` for `k = 0..out.len()`.
pub fn bessel_j_seq(nu0: f64, r: f64, out: &mut [f64]) {
    check_order(nu0);
    assert!(r >= 0.0 && r.is_finite(), "Bessel argument must be finite and >= 0");
    let count = out.len();
    if count == 0 {
        return;
    }
    if r == 0.0 {
        for (k, o) in out.iter_mut().enumerate() {
            *o = if nu0 + k as f64 == 0.0 { 1.0 } else { 0.0 };
        }
        return;
    }
    if r < SERIES_CUTOFF {
        for (k, o) in out.iter_mut().enumerate() {
            *o = bessel_j_series(nu0 + k as f64, r);
        }
        return;
    }

    let half = nu0.fract() != 0.0;
    let base = if half { 0.5 } else { 0.0 };
    let offset = (nu0 - base) as usize; // out[k] is order index offset + k above base
    let top = offset + count - 1;

    // upward recurrence up to the largest index whose order stays below r
    let up_limit = {
        let mut m = 1usize;
        while base + (m as f64) + 1.0 < r && m < top {
            m += 1;
        }
        m
    };
    let mut vals = vec![0.0; top.max(1) + 1];
    let (j0, j1) = base_pair(half, r);
    vals[0] = j0;
    vals[1] = j1;
    for m in 1..up_limit.min(top) {
        let order = base + m as f64;
        vals[m + 1] = 2.0 * order / r * vals[m] - vals[m - 1];
    }

    if top > up_limit {
        // Miller backward recurrence, normalized at up_limit
        let start = top + 30 + (40.0 * (top as f64).max(r)).sqrt() as usize;
        let mut next = 0.0; // j_{m+1}
        let mut cur = 1e-300; // j_m
        let mut back = vec![0.0; top + 1];
        let mut m = start;
        while m > up_limit {
            let order = base + m as f64;
            let prev = 2.0 * order / r * cur - next;
            next = cur;
            cur = prev;
            m -= 1;
            if m <= top {
                back[m] = cur;
            }
            if cur.abs() > 1e250 {
                let s = 1e-250;
                cur *= s;
                next *= s;
                for b in back.iter_mut() {
                    *b *= s;
                }
            }
        }
        // cur now holds the unnormalized value at index up_limit; use the better
        // conditioned of the last two matching points
        let (idx, raw) = if vals[up_limit].abs() >= vals[up_limit - 1].abs() {
            (up_limit, cur)
        } else {
            let order = base + up_limit as f64;
            (up_limit - 1, 2.0 * order / r * cur - next)
        };
        let scale = vals[idx] / raw;
        for m in (up_limit + 1)..=top {
            vals[m] = back[m] * scale;
        }
    }

    out.copy_from_slice(&vals[offset..offset + count]);
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integral representation J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt,
    /// evaluated by the exponentially convergent trapezoid rule.
    fn j_integer_oracle(n: u32, x: f64) -> f64 {
        let m = 4000 + 2 * x as usize;
        let h = PI / m as f64;
        let mut s = 0.5 * ((0.0f64).cos() + (n as f64 * PI - x * PI.sin()).cos());
        for i in 1..m {
            let t = i as f64 * h;
            s += (n as f64 * t - x * t.sin()).cos();
        }
        s * h / PI
    }

    /// Spherical Bessel closed forms: J_{l+1/2}(x) = sqrt(2x/pi) j_l(x), with j_l
    /// from the trigonometric formulas for small l.
    fn j_half_oracle(l: u32, x: f64) -> f64 {
        let (s, c) = x.sin_cos();
        let jl = match l {
            0 => s / x,
            1 => s / (x * x) - c / x,
            2 => (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x),
            3 => (15.0 / x.powi(3) - 6.0 / x) * s / x - (15.0 / (x * x) - 1.0) * c / x,
            _ => unreachable!(),
        };
        (2.0 * x / PI).sqrt() * jl
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0.0, 0.0), 1.0);
        assert_eq!(bessel_j(1.0, 0.0), 0.0);
        let v = bessel_j(0.5, 1.0);
        assert!((v - (2.0 / PI).sqrt() * 1f64.sin()).abs() < 1e-15);
        assert!((v - 0.671_396_707_141_803_1).abs() < 1e-12);
    }

    #[test]
    fn first_zero_of_j0() {
        // refine the root by Newton with J0' = -J1, starting from the tabulated value
        let mut x: f64 = 2.404826;
        for _ in 0..5 {
            x += bessel_j(0.0, x) / bessel_j(1.0, x);
        }
        assert!((x - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(bessel_j(0.0, 2.404826).abs() < 1e-6);
    }

    #[test]
    fn integer_orders_against_integral_representation() {
        for n in [0u32, 1, 2, 5, 9, 14, 25] {
            for i in 0..=200 {
                let x = 0.25 * i as f64;
                let got = bessel_j(n as f64, x);
                let want = j_integer_oracle(n, x);
                let env = (2.0 / (PI * x)).sqrt().min(1.0);
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs().max(env),
                    "J_{n}({x}) = {got}, oracle {want}"
                );
            }
        }
    }

    #[test]
    fn half_integer_orders_against_closed_forms() {
        for l in 0u32..4 {
            for i in 1..=200 {
                let x = 0.25 * i as f64;
                let got = bessel_j(l as f64 + 0.5, x);
                let want = j_half_oracle(l, x);
                let env = (2.0 / (PI * x)).sqrt().min(1.0);
                assert!(
                    (got - want).abs() <= 1e-10 * env,
                    "J_{}({x}) = {got}, oracle {want}",
                    l as f64 + 0.5
                );
            }
        }
    }

    #[test]
    fn sequence_matches_single_evaluations() {
        for &x in &[0.3, 5.0, 11.9, 12.0, 13.5, 30.0, 400.0, 7000.5] {
            for &nu0 in &[0.0, 0.5, 1.0, 2.5] {
                let mut seq = vec![0.0; 26];
                bessel_j_seq(nu0, x, &mut seq);
                for (k, v) in seq.iter().enumerate() {
                    let nu = nu0 + k as f64;
                    let direct = if x < SERIES_CUTOFF {
                        bessel_j_series(nu, x)
                    } else if nu.fract() == 0.0 {
                        j_integer_oracle(nu as u32, x)
                    } else {
                        continue;
                    };
                    assert!((v - direct).abs() < 1e-10, "nu={nu} x={x}: {v} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn continuity_at_switchover() {
        for nu in [0.0, 0.5, 1.0, 3.0, 8.5] {
            let a = bessel_j(nu, SERIES_CUTOFF - 1e-9);
            let b = bessel_j(nu, SERIES_CUTOFF);
            assert!((a - b).abs() < 1e-9, "nu={nu}: {a} vs {b}");
        }
    }
}
