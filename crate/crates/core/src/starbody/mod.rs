//! Minkowski functionals of origin-symmetric star bodies.

mod derivatives;
mod spec;
mod synth;

pub use derivatives::{
    first_derivative_1d, prop3_conditions_scan, second_derivative_1d, second_derivative_x1,
    DerivativeEstimate, Prop3Grid, Prop3Report,
};
pub use synth::{ln_cos_coefficient, measure_csv, parse_measure_csv, Synthetic2d, MAX_GRID};

use crate::error::{Error, Result};
use crate::numerics::rng::RngStream;

/// Orlicz function `M` on `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrliczFunction {
    /// `M(t) = t^q`, `q >= 1`.
    Power(f64),
}

impl OrliczFunction {
    pub fn power(q: f64) -> Result<Self> {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::arg(format!("Orlicz power must be finite and >= 1, got {q}")));
        }
        Ok(OrliczFunction::Power(q))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            OrliczFunction::Power(q) => t.powf(q),
        }
    }

    /// Highest derivative order that exists and is continuous on `[0, inf)`.
    pub fn derivative_order(&self) -> u32 {
        match *self {
            OrliczFunction::Power(q) if q.fract() == 0.0 => 2,
            OrliczFunction::Power(q) => (q.floor() as u32).min(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    /// `(sum |x_i|^q)^(1/q)`, `0 < q < inf`.
    Lq { q: f64 },
    /// `max |x_i|`.
    LInf,
    /// Implicit norm `sum M(|x_k| / s) = 1`.
    Orlicz { m: OrliczFunction },
    /// `(||x||_X^q + ||y||_Y^q)^(1/q)` with `x` the leading coordinates.
    QSum { left: Box<StarBody>, right: Box<StarBody>, q: f64 },
    /// `|T^{-1} x|_2`, the gauge of the ellipsoid `T B_2^n`.
    Image { t: Vec<f64>, t_inv: Vec<f64> },
    /// Band-limited 2-D body with a prescribed representing measure.
    Synthetic2d(Synthetic2d),
    /// The body `s K`, gauge `||x||_K / s`.
    Dilated { inner: Box<StarBody>, s: f64 },
}

/// An origin-symmetric star body in R^n, described by its gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct StarBody {
    n: usize,
    kind: BodyKind,
}

/// Relative bisection tolerance used by [`StarBody::minkowski`] for Orlicz bodies.
pub const ORLICZ_TOL: f64 = 1e-12;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("dimension must be at least 1"));
    }
    Ok(())
}

impl StarBody {
    pub fn lq(n: usize, q: f64) -> Result<Self> {
        check_dim(n)?;
        if q.is_infinite() && q > 0.0 {
            return Ok(StarBody { n, kind: BodyKind::LInf });
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::arg(format!("lq exponent must lie in (0, inf], got {q}")));
        }
        Ok(StarBody { n, kind: BodyKind::Lq { q } })
    }

    pub fn linf(n: usize) -> Result<Self> {
        Self::lq(n, f64::INFINITY)
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::lq(n, 2.0)
    }

    pub fn orlicz(n: usize, m: OrliczFunction) -> Result<Self> {
        check_dim(n)?;
        Ok(StarBody { n, kind: BodyKind::Orlicz { m } })
    }

    pub fn qsum(left: StarBody, right: StarBody, q: f64) -> Result<Self> {
        if !(q >= 1.0) || q.is_nan() {
            return Err(Error::arg(format!("q-sum exponent must be >= 1, got {q}")));
        }
        Ok(StarBody {
            n: left.n + right.n,
            kind: BodyKind::QSum { left: Box::new(left), right: Box::new(right), q },
        })
    }

    /// Linear image `T B_2^n` of the Euclidean ball, `T` row-major.
    pub fn image(t: Vec<f64>) -> Result<Self> {
        let n = (t.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != t.len() {
            return Err(Error::arg(format!(
                "image matrix needs a square number of entries, got {}",
                t.len()
            )));
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("image matrix entries must be finite"));
        }
        let t_inv = invert(&t, n)?;
        Ok(StarBody { n, kind: BodyKind::Image { t, t_inv } })
    }

    pub fn synthetic2d(s: Synthetic2d) -> Self {
        StarBody { n: 2, kind: BodyKind::Synthetic2d(s) }
    }

    /// The dilate `s K`.
    pub fn dilate(self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::arg(format!("dilation factor must be positive, got {s}")));
        }
        Ok(StarBody { n: self.n, kind: BodyKind::Dilated { inner: Box::new(self), s } })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    /// Whether second directional derivatives exist away from the coordinate
    /// hyperplanes (false for the polyhedral l1 and l_inf balls).
    pub fn is_smooth(&self) -> bool {
        match &self.kind {
            BodyKind::Lq { q } => *q > 1.0,
            BodyKind::LInf => false,
            BodyKind::Orlicz { m: OrliczFunction::Power(q) } => *q > 1.0,
            BodyKind::QSum { left, right, q } => *q > 1.0 && left.is_smooth() && right.is_smooth(),
            BodyKind::Image { .. } | BodyKind::Synthetic2d(_) => true,
            BodyKind::Dilated { inner, .. } => inner.is_smooth(),
        }
    }

    /// Whether the body is convex, so the gauge is a norm.
    pub fn is_convex(&self) -> bool {
        match &self.kind {
            BodyKind::Lq { q } => *q >= 1.0,
            BodyKind::LInf | BodyKind::Orlicz { .. } | BodyKind::Image { .. } => true,
            BodyKind::QSum { left, right, .. } => left.is_convex() && right.is_convex(),
            BodyKind::Synthetic2d(_) => false,
            BodyKind::Dilated { inner, .. } => inner.is_convex(),
        }
    }

    /// `||x||_K` with argument validation.
    pub fn minkowski(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::arg(format!(
                "point has {} coordinates, body dimension is {}",
                x.len(),
                self.n
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("point coordinates must be finite"));
        }
        self.eval(x)
    }

    /// `||x||_K` without validating the dimension (callers guarantee it).
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.eval(x).unwrap_or(f64::NAN)
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m == 0.0 {
            return Ok(0.0);
        }
        Ok(match &self.kind {
            BodyKind::LInf => m,
            BodyKind::Lq { q } => {
                if *q == 1.0 {
                    x.iter().map(|v| v.abs()).sum()
                } else if *q == 2.0 {
                    m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
                } else {
                    m * x.iter().map(|v| (v.abs() / m).powf(*q)).sum::<f64>().powf(1.0 / q)
                }
            }
            BodyKind::Orlicz { m: func } => orlicz_gauge(func, x, ORLICZ_TOL)?,
            BodyKind::QSum { left, right, q } => {
                let a = left.eval(&x[..left.n])?;
                let b = right.eval(&x[left.n..])?;
                qsum_combine(a, b, *q)
            }
            BodyKind::Image { t_inv, .. } => {
                let n = self.n;
                let y: Vec<f64> = (0..n)
                    .map(|i| (0..n).map(|j| t_inv[i * n + j] * x[j]).sum())
                    .collect();
                euclid(&y)
            }
            BodyKind::Synthetic2d(s) => s.gauge(x[0], x[1]),
            BodyKind::Dilated { inner, s } => inner.eval(x)? / s,
        })
    }

    /// Evaluates the gauge at every point of a flattened list.
    pub fn gauges(&self, points: &[f64]) -> Vec<f64> {
        points.chunks(self.n).map(|p| self.gauge(p)).collect()
    }
}

fn euclid(y: &[f64]) -> f64 {
    let m = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * y.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
}

fn qsum_combine(a: f64, b: f64, q: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return m;
    }
    m * ((a / m).powf(q) + (b / m).powf(q)).powf(1.0 / q)
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(t: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut a = t.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[piv * n + col].abs() <= 1e-13 * scale {
            return Err(Error::arg("image matrix is singular"));
        }
        for k in 0..n {
            a.swap(col * n + k, piv * n + k);
            inv.swap(col * n + k, piv * n + k);
        }
        let p = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r * n + col];
                if f != 0.0 {
                    for k in 0..n {
                        a[r * n + k] -= f * a[col * n + k];
                        inv[r * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Solves `sum M(|x_k| / s) = 1` for `s` by bracketing and bisection.
pub fn orlicz_gauge(m: &OrliczFunction, x: &[f64], tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let xmax = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if xmax == 0.0 {
        return Err(Error::arg("the Orlicz equation is undefined at x = 0"));
    }
    let sum = |s: f64| x.iter().map(|v| m.eval(v.abs() / s)).sum::<f64>();
    // the sum decreases in s; M(1) = 1 for the power family puts the root in
    // [max |x_k|, sum |x_k|], widened by doubling for safety
    let mut lo = xmax;
    let mut hi = x.iter().map(|v| v.abs()).sum::<f64>();
    let mut steps = 0;
    while sum(lo) < 1.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 200 {
            return Err(Error::num(format!("Orlicz bracketing failed below s = {lo:e}")));
        }
    }
    while sum(hi) > 1.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 200 {
            return Err(Error::num(format!("Orlicz bracketing failed above s = {hi:e}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sum(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let resid = (sum(s) - 1.0).abs();
    if resid > tol {
        return Err(Error::num(format!(
            "Orlicz bisection stalled in [{lo:e}, {hi:e}] with residual {resid:e}"
        )));
    }
    Ok(s)
}

/// `(||x||_X^q + ||y||_Y^q)^(1/q)`.
pub fn qsum_gauge(body_x: &StarBody, body_y: &StarBody, q: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::arg(format!("q-sum exponent must be >= 1, got {q}")));
    }
    Ok(qsum_combine(body_x.minkowski(x)?, body_y.minkowski(y)?, q))
}

/// Deterministic, roughly uniform directions on S^{d-1}: coordinate axes,
/// all sign diagonals (for d <= 6), pairwise diagonals, then a Fibonacci
/// spiral (d = 3), an angle grid (d = 2) or seeded Gaussian directions.
pub fn sphere_directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        out.push(e);
    }
    if d <= 6 {
        for mask in 0..(1usize << d) {
            let s = 1.0 / (d as f64).sqrt();
            out.push((0..d).map(|i| if mask >> i & 1 == 1 { -s } else { s }).collect());
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            for sj in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[i] = std::f64::consts::FRAC_1_SQRT_2;
                e[j] = sj * std::f64::consts::FRAC_1_SQRT_2;
                out.push(e);
            }
        }
    }
    let rest = count.saturating_sub(out.len()).max(count / 2);
    match d {
        1 => {}
        2 => {
            for k in 0..rest {
                let t = std::f64::consts::PI * (k as f64 + 0.5) / rest as f64;
                out.push(vec![t.cos(), t.sin()]);
            }
        }
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            for k in 0..rest {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / rest as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * k as f64;
                out.push(vec![r * phi.cos(), r * phi.sin(), z]);
            }
        }
        _ => {
            let mut rng = RngStream::new(0x5EED_D1EC, d as u64);
            for _ in 0..rest {
                let v: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
                let r = euclid(&v);
                out.push(v.iter().map(|x| x / r).collect());
            }
        }
    }
    out
}

/// Local pattern search on the sphere for an extremum of `g`; `sign = 1`
/// maximizes, `-1` minimizes.
fn refine_on_sphere(g: &dyn Fn(&[f64]) -> f64, start: &[f64], sign: f64) -> f64 {
    let d = start.len();
    let mut x = start.to_vec();
    let mut best = sign * g(&x);
    let mut step = 0.05;
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        dirs.push(e);
        for j in (i + 1)..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e[j] = 1.0;
            dirs.push(e.clone());
            e[j] = -1.0;
            dirs.push(e);
        }
    }
    while step > 1e-12 {
        let mut improved = false;
        for dir in &dirs {
            for s in [step, -step] {
                let y: Vec<f64> = x.iter().zip(dir).map(|(a, b)| a + s * b).collect();
                let r = euclid(&y);
                let y: Vec<f64> = y.iter().map(|v| v / r).collect();
                let v = sign * g(&y);
                if v > best {
                    best = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    sign * best
}

/// Smallest and largest gauge value on the Euclidean unit sphere, so that
/// `c |x|_2 <= ||x|| <= d |x|_2`. The sampled extrema are polished by a local
/// pattern search.
pub fn euclid_bounds(body: &StarBody, sphere_samples: usize) -> Result<(f64, f64)> {
    if sphere_samples < 100 {
        return Err(Error::arg("euclid_bounds needs at least 100 sphere samples"));
    }
    let dirs = sphere_directions(body.dim(), sphere_samples);
    let mut vals: Vec<(f64, usize)> = Vec::with_capacity(dirs.len());
    for (i, d) in dirs.iter().enumerate() {
        vals.push((body.minkowski(d)?, i));
    }
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let g = |x: &[f64]| body.gauge(x);
    let k = vals.len().min(4);
    let mut c = vals[0].0;
    let mut d = vals[vals.len() - 1].0;
    for &(_, i) in vals.iter().take(k) {
        c = c.min(refine_on_sphere(&g, &dirs[i], -1.0));
    }
    for &(_, i) in vals.iter().rev().take(k) {
        d = d.max(refine_on_sphere(&g, &dirs[i], 1.0));
    }
    if !(c > 0.0) {
        return Err(Error::num("gauge vanishes on the sphere; not a star body"));
    }
    Ok((c, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn minkowski_examples() {
        let l2 = StarBody::euclidean(2).unwrap();
        assert_eq!(l2.minkowski(&[3.0, 4.0]).unwrap(), 5.0);
        let linf = StarBody::linf(3).unwrap();
        assert_eq!(linf.minkowski(&[1.0, -2.0, 0.5]).unwrap(), 2.0);
        let o4 = StarBody::orlicz(2, OrliczFunction::power(4.0).unwrap()).unwrap();
        let closed = StarBody::lq(2, 4.0).unwrap().minkowski(&[1.0, 1.0]).unwrap();
        let got = o4.minkowski(&[1.0, 1.0]).unwrap();
        assert!(close(got, closed, 1e-12));
        assert!(close(got, 1.189_207_115_002_721, 1e-12));
    }

    #[test]
    fn minkowski_errors() {
        let l2 = StarBody::euclidean(2).unwrap();
        assert!(matches!(l2.minkowski(&[1.0]), Err(Error::Argument(_))));
        assert!(matches!(l2.minkowski(&[1.0, f64::NAN]), Err(Error::Argument(_))));
        assert_eq!(l2.minkowski(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn orlicz_examples() {
        let m4 = OrliczFunction::power(4.0).unwrap();
        let m2 = OrliczFunction::power(2.0).unwrap();
        assert!(close(orlicz_gauge(&m4, &[1.0, 0.0, 0.0], 1e-12).unwrap(), 1.0, 1e-12));
        assert!(close(orlicz_gauge(&m2, &[3.0, 4.0], 1e-12).unwrap(), 5.0, 1e-12));
        assert!(close(orlicz_gauge(&m4, &[1.0, 1.0], 1e-12).unwrap(), 2f64.powf(0.25), 1e-12));
        assert!(matches!(orlicz_gauge(&m4, &[0.0, 0.0], 1e-12), Err(Error::Argument(_))));
    }

    #[test]
    fn orlicz_function_invariants() {
        for q in [1.0, 2.0, 3.5, 4.0] {
            let m = OrliczFunction::power(q).unwrap();
            assert_eq!(m.eval(0.0), 0.0);
            let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
            for w in grid.windows(2) {
                assert!(m.eval(w[0]) <= m.eval(w[1]));
                let mid = m.eval(0.5 * (w[0] + w[1]));
                assert!(mid <= 0.5 * (m.eval(w[0]) + m.eval(w[1])) + 1e-12);
            }
        }
        assert!(OrliczFunction::power(0.5).is_err());
    }

    #[test]
    fn qsum_examples() {
        let x3 = StarBody::euclidean(3).unwrap();
        let r = StarBody::euclidean(1).unwrap();
        let one = [1.0, 1.0, 1.0];
        assert!(close(qsum_gauge(&x3, &r, 3.0, &one, &[0.0]).unwrap(), 3f64.sqrt(), 1e-14));
        let want = (3.0 * 3f64.sqrt() + 1.0).powf(1.0 / 3.0);
        assert!(close(qsum_gauge(&x3, &r, 3.0, &one, &[1.0]).unwrap(), want, 1e-14));
        assert!(close(want, 1.836_710_452_673_274, 1e-14));
        let sum = qsum_gauge(&r, &r, 1.0, &[2.0], &[-3.0]).unwrap();
        assert_eq!(sum, 5.0);
        assert!(matches!(qsum_gauge(&r, &r, 0.5, &[2.0], &[3.0]), Err(Error::Argument(_))));
        let body = StarBody::qsum(x3, r, 3.0).unwrap();
        assert!(close(body.minkowski(&[1.0, 1.0, 1.0, 1.0]).unwrap(), want, 1e-14));
    }

    #[test]
    fn image_of_euclidean_ball() {
        let body = StarBody::image(vec![2.0, 0.0, 0.0, 0.5]).unwrap();
        assert!(close(body.minkowski(&[2.0, 0.0]).unwrap(), 1.0, 1e-15));
        assert!(close(body.minkowski(&[0.0, 1.0]).unwrap(), 2.0, 1e-15));
        assert!(StarBody::image(vec![1.0, 2.0, 2.0, 4.0]).is_err());
        assert!(StarBody::image(vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn euclid_bounds_examples() {
        let (c, d) = euclid_bounds(&StarBody::euclidean(4).unwrap(), 200).unwrap();
        assert!(close(c, 1.0, 1e-12) && close(d, 1.0, 1e-12));
        let (c, d) = euclid_bounds(&StarBody::lq(2, 1.0).unwrap(), 100).unwrap();
        assert!((c - 1.0).abs() < 1e-3 && (d - 2f64.sqrt()).abs() < 1e-3);
        let (c, d) = euclid_bounds(&StarBody::linf(3).unwrap(), 100).unwrap();
        assert!((c - 1.0 / 3f64.sqrt()).abs() < 1e-3 && (d - 1.0).abs() < 1e-3);
        assert!(euclid_bounds(&StarBody::linf(3).unwrap(), 99).is_err());
    }

    fn any_body() -> impl Strategy<Value = StarBody> {
        prop_oneof![
            (2usize..6, prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(4.0), Just(f64::INFINITY)])
                .prop_map(|(n, q)| StarBody::lq(n, q).unwrap()),
            (2usize..5, prop_oneof![Just(1.0), Just(2.0), Just(4.0)])
                .prop_map(|(n, q)| StarBody::orlicz(n, OrliczFunction::power(q).unwrap()).unwrap()),
            (1usize..4, 1usize..3, 1.0f64..5.0).prop_map(|(a, b, q)| StarBody::qsum(
                StarBody::euclidean(a).unwrap(),
                StarBody::lq(b, 3.0).unwrap(),
                q
            )
            .unwrap()),
            proptest::collection::vec(-2.0f64..2.0, 9).prop_filter_map("singular", |mut t| {
                for i in 0..3 {
                    t[i * 3 + i] += 5.0;
                }
                StarBody::image(t).ok()
            }),
        ]
    }

    fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, n)
            .prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn homogeneity_evenness_positivity(
            (body, x) in any_body().prop_flat_map(|b| { let n = b.dim(); (Just(b), point(n)) }),
            log_s in -3.0f64..3.0,
        ) {
            let s = 10f64.powf(log_s);
            let g = body.minkowski(&x).unwrap();
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert_eq!(body.minkowski(&neg).unwrap(), g);
            prop_assert!(g > 0.0);
            let scaled: Vec<f64> = x.iter().map(|v| s * v).collect();
            let gs = body.minkowski(&scaled).unwrap();
            prop_assert!((gs - s * g).abs() <= 1e-10 * s * g, "{} vs {}", gs, s * g);
            prop_assert_eq!(body.minkowski(&vec![0.0; body.dim()]).unwrap(), 0.0);
        }

        #[test]
        fn triangle_inequality_for_convex_bodies(
            (body, x, y) in any_body().prop_flat_map(|b| { let n = b.dim(); (Just(b), point(n), point(n)) }),
        ) {
            prop_assume!(body.is_convex());
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = body.minkowski(&s).unwrap();
            let rhs = body.minkowski(&x).unwrap() + body.minkowski(&y).unwrap();
            prop_assert!(lhs <= rhs + 1e-10 * rhs.max(1.0));
        }

        #[test]
        fn orlicz_power_matches_lq(x in point(4), qi in 0usize..3) {
            let q = [1.0, 2.0, 4.0][qi];
            let m = OrliczFunction::power(q).unwrap();
            let a = orlicz_gauge(&m, &x, 1e-12).unwrap();
            let b = StarBody::lq(4, q).unwrap().minkowski(&x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn euclid_bounds_sandwich() {
        let bodies = [
            StarBody::lq(3, 1.0).unwrap(),
            StarBody::linf(4).unwrap(),
            StarBody::orlicz(3, OrliczFunction::power(4.0).unwrap()).unwrap(),
            StarBody::image(vec![1.0, 0.3, 0.0, 0.2, 2.0, 0.1, 0.0, -0.4, 0.7]).unwrap(),
            StarBody::qsum(StarBody::euclidean(3).unwrap(), StarBody::euclidean(1).unwrap(), 3.0)
                .unwrap(),
        ];
        let mut rng = RngStream::new(77, 0);
        for body in &bodies {
            let (c, d) = euclid_bounds(body, 400).unwrap();
            let (c, d) = (c - 1e-6, d + 1e-6);
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..body.dim()).map(|_| rng.normal()).collect();
                let r = euclid(&x);
                let g = body.gauge(&x);
                assert!(c * r <= g && g <= d * r, "{body:?}: {c} {g} {d} at {x:?}");
            }
        }
    }
}
