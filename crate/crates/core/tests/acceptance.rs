//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on failure.

use nversion::l0embed::{l0_scan, recover_measure_2d, verify_representation, FamilySpec, Verdict};
use nversion::numerics::quad::{integrate, QuadOptions};
use nversion::numerics::sphere::integrate_sphere;
use nversion::posdef::{omega, pd_check, refute_positive_definiteness, verify_witness, NormFunction, RefuteOptions};
use nversion::proofcheck::{
    default_test_function, epsilon_grid, gaussian_tail_check, proof_scan, psi, ProbabilityLaw, ProofOptions,
};
use nversion::stable::version_ks_test;
use nversion::starbody::{StarBody, Synthetic2d};
use nversion::Result;
use std::f64::consts::PI;
use std::time::Instant;

type Check = Result<(bool, String)>;

fn schoenberg_consistency() -> Check {
    let body = StarBody::lq(2, 4.0)?;
    let mut worst = f64::INFINITY;
    for p in [0.5, 1.0] {
        let r = pd_check(&NormFunction::exp_pow(p)?, &body, 12, 1000, 2024, 1e-8)?;
        worst = worst.min(r.min_eigenvalue);
    }
    Ok((worst >= -1e-8, format!("min eigenvalue {worst:e}")))
}

fn schoenberg_refutation() -> Check {
    let body = StarBody::lq(3, f64::INFINITY)?;
    let f = NormFunction::exp_pow(2.0)?;
    for seed in 1..=5 {
        let r = refute_positive_definiteness(&f, &body, &RefuteOptions::new(16, 100_000, seed, 1e-6))?;
        if let Some(w) = r.witness {
            let c = verify_witness(&w, 1e-6)?;
            let ok = c.negative && c.consistent && c.recomputed < -1e-6;
            return Ok((ok, format!("seed {seed}: recomputed form {:e}", c.recomputed)));
        }
    }
    Ok((false, "no witness for seeds 1..5".into()))
}

fn l0_verdicts() -> Check {
    let family = FamilySpec::default();
    let mut ok = true;
    let mut notes = vec![];
    for (n, q, want) in [
        (3, 4.0, Verdict::Consistent),
        (4, 1.0, Verdict::Consistent),
        (4, 4.0, Verdict::Refuted),
        (4, f64::INFINITY, Verdict::Refuted),
    ] {
        let r = l0_scan(&StarBody::lq(n, q)?, &family)?;
        let good = r.verdict == want && (want == Verdict::Consistent || r.max_normalized > 1e-4);
        ok &= good;
        notes.push(format!("l{q}^{n} {} {:.2e}", r.verdict.as_str(), r.max_normalized));
    }
    Ok((ok, notes.join(", ")))
}

fn measure_recovery() -> Check {
    let q = integrate(|t| t.cos().ln(), 0.0, 0.5 * PI, None, &QuadOptions::abs(1e-13))?;
    let c_oracle = -q.value * 2.0 / PI;
    let n = 256;
    let l2 = StarBody::euclidean(2)?;
    let m = recover_measure_2d(&l2, n)?;
    let c_err = (m.c - c_oracle).abs();
    let w_err = m.weights.iter().map(|w| (w * n as f64 - 1.0).abs()).fold(0.0, f64::max);
    let res_l2 = verify_representation(&l2, &m, 2000, 1)?.max_residual;

    let weights: Vec<f64> = (0..n)
        .map(|j| {
            let s = 2.0 * PI * j as f64 / n as f64;
            (1.0 + 0.6 * (2.0 * s).cos() + 0.2 * (10.0 * s + 1.0).sin()) / n as f64
        })
        .collect();
    let synth = StarBody::synthetic2d(Synthetic2d::new(weights.clone(), 0.7)?);
    let ms = recover_measure_2d(&synth, n)?;
    let rt_err = ms.weights.iter().zip(&weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let res_synth = verify_representation(&synth, &ms, 2000, 2)?.max_residual;
    let residual = res_l2.max(res_synth);
    Ok((
        c_err <= 1e-6 && w_err <= 1e-6 && rt_err <= 1e-6 && residual <= 1e-5,
        format!("C err {c_err:.1e}, weight err {w_err:.1e}, round trip {rt_err:.1e}, residual {residual:.1e}"),
    ))
}

fn proof_machinery() -> Check {
    let body = StarBody::euclidean(2)?;
    let f = NormFunction::exp_pow(2.0)?;
    let phi = default_test_function(2)?;
    let scan = proof_scan(&f, &body, &phi, &epsilon_grid(), &ProofOptions::default())?;
    let s = &scan.summary;
    let identity = s.max_identity_residual <= 1e-8;
    let nonneg = s.min_g >= -1e-8;
    let w_at = |e: f64| scan.rows.iter().find(|r| r.eps == e).map(|r| r.w.abs());
    let (w12, w4) = (w_at(2f64.powi(-12)).unwrap_or(f64::NAN), w_at(2f64.powi(-4)).unwrap_or(f64::NAN));
    let trend = w12 <= 0.1 * w4;
    let (u_gap, u_err) = match s.u {
        Some(u) => ((u.value + s.log_pairing.value).abs(), u.error),
        None => (f64::NAN, f64::NAN),
    };
    let limit = u_gap <= u_err;
    Ok((
        identity && nonneg && trend && limit,
        format!(
            "identity {:.1e}, min g {:.1e}, |w| {w12:.1e} vs {w4:.1e}, u gap {u_gap:.1e} <= err {u_err:.1e}",
            s.max_identity_residual, s.min_g
        ),
    ))
}

fn psi_sanity() -> Check {
    let one = NormFunction::Constant;
    let mut worst: f64 = 0.0;
    for e in epsilon_grid().into_iter().chain([0.3, 0.7, 0.9]) {
        worst = worst.max((psi(&one, e)?.value - e.powf(e)).abs());
    }
    let p = psi(&NormFunction::exp_pow(1.0)?, 0.1)?.value;
    Ok((worst <= 1e-9 && p <= 1e-4, format!("constant {worst:.1e}, exp_pow(1) psi(0.1) = {p:.3e}")))
}

fn gaussian_tail() -> Check {
    let ts = [0.25, 0.5, 1.0, 2.0, 4.0];
    let gauss = ProbabilityLaw::gaussian(2)?;
    let at1 = gaussian_tail_check(&gauss, &[1.0], 0, 1)?[0];
    let exact = (at1.lhs - (-0.5f64).exp()).abs() <= 1e-3 && (at1.rhs - 1.5).abs() <= 1e-3;
    let mut holds = true;
    for law in [gauss, ProbabilityLaw::stable(1.0, 2)?] {
        holds &= gaussian_tail_check(&law, &ts, 200_000, 7)?.iter().all(|r| r.holds);
    }
    Ok((exact && holds, format!("lhs {:.6}, rhs {:.6}, holds on grid: {holds}", at1.lhs, at1.rhs)))
}

fn version_property() -> Check {
    let mut ok = true;
    let mut notes = vec![];
    for (p, a) in [(1.0, vec![1.0, 2.0, 3.0]), (2.0, vec![3.0, 4.0])] {
        let mut passed = 0;
        for seed in 1..=10 {
            if version_ks_test(p, &a, 100_000, seed)?.p_value >= 0.01 {
                passed += 1;
            }
        }
        ok &= passed >= 9;
        notes.push(format!("p={p}: {passed}/10"));
    }
    Ok((ok, notes.join(", ")))
}

fn omega_cross_validation() -> Check {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for i in 0..50 {
            let r = 20.0 * i as f64 / 49.0;
            let q = integrate_sphere(n, |x| (r * x[0]).cos(), 3)?;
            worst = worst.max((omega(n, r) - q.value).abs());
        }
    }
    let at_zero = (2..=4).all(|n| omega(n, 0.0) == 1.0);
    Ok((worst <= 1e-6 && at_zero, format!("max diff {worst:.1e}, omega(0) = 1: {at_zero}")))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("schoenberg consistency on l4^2", schoenberg_consistency),
        ("schoenberg refutation on linf^3", schoenberg_refutation),
        ("L0 criterion verdicts", l0_verdicts),
        ("measure recovery", measure_recovery),
        ("epsilon machinery", proof_machinery),
        ("psi sanity", psi_sanity),
        ("gaussian tail inequality", gaussian_tail),
        ("version property", version_property),
        ("omega cross-validation", omega_cross_validation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("{} {}: {name} ({detail}) [{secs:.1}s]", if ok { "PASS" } else { "FAIL" }, i + 1);
        failed += usize::from(!ok);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
