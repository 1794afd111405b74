//! Command-line orchestration.
//!
//! Every subcommand writes `report.json` and `data/*.csv` under `--out` (when
//! given) and prints a one-line verdict. Exit codes: 0 completed, 1 witness not
//! negative (`verify-witness` only), 2 usage or configuration error, 3
//! numerical failure.

mod config;

pub use config::RunConfig;

use crate::error::{Error, Result};
use crate::l0embed::{
    l0_scan, recover_measure_2d, verify_representation, Bump, FamilySpec, PairingOptions, TestFunction,
    ZonalProfile,
};
use crate::numerics::sphere::integrate_sphere;
use crate::posdef::{
    omega, pd_check, refute_positive_definiteness, verify_witness, GramWitness, NormFunction, RefuteOptions,
};
use crate::proofcheck::{epsilon_grid, gaussian_tail_check, proof_scan, ProbabilityLaw, ProofOptions};
use crate::stable::version_ks_test;
use crate::starbody::StarBody;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nversion", version, about = "Positive definiteness, L0 embedding and stable version checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Common {
    /// Output directory for report.json and data/*.csv.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    #[serde(skip)]
    workers: Option<usize>,
    /// key=value file merged under the flags.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Smallest eigenvalues of random Gram matrices.
    PdCheck(PdCheckArgs),
    /// Search for a Gram matrix with a negative quadratic form.
    PdRefute(PdRefuteArgs),
    /// Recompute a witness file's quadratic form.
    VerifyWitness(VerifyWitnessArgs),
    /// Pair ln||x||_K with a family of test functions.
    L0Scan(L0ScanArgs),
    /// Recover the representing measure of a planar body.
    RecoverMeasure(RecoverArgs),
    /// Epsilon scan of g, u, v, w and psi.
    ProofScan(ProofScanArgs),
    /// Gaussian-type tail inequality for a probability law.
    TailCheck(TailCheckArgs),
    /// Kolmogorov-Smirnov test of the stable version property.
    VersionTest(VersionArgs),
    /// Omega_n against sphere quadrature.
    OmegaTable(OmegaArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct PdCheckArgs {
    #[arg(long)]
    body: String,
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = 12)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct PdRefuteArgs {
    #[arg(long)]
    body: String,
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = 16)]
    m: usize,
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
struct VerifyWitnessArgs {
    path: PathBuf,
    /// The form must lie below -tol.
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct L0ScanArgs {
    #[arg(long)]
    body: String,
    /// Annuli `[2^k, 2^{k+1}]`: a range `lo..hi` or a list `k1,k2,..`.
    #[arg(long, default_value = "-2..2", allow_hyphen_values = true)]
    annuli: String,
    #[arg(long, default_value_t = 24)]
    max_power: usize,
    #[arg(long, default_value_t = 4)]
    max_zonal_squared: usize,
    #[arg(long, default_value_t = 4)]
    max_chebyshev: usize,
    #[arg(long, default_value_t = 8)]
    planar_axes: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    level: usize,
    #[arg(long, default_value_t = 1e-3)]
    max_error: f64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct RecoverArgs {
    #[arg(long)]
    body: String,
    /// Angular grid size.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ProofScanArgs {
    #[arg(long)]
    body: String,
    #[arg(long)]
    f: String,
    /// Test function supported on `[2^k, 2^{k+1}]`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    annulus: i32,
    /// Strictly decreasing epsilon grid (default 2^-1..2^-12).
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    level: usize,
    #[arg(long, default_value_t = 1e-6)]
    max_error: f64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct TailCheckArgs {
    /// `gaussian:n=<int>`, `stable:p=<float>,n=<int>` or `atom:n=<int>`.
    #[arg(long)]
    law: String,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,4")]
    t: Vec<f64>,
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct VersionArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    a: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    m: usize,
    /// First seed; repeats use consecutive seeds.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    repeats: u64,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
struct OmegaArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 20.0)]
    r_max: f64,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 3)]
    level: usize,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

/// Outcome of a subcommand before it is written out.
struct Outcome {
    verdict: String,
    summary: String,
    result: Value,
    data: Vec<(String, String)>,
    witness: Option<GramWitness>,
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run(args: &[String]) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Command::VerifyWitness(a) = &cli.command {
        return run_verify(a);
    }
    let (name, common, config) = describe(&cli.command);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(common.workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    let outcome = pool.install(|| execute(&cli.command));
    match outcome.and_then(|o| finish(name, &common, config, o)) {
        Ok(line) => {
            println!("{line}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) => EXIT_NUMERICAL,
        Error::Argument(_) | Error::Unsupported(_) | Error::Io(_) => EXIT_USAGE,
    }
}

/// Appends options from `--config` files that the flags leave unset.
fn expand_config(args: &[String]) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = Some(args.get(i + 1).ok_or_else(|| Error::arg("--config needs a path"))?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args.to_vec());
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::arg(format!("config file {path}: {e}")))?;
    Ok(RunConfig::parse(&text)?.merge_under(args))
}

fn describe(cmd: &Command) -> (&'static str, Common, Value) {
    fn pack<T: Serialize>(name: &'static str, a: &T, c: &Common) -> (&'static str, Common, Value) {
        (name, c.clone(), serde_json::to_value(a).unwrap_or(Value::Null))
    }
    match cmd {
        Command::PdCheck(a) => pack("pd-check", a, &a.common),
        Command::PdRefute(a) => pack("pd-refute", a, &a.common),
        Command::L0Scan(a) => pack("l0-scan", a, &a.common),
        Command::RecoverMeasure(a) => pack("recover-measure", a, &a.common),
        Command::ProofScan(a) => pack("proof-scan", a, &a.common),
        Command::TailCheck(a) => pack("tail-check", a, &a.common),
        Command::VersionTest(a) => pack("version-test", a, &a.common),
        Command::OmegaTable(a) => pack("omega-table", a, &a.common),
        Command::VerifyWitness(_) => unreachable!("handled before dispatch"),
    }
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::PdCheck(a) => run_pd_check(a),
        Command::PdRefute(a) => run_pd_refute(a),
        Command::L0Scan(a) => run_l0_scan(a),
        Command::RecoverMeasure(a) => run_recover(a),
        Command::ProofScan(a) => run_proof_scan(a),
        Command::TailCheck(a) => run_tail_check(a),
        Command::VersionTest(a) => run_version(a),
        Command::OmegaTable(a) => run_omega(a),
        Command::VerifyWitness(_) => unreachable!("handled before dispatch"),
    }
}

/// Writes the report and returns the verdict line.
fn finish(name: &str, common: &Common, config: Value, o: Outcome) -> Result<String> {
    let line = format!("{name}: {} ({})", o.verdict, o.summary);
    let Some(dir) = &common.out else {
        return Ok(line);
    };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let report = json!({
        "tool": "nversion",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "config": config,
        "verdict": o.verdict,
        "result": o.result,
        "timestamp": timestamp,
    });
    let data = dir.join("data");
    fs::create_dir_all(&data)?;
    write(&dir.join("report.json"), &serde_json::to_string_pretty(&report)?)?;
    for (file, body) in &o.data {
        write(&data.join(file), body)?;
    }
    if let Some(w) = &o.witness {
        write(&dir.join("witness.json"), &serde_json::to_string_pretty(w)?)?;
    }
    Ok(line)
}

fn write(path: &Path, body: &str) -> Result<()> {
    let mut text = body.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn run_verify(a: &VerifyWitnessArgs) -> i32 {
    let parsed = fs::read_to_string(&a.path)
        .map_err(Error::from)
        .and_then(|t| serde_json::from_str::<GramWitness>(&t).map_err(Error::from));
    let witness = match parsed {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: malformed witness {}: {e}", a.path.display());
            return EXIT_USAGE;
        }
    };
    match verify_witness(&witness, a.tol) {
        Ok(c) => {
            let verdict = if c.negative { "negative" } else { "not negative" };
            println!(
                "verify-witness: {verdict} (recomputed {:e}, stored {:e}, tol {:e})",
                c.recomputed, c.stored, a.tol
            );
            if c.negative {
                EXIT_OK
            } else {
                EXIT_NOT_NEGATIVE
            }
        }
        Err(e) => {
            eprintln!("error: malformed witness {}: {e}", a.path.display());
            EXIT_USAGE
        }
    }
}

fn run_pd_check(a: &PdCheckArgs) -> Result<Outcome> {
    let body = StarBody::parse(&a.body)?;
    let f = NormFunction::parse(&a.f)?;
    let r = pd_check(&f, &body, a.m, a.samples, a.seed, a.tol)?;
    let verdict = if r.violations == 0 { "consistent" } else { "violated" };
    Ok(Outcome {
        verdict: verdict.into(),
        summary: format!("min eigenvalue {:e} over {} samples", r.min_eigenvalue, r.samples),
        result: to_value(&r)?,
        data: vec![],
        witness: None,
    })
}

fn run_pd_refute(a: &PdRefuteArgs) -> Result<Outcome> {
    let body = StarBody::parse(&a.body)?;
    let f = NormFunction::parse(&a.f)?;
    let r = refute_positive_definiteness(&f, &body, &RefuteOptions::new(a.m, a.budget, a.seed, a.tol))?;
    let (verdict, summary, data) = match &r.witness {
        Some(w) => {
            let mut csv = String::from("index,coefficient");
            for k in 0..body.dim() {
                csv.push_str(&format!(",x{k}"));
            }
            csv.push('\n');
            for (i, (p, c)) in w.points.iter().zip(&w.coefficients).enumerate() {
                csv.push_str(&format!("{i},{c:e}"));
                for x in p {
                    csv.push_str(&format!(",{x:e}"));
                }
                csv.push('\n');
            }
            (
                "refuted",
                format!("quadratic form {:e} at trial {}", w.quadratic_form_value, w.trial),
                vec![("witness_points.csv".to_string(), csv)],
            )
        }
        None => (
            "no witness",
            format!("best min eigenvalue {:e} after {} trials", r.best_min_eigenvalue, r.trials_used),
            vec![],
        ),
    };
    Ok(Outcome {
        verdict: verdict.into(),
        summary,
        result: to_value(&r)?,
        data,
        witness: r.witness.clone(),
    })
}

/// `lo..hi` (inclusive) or a comma list.
fn parse_annuli(s: &str) -> Result<Vec<i32>> {
    let bad = || Error::arg(format!("annuli: expected lo..hi or k1,k2,.., got '{s}'"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: i32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|k| k.trim().parse().map_err(|_| bad())).collect()
}

fn run_l0_scan(a: &L0ScanArgs) -> Result<Outcome> {
    let body = StarBody::parse(&a.body)?;
    let family = FamilySpec {
        annuli: parse_annuli(&a.annuli)?,
        max_power: a.max_power,
        max_zonal_squared: a.max_zonal_squared,
        max_chebyshev: a.max_chebyshev,
        planar_axes: a.planar_axes,
        tol: a.tol,
        pairing: PairingOptions { level: a.level, max_error: a.max_error, ..PairingOptions::default() },
    };
    let r = l0_scan(&body, &family)?;
    let mut csv = String::from("id,annulus,profile,pairing,scale,normalized,error_estimate\n");
    for e in &r.entries {
        csv.push_str(&format!(
            "{},{},{},{:e},{:e},{:e},{:e}\n",
            e.id, e.annulus, e.profile, e.pairing, e.scale, e.normalized, e.error_estimate
        ));
    }
    Ok(Outcome {
        verdict: r.verdict.as_str().into(),
        summary: format!("max normalized pairing {:e} over {} functions", r.max_normalized, r.functions),
        result: to_value(&r)?,
        data: vec![("pairings.csv".into(), csv)],
        witness: None,
    })
}

fn run_recover(a: &RecoverArgs) -> Result<Outcome> {
    let body = StarBody::parse(&a.body)?;
    let m = recover_measure_2d(&body, a.grid)?;
    let check = verify_representation(&body, &m, a.samples, a.seed)?;
    let verdict = if m.min_weight >= 0.0 { "non-negative measure" } else { "signed measure" };
    Ok(Outcome {
        verdict: verdict.into(),
        summary: format!("C = {:.12}, min weight {:e}, residual {:e}", m.c, m.min_weight, check.max_residual),
        result: json!({ "measure": to_value(&m)?, "mass": m.mass(), "check": to_value(&check)? }),
        data: vec![("measure.csv".into(), m.to_csv())],
        witness: None,
    })
}

fn run_proof_scan(a: &ProofScanArgs) -> Result<Outcome> {
    let body = StarBody::parse(&a.body)?;
    let f = NormFunction::parse(&a.f)?;
    let mut axis = vec![0.0; body.dim()];
    axis[0] = 1.0;
    let phi = TestFunction::zonal(Bump::dyadic(a.annulus), axis, ZonalProfile::Constant)?;
    let eps = if a.eps.is_empty() { epsilon_grid() } else { a.eps.clone() };
    let opts = ProofOptions { sphere_level: a.level, max_error: a.max_error, ..ProofOptions::default() };
    let scan = proof_scan(&f, &body, &phi, &eps, &opts)?;
    let s = &scan.summary;
    let tol = 1e-8 * scan.scale.max(1.0);
    let verdict = if s.min_g >= -tol && s.max_identity_residual <= tol { "consistent" } else { "violated" };
    Ok(Outcome {
        verdict: verdict.into(),
        summary: format!(
            "min g {:e}, identity residual {:e}, psi in [{:.6}, {:.6}]",
            s.min_g, s.max_identity_residual, s.psi_inf, s.psi_sup
        ),
        result: to_value(&scan)?,
        data: vec![("epsilon_scan.csv".into(), scan.to_csv())],
        witness: None,
    })
}

fn run_tail_check(a: &TailCheckArgs) -> Result<Outcome> {
    let law = ProbabilityLaw::parse(&a.law)?;
    let rows = gaussian_tail_check(&law, &a.t, a.samples, a.seed)?;
    let holds = rows.iter().all(|r| r.holds);
    let mut csv = String::from("t,lhs,rhs,mc_error,holds\n");
    for r in &rows {
        csv.push_str(&format!("{:e},{:e},{:e},{:e},{}\n", r.t, r.lhs, r.rhs, r.mc_error, r.holds));
    }
    Ok(Outcome {
        verdict: if holds { "holds" } else { "violated" }.into(),
        summary: format!("{} of {} points hold for {law}", rows.iter().filter(|r| r.holds).count(), rows.len()),
        result: json!({ "law": law.to_string(), "rows": to_value(&rows)? }),
        data: vec![("tail.csv".into(), csv)],
        witness: None,
    })
}

fn run_version(a: &VersionArgs) -> Result<Outcome> {
    if a.repeats == 0 {
        return Err(Error::arg("repeats must be >= 1"));
    }
    let reports = (0..a.repeats)
        .map(|k| version_ks_test(a.p, &a.a, a.m, a.seed + k))
        .collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().filter(|r| r.p_value >= a.alpha).count();
    let needed = (0.9 * a.repeats as f64).ceil() as usize;
    let mut csv = String::from("seed,ks_statistic,p_value\n");
    for r in &reports {
        csv.push_str(&format!("{},{:e},{:e}\n", r.seed, r.ks_statistic, r.p_value));
    }
    Ok(Outcome {
        verdict: if passed >= needed { "consistent" } else { "rejected" }.into(),
        summary: format!("{passed}/{} seeds with p-value >= {}", reports.len(), a.alpha),
        result: json!({ "passed": passed, "needed": needed, "runs": to_value(&reports)? }),
        data: vec![("version.csv".into(), csv)],
        witness: None,
    })
}

fn run_omega(a: &OmegaArgs) -> Result<Outcome> {
    if a.n < 2 || a.count < 2 || !(a.r_max > 0.0) {
        return Err(Error::arg("omega-table needs n >= 2, count >= 2 and r-max > 0"));
    }
    let mut csv = String::from("r,omega,quadrature,diff,err\n");
    let mut max_diff: f64 = 0.0;
    for i in 0..a.count {
        let r = a.r_max * i as f64 / (a.count - 1) as f64;
        let q = integrate_sphere(a.n, |x| (r * x[0]).cos(), a.level)?;
        let w = omega(a.n, r);
        let d = (w - q.value).abs();
        max_diff = max_diff.max(d);
        csv.push_str(&format!("{r:e},{w:e},{:e},{d:e},{:e}\n", q.value, q.error_estimate));
    }
    Ok(Outcome {
        verdict: if max_diff <= 1e-6 { "agrees" } else { "disagrees" }.into(),
        summary: format!("max |omega - quadrature| {max_diff:e} over {} radii", a.count),
        result: json!({ "n": a.n, "max_diff": max_diff, "omega_at_zero": omega(a.n, 0.0) }),
        data: vec![("omega.csv".into(), csv)],
        witness: None,
    })
}
