//! Command-line front end: scans, verification suites, curve emission and
//! two-route point lookups.
//!
//! Exit codes: 0 = all checks passed, 1 = usage or numerical failure,
//! 2 = structural anomaly (a candidate counterexample: an interval with a
//! broken sign law or multiple peaks, a non-positive norm minimum, or a
//! non-positive positivity functional).

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use xiscope::hp;
use xiscope::report;
use xiscope::scanner::{self, CheckSet, ExitClass, KernelSource, StripSource, SyntheticSource};
use xiscope::suites::{self, SuiteOptions};
use xiscope::{
    required_digits, Error, PrecisionConfig, ScaledSample, StripPoint, SyntheticModel, XiEvaluator,
};

const EXIT_OK: i32 = 0;
const EXIT_FAILURE: i32 = 1;
const EXIT_ANOMALY: i32 = 2;

#[derive(Parser)]
#[command(
    name = "xiscope",
    version,
    about = "High-precision xi-function toolkit: kernel-integral evaluation, product-formula cross-checks, and peak-valley zero scans"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scan a (beta, t) range: detect root-intervals, verify the
    /// peak-valley structure, and write a JSON report.
    Scan(ScanArgs),
    /// Run named verification suites and print one row per check.
    Verify(VerifyArgs),
    /// Emit scaled curve data (CSV or JSON) for external plotting.
    Curves(CurvesArgs),
    /// Evaluate one strip point through both routes and print the
    /// discrepancy.
    Oracle(OracleArgs),
    /// Run the closed-form fixture suite.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Comma-separated list of beta values in [0, 0.5].
    #[arg(long, default_value = "0.1,0.3,0.5")]
    beta: String,
    #[arg(long, value_name = "T")]
    t_min: f64,
    #[arg(long, value_name = "T")]
    t_max: f64,
    /// Decimal working precision, or "auto" for the height schedule.
    #[arg(long, default_value = "auto")]
    digits: String,
    /// Output path for the JSON report.
    #[arg(long, default_value = "xiscope-scan.json")]
    out: PathBuf,
    /// Scan the closed-form fixture with this epsilon instead of xi.
    #[arg(long, value_name = "EPS")]
    fixture_epsilon: Option<f64>,
    /// Corrupt the fixture (flip the sign of v) to exercise the anomaly
    /// exit path.
    #[arg(long, hide = true)]
    fixture_corrupt: bool,
    /// Extra global checks: comma-separated from lagarias, lemma1,
    /// zero-count, or "all".
    #[arg(long)]
    checks: Option<String>,
    /// Grid step for the lagarias check.
    #[arg(long, default_value_t = 0.01)]
    lagarias_step: f64,
    /// Sample count for the lemma1 check.
    #[arg(long, default_value_t = 100)]
    lemma1_samples: u32,
    /// Zero-bracketing grid refinement (relative to mean zero spacing).
    #[arg(long)]
    grid_factor: Option<f64>,
    /// Gauss-Legendre nodes per oscillation half-period.
    #[arg(long)]
    nodes: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated check names, or "all".
    #[arg(long, default_value = "all")]
    checks: String,
    /// Decimal working precision, or "auto" for per-check defaults.
    #[arg(long, default_value = "auto")]
    digits: String,
    #[arg(long, default_value_t = 5.0)]
    t_min: f64,
    #[arg(long, default_value_t = 60.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    lagarias_step: f64,
    #[arg(long, default_value_t = 20)]
    lemma1_samples: u32,
}

#[derive(Args)]
struct CurvesArgs {
    /// Comma-separated list of beta values in [0, 0.5].
    #[arg(long)]
    beta: String,
    #[arg(long)]
    t_min: f64,
    #[arg(long)]
    t_max: f64,
    /// Rows per beta, uniformly spaced in t.
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value = "xiscope-curves.csv")]
    out: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long, default_value = "auto")]
    digits: String,
    /// Use the closed-form fixture with this epsilon instead of xi.
    #[arg(long, value_name = "EPS")]
    fixture_epsilon: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value = "auto")]
    digits: String,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_FAILURE,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("xiscope: {msg}");
        return EXIT_FAILURE;
    }
    let run = match cli.cmd {
        Cmd::Scan(a) => cmd_scan(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Curves(a) => cmd_curves(a),
        Cmd::Oracle(a) => cmd_oracle(a),
        Cmd::Fixture(a) => cmd_fixture(a),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("xiscope: {e}");
            EXIT_FAILURE
        }
    }
}

/// XISCOPE_THREADS caps the worker count; default is machine parallelism.
#[cfg(feature = "parallel")]
fn init_threads() -> Result<(), String> {
    match std::env::var("XISCOPE_THREADS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .ok()
                .filter(|n| *n >= 1)
                .ok_or_else(|| format!("XISCOPE_THREADS must be a positive integer, got '{v}'"))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads() -> Result<(), String> {
    Ok(())
}

fn parse_beta_list(s: &str) -> Result<Vec<f64>, Error> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let b: f64 = part
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("invalid beta value '{part}'")))?;
        if !(0.0..=0.5).contains(&b) {
            return Err(Error::Domain(format!("beta must lie in [0, 0.5], got {b}")));
        }
        out.push(b);
    }
    Ok(out)
}

fn parse_digits(s: &str, t_max: f64) -> Result<u32, Error> {
    if s == "auto" {
        Ok(required_digits(t_max))
    } else {
        s.parse::<u32>().map_err(|_| Error::Config(format!("invalid digits value '{s}'")))
    }
}

fn exit_code_for(class: ExitClass) -> i32 {
    match class {
        ExitClass::Clean => EXIT_OK,
        ExitClass::NumericFailure => EXIT_FAILURE,
        ExitClass::StructuralAnomaly => EXIT_ANOMALY,
    }
}

fn cmd_scan(a: ScanArgs) -> Result<i32, Error> {
    if !(a.t_min < a.t_max) {
        return Err(Error::Domain(format!(
            "t range is empty: t_min = {} must be below t_max = {}",
            a.t_min, a.t_max
        )));
    }
    let betas = parse_beta_list(&a.beta)?;
    let digits = parse_digits(&a.digits, a.t_max)?;
    let mut cfg = PrecisionConfig::new(digits)?;
    if let Some(gf) = a.grid_factor {
        cfg.grid_factor = gf;
    }
    if let Some(n) = a.nodes {
        cfg.nodes_per_halfperiod = n;
    }
    cfg.validate()?;

    let mut checks = CheckSet::default();
    if let Some(list) = &a.checks {
        for name in list.split(',').filter(|p| !p.trim().is_empty()) {
            match name.trim() {
                "lagarias" => checks.lagarias_step = Some(a.lagarias_step),
                "lemma1" => checks.lemma1_samples = Some(a.lemma1_samples),
                "zero-count" => checks.zero_count_t = Some(a.t_max),
                "all" => {
                    checks.lagarias_step = Some(a.lagarias_step);
                    checks.lemma1_samples = Some(a.lemma1_samples);
                    checks.zero_count_t = Some(a.t_max);
                }
                other => {
                    return Err(Error::Config(format!(
                        "unknown scan check '{other}'; valid: lagarias, lemma1, zero-count, all"
                    )))
                }
            }
        }
    }

    let mut report = if let Some(eps) = a.fixture_epsilon {
        let model = if a.fixture_corrupt {
            SyntheticModel::corrupted(eps)?
        } else {
            SyntheticModel::new(eps)?
        };
        let src = SyntheticSource::new(model);
        scanner::scan_range(&src, &betas, (a.t_min, a.t_max), &checks, &cfg)?
    } else {
        let ev = XiEvaluator::new(cfg.clone(), a.t_max)?;
        let src = KernelSource::new(&ev);
        scanner::scan_range(&src, &betas, (a.t_min, a.t_max), &checks, &cfg)?
    };
    report.fixture_epsilon = a.fixture_epsilon;

    report::write_atomic(&a.out, report::scan_report_json(&report).as_bytes())?;
    println!(
        "scan: {} intervals across {} beta values, {} failure records -> {}",
        report.intervals.len(),
        betas.len(),
        report.failures.len(),
        a.out.display()
    );
    for (name, c) in &report.checks {
        println!("  check {name}: {} (margin {:e})", if c.pass { "pass" } else { "FAIL" }, c.margin);
    }
    Ok(exit_code_for(report.exit_class()))
}

fn cmd_verify(a: VerifyArgs) -> Result<i32, Error> {
    let digits = if a.digits == "auto" {
        None
    } else {
        Some(a.digits.parse::<u32>().map_err(|_| {
            Error::Config(format!("invalid digits value '{}'", a.digits))
        })?)
    };
    let opts = SuiteOptions {
        digits,
        t_min: a.t_min,
        t_max: a.t_max,
        lagarias_step: a.lagarias_step,
        lemma1_samples: a.lemma1_samples,
        ..SuiteOptions::default()
    };
    let names: Vec<&str> = if a.checks == "all" {
        suites::SUITE_NAMES.to_vec()
    } else {
        a.checks.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).collect()
    };
    // reject unknown names before doing any work
    for name in &names {
        if !suites::SUITE_NAMES.contains(name) {
            return Err(Error::Config(format!(
                "unknown check '{name}'; valid checks: {}",
                suites::SUITE_NAMES.join(", ")
            )));
        }
    }
    let mut all_pass = true;
    println!("{:<18} {:<6} {:<12} detail", "check", "status", "margin");
    for name in names {
        let outcome = suites::run_suite(name, &opts)?;
        all_pass &= outcome.pass;
        println!(
            "{:<18} {:<6} {:<12.3e} {}",
            outcome.name,
            if outcome.pass { "pass" } else { "FAIL" },
            outcome.margin,
            outcome.detail
        );
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_curves(a: CurvesArgs) -> Result<i32, Error> {
    if !(a.t_min < a.t_max) {
        return Err(Error::Domain(format!(
            "t range is empty: t_min = {} must be below t_max = {}",
            a.t_min, a.t_max
        )));
    }
    if a.samples < 2 {
        return Err(Error::Config("need at least 2 samples".into()));
    }
    let betas = parse_beta_list(&a.beta)?;
    if betas.is_empty() {
        return Err(Error::Config("no beta values given".into()));
    }
    let digits = parse_digits(&a.digits, a.t_max)?;
    let cfg = PrecisionConfig::new(digits)?;
    let dt = (a.t_max - a.t_min) / (a.samples - 1) as f64;

    let mut rows: Vec<ScaledSample> = Vec::with_capacity(a.samples * betas.len());
    if let Some(eps) = a.fixture_epsilon {
        let src = SyntheticSource::new(SyntheticModel::new(eps)?);
        for &beta in &betas {
            rows.extend(src.sweep(beta, a.t_min, dt, a.samples)?);
        }
    } else {
        let ev = XiEvaluator::new(cfg, a.t_max)?;
        for &beta in &betas {
            rows.extend(ev.sweep(beta, a.t_min, dt, a.samples, false)?);
        }
    }

    let body = match a.format.as_str() {
        "csv" => report::curves_csv(&rows),
        "json" => report::curves_json(&rows),
        other => return Err(Error::Config(format!("unknown format '{other}'; use csv or json"))),
    };
    report::write_atomic(&a.out, body.as_bytes())?;
    println!("curves: {} rows -> {}", rows.len(), a.out.display());
    Ok(EXIT_OK)
}

fn cmd_oracle(a: OracleArgs) -> Result<i32, Error> {
    let digits = parse_digits(&a.digits, a.t)?;
    let cfg = PrecisionConfig::new(digits)?;
    let pt = StripPoint::new(a.beta, a.t)?;
    let ev = XiEvaluator::new(cfg.clone(), a.t)?;
    let xi = ev.eval_xi(pt)?;
    let (ou, ov) = xiscope::oracle::xi_product_point(a.t, a.beta, &cfg)?;
    let p = cfg.prec();
    let b = p.bits();
    let m = xiscope::scale_m(a.t, 0.5, p);
    let du = hp::to_f64(&xi.u.sub(&ou, b, hp::RM).div(&m, b, hp::RM)).abs();
    let dv = hp::to_f64(&xi.v.sub(&ov, b, hp::RM).div(&m, b, hp::RM)).abs();
    let m_pt = hp::to_f64(&xi.m_scale);
    println!("point: beta = {}, t = {}, digits = {digits}", a.beta, a.t);
    println!("  M(t, beta)      = {}", report::fmt_f64(m_pt));
    println!("kernel route:");
    println!("  u               = {}", report::fmt_f64(hp::to_f64(&xi.u)));
    println!("  v               = {}", report::fmt_f64(hp::to_f64(&xi.v)));
    println!("  u/M             = {}", report::fmt_f64(xi.u_scaled));
    println!("  v/M             = {}", report::fmt_f64(xi.v_scaled));
    println!("product route:");
    println!("  u               = {}", report::fmt_f64(hp::to_f64(&ou)));
    println!("  v               = {}", report::fmt_f64(hp::to_f64(&ov)));
    let mf = hp::to_f64(&m);
    println!("  u/M             = {}", report::fmt_f64(hp::to_f64(&ou) / m_pt));
    println!("  v/M             = {}", report::fmt_f64(hp::to_f64(&ov) / m_pt));
    println!("scaled discrepancy (by M(t, 1/2) = {}):", report::fmt_f64(mf));
    println!("  |du|/M          = {}", report::fmt_f64(du));
    println!("  |dv|/M          = {}", report::fmt_f64(dv));
    Ok(EXIT_OK)
}

fn cmd_fixture(a: FixtureArgs) -> Result<i32, Error> {
    if !(a.beta > 0.0 && a.beta <= 0.5) {
        return Err(Error::Domain(format!("fixture beta must lie in (0, 0.5], got {}", a.beta)));
    }
    let mut cfg = PrecisionConfig::new(30)?;
    cfg.grid_factor = 40.0; // the fixture's zero pair is narrower than xi's
    let src = SyntheticSource::new(SyntheticModel::new(a.epsilon)?);
    let two_pi = 2.0 * std::f64::consts::PI;
    let range = (two_pi - 1.0, two_pi + 1.0);

    let scan = scanner::find_u_zeros(&src, a.beta, range, &cfg)?;
    let theta = ((1.0 - a.epsilon) / a.beta.cosh()).acos();
    let expect = [two_pi - theta, two_pi + theta];
    let mut rows: Vec<(String, bool, String)> = Vec::new();

    let zeros_ok = scan.zeros.len() == 2
        && (scan.zeros[0] - expect[0]).abs() < 1e-6
        && (scan.zeros[1] - expect[1]).abs() < 1e-6;
    rows.push((
        "zeros".into(),
        zeros_ok,
        format!("found {:?}, closed form {:?}", scan.zeros, expect),
    ));

    if zeros_ok {
        let built = scanner::build_root_intervals(&scan.zeros, &src, a.beta, &cfg)?;
        let iv = scanner::verify_peak_valley(built[0].clone(), &src, &cfg)?;
        let mu_expect = a.epsilon + (a.beta.cosh() - 1.0);
        rows.push((
            "verdict".into(),
            iv.pv_verdict == scanner::PvVerdict::SinglePeakOk,
            format!("{}", iv.pv_verdict),
        ));
        rows.push((
            "mu".into(),
            (iv.mu - mu_expect).abs() < 1e-6,
            format!("mu = {:.9}, closed form {:.9}", iv.mu, mu_expect),
        ));
        let psi = scanner::lagarias_psi(&src, two_pi, a.beta)?;
        let psi_expect = a.beta.sinh() * (a.beta.cosh() - (1.0 - a.epsilon));
        rows.push((
            "lagarias".into(),
            (psi - psi_expect).abs() < 1e-9,
            format!("psi(2 pi) = {psi:.9}, closed form {psi_expect:.9}"),
        ));
    }

    let mut all = true;
    println!("{:<10} {:<6} detail", "check", "status");
    for (name, pass, detail) in rows {
        all &= pass;
        println!("{name:<10} {:<6} {detail}", if pass { "pass" } else { "FAIL" });
    }
    Ok(if all { EXIT_OK } else { EXIT_FAILURE })
}
