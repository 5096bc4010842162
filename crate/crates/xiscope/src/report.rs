//! Machine-readable report emission: JSON scan reports and CSV curve data.
//!
//! Every floating-point field is serialized as a decimal string with 17
//! significant digits regardless of the internal working precision, so
//! golden files diff cleanly across platforms. Output files are written
//! atomically (temp file in the target directory, then rename).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::kernel::ScaledSample;
use crate::scanner::{RootInterval, ScanReport};

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct ConfigDoc {
    source: String,
    beta_list: Vec<String>,
    t_min: String,
    t_max: String,
    digits: u32,
    series_eps_exponent: u32,
    x_max: String,
    nodes_per_halfperiod: u32,
    grid_factor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixture_epsilon: Option<String>,
}

#[derive(Serialize)]
struct IntervalDoc {
    beta: String,
    t_left: String,
    t_right: String,
    u_sign: i8,
    v_left: String,
    v_right: String,
    v_inner_zero: Option<String>,
    mu: String,
    mu_scaled: String,
    extrema_count: u32,
    verdict: String,
}

#[derive(Serialize)]
struct CheckDoc {
    pass: bool,
    margin: String,
}

#[derive(Serialize)]
struct FailureDoc {
    kind: String,
    beta: String,
    t_lo: String,
    t_hi: String,
    message: String,
}

#[derive(Serialize)]
struct ReportDoc {
    config: ConfigDoc,
    intervals: Vec<IntervalDoc>,
    checks: BTreeMap<String, CheckDoc>,
    failures: Vec<FailureDoc>,
}

fn interval_doc(iv: &RootInterval) -> IntervalDoc {
    IntervalDoc {
        beta: fmt_f64(iv.beta),
        t_left: fmt_f64(iv.t_left),
        t_right: fmt_f64(iv.t_right),
        u_sign: iv.u_sign_inside,
        v_left: fmt_f64(iv.v_left),
        v_right: fmt_f64(iv.v_right),
        v_inner_zero: iv.v_inner_zero.map(fmt_f64),
        mu: fmt_f64(iv.mu),
        mu_scaled: fmt_f64(iv.mu_scaled),
        extrema_count: iv.extrema_count,
        verdict: iv.pv_verdict.to_string(),
    }
}

/// Render a scan report as deterministic pretty-printed JSON.
pub fn scan_report_json(report: &ScanReport) -> String {
    let doc = ReportDoc {
        config: ConfigDoc {
            source: report.source.clone(),
            beta_list: report.beta_list.iter().copied().map(fmt_f64).collect(),
            t_min: fmt_f64(report.t_range.0),
            t_max: fmt_f64(report.t_range.1),
            digits: report.config.digits,
            series_eps_exponent: report.config.series_eps_exponent,
            x_max: fmt_f64(report.config.x_max),
            nodes_per_halfperiod: report.config.nodes_per_halfperiod,
            grid_factor: fmt_f64(report.config.grid_factor),
            fixture_epsilon: report.fixture_epsilon.map(fmt_f64),
        },
        intervals: report.intervals.iter().map(interval_doc).collect(),
        checks: report
            .checks
            .iter()
            .map(|(k, v)| (k.clone(), CheckDoc { pass: v.pass, margin: fmt_f64(v.margin) }))
            .collect(),
        failures: report
            .failures
            .iter()
            .map(|f| FailureDoc {
                kind: f.kind.clone(),
                beta: fmt_f64(f.beta),
                t_lo: fmt_f64(f.t_lo),
                t_hi: fmt_f64(f.t_hi),
                message: f.message.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serialization");
    s.push('\n');
    s
}

/// Exact, frozen curve-file header.
pub const CURVES_HEADER: &str = "t,beta,u_scaled,v_scaled,abs_u_scaled,abs_v_over_beta_scaled,norm_scaled";

/// One curve row from a scaled sample. On the critical line the valley
/// column takes its limit value `|u_t|` (by the reconstruction of `v` from
/// `u_t`), keeping the norm column on the limit branch of the strip norm.
pub fn curve_row(s: &ScaledSample) -> String {
    let abs_u = s.u.abs();
    let valley = if s.beta > 0.0 { s.v.abs() / s.beta } else { s.ut.abs() };
    let norm = abs_u + valley;
    format!(
        "{},{},{},{},{},{},{}",
        fmt_f64(s.t),
        fmt_f64(s.beta),
        fmt_f64(s.u),
        fmt_f64(s.v),
        fmt_f64(abs_u),
        fmt_f64(valley),
        fmt_f64(norm)
    )
}

pub fn curves_csv(samples: &[ScaledSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(CURVES_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&curve_row(s));
        out.push('\n');
    }
    out
}

/// Curve rows as a JSON array (same columns as the CSV).
pub fn curves_json(samples: &[ScaledSample]) -> String {
    #[derive(Serialize)]
    struct Row {
        t: String,
        beta: String,
        u_scaled: String,
        v_scaled: String,
        abs_u_scaled: String,
        abs_v_over_beta_scaled: String,
        norm_scaled: String,
    }
    let rows: Vec<Row> = samples
        .iter()
        .map(|s| {
            let abs_u = s.u.abs();
            let valley = if s.beta > 0.0 { s.v.abs() / s.beta } else { s.ut.abs() };
            Row {
                t: fmt_f64(s.t),
                beta: fmt_f64(s.beta),
                u_scaled: fmt_f64(s.u),
                v_scaled: fmt_f64(s.v),
                abs_u_scaled: fmt_f64(abs_u),
                abs_v_over_beta_scaled: fmt_f64(valley),
                norm_scaled: fmt_f64(abs_u + valley),
            }
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("curve serialization");
    s.push('\n');
    s
}

/// Write bytes to `path` atomically: temp file in the same directory, then
/// rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp-{}",
            path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            std::process::id()
        )),
        None => Path::new(&format!(".xiscope.tmp-{}", std::process::id())).to_path_buf(),
    };
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionConfig;
    use crate::scanner::{CheckOutcome, PvVerdict};

    #[test]
    fn fixed_width_numbers() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(1.0530520820646487e-7).len(), "1.0530520820646487e-7".len());
    }

    #[test]
    fn report_roundtrips_as_json() {
        let report = ScanReport {
            source: "fixture".into(),
            beta_list: vec![0.2],
            t_range: (5.5, 7.5),
            fixture_epsilon: Some(0.01),
            config: PrecisionConfig::new(30).unwrap(),
            intervals: vec![RootInterval {
                beta: 0.2,
                t_left: 6.0397875,
                t_right: 6.5265830,
                u_sign_inside: 1,
                v_left: -0.048,
                v_right: 0.048,
                v_inner_zero: Some(std::f64::consts::PI * 2.0),
                mu: 0.0300668,
                mu_scaled: 0.0300668,
                extrema_count: 1,
                pv_verdict: PvVerdict::SinglePeakOk,
            }],
            checks: [("lagarias".to_string(), CheckOutcome { pass: true, margin: 0.1 })]
                .into_iter()
                .collect(),
            failures: vec![],
        };
        let text = scan_report_json(&report);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["intervals"][0]["verdict"], "single_peak_ok");
        assert_eq!(parsed["intervals"][0]["u_sign"], 1);
        assert_eq!(parsed["config"]["digits"], 30);
        assert!(parsed["checks"]["lagarias"]["pass"].as_bool().unwrap());
    }

    #[test]
    fn csv_schema_frozen() {
        assert_eq!(CURVES_HEADER.split(',').count(), 7);
        let s = ScaledSample {
            t: 10.0,
            beta: 0.0,
            m: 1.0,
            u: 0.5,
            v: 0.0,
            ut: -0.25,
            vt: 0.0,
            ub: 0.0,
            vb: 0.25,
            ubb: 0.0,
            vbb: 0.0,
            err: 1e-20,
        };
        let row = curve_row(&s);
        assert_eq!(row.split(',').count(), 7);
        // beta = 0: the valley column carries |u_t| and v is exactly 0
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[3], fmt_f64(0.0));
        assert_eq!(cols[5], fmt_f64(0.25));
        assert_eq!(cols[6], fmt_f64(0.75));
    }

    #[test]
    fn atomic_write_creates_file() {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("xiscope-report-test-{}.json", std::process::id()));
        write_atomic(&path, b"{}\n").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"{}\n");
        std::fs::remove_file(&path).unwrap();
    }
}
