//! Root-interval detection and the peak-valley verification machinery.
//!
//! For a fixed `beta > 0` the zeros of `u(t, beta)` cut the t-axis into
//! root-intervals. Inside each interval the scanner checks the structure
//! that keeps the strip norm positive: `v` changes sign across the
//! interval (negative at the left node when `u > 0` inside, mirrored for
//! `u < 0`), has exactly one zero strictly inside, `u` has a single
//! extremum, and the norm minimum `mu` stays positive. Violations are
//! reported as findings, never patched over.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss::gauss_legendre;
use crate::hp::{self, Prec};
use crate::kernel::{scale_m, ScaledSample, XiEvaluator};
use crate::oracle;
use crate::parallel;
use crate::precision::PrecisionConfig;
use crate::synthetic::SyntheticModel;

/// Bisection bracket width for accepted zeros.
pub const ZERO_REFINE_TOL: f64 = 1e-9;
/// A refined zero must satisfy |u| < 1e-6 (scaled by M) at the midpoint.
pub const ZERO_VALUE_TOL: f64 = 1e-6;
/// Scaled |u| below this at a sign-preserving local minimum is recorded as a
/// near-miss diagnostic.
pub const NEAR_MISS_TOL: f64 = 1e-3;
/// Interior samples used to audit that u keeps one sign inside an interval.
const AUDIT_SAMPLES: usize = 64;
/// Dense samples used for v-crossing counts, extremum counts and the norm
/// minimum.
const DENSE_SAMPLES: usize = 256;
/// Fixed seed for the scan-level lemma-1 sample draw.
pub const LEMMA1_SEED: u64 = 0x9a3c_51f2_0e6b_7d84;

/// A uniform interface over the kernel evaluator, the product-formula
/// oracle and the closed-form fixture. All sample components are scaled by
/// the source's own `M(t, beta)` (identically 1 for the fixture).
pub trait StripSource: Sync {
    fn name(&self) -> &str;
    fn m_scale(&self, t: f64, beta: f64) -> f64;
    /// Scaled noise floor: |u| or |v| below a few multiples of this cannot
    /// be sign-classified.
    fn err_scaled(&self) -> f64;
    /// Whether the source can resolve height `t`. Only the kernel route
    /// burns precision against the exponential decay; the fixture and the
    /// product oracle are relative-accuracy routes.
    fn check_height(&self, _t: f64) -> Result<()> {
        Ok(())
    }
    fn sample(&self, t: f64, beta: f64) -> Result<ScaledSample>;
    fn sample_u(&self, t: f64, beta: f64) -> Result<f64> {
        Ok(self.sample(t, beta)?.u)
    }
    fn sweep(&self, beta: f64, t0: f64, dt: f64, count: usize) -> Result<Vec<ScaledSample>> {
        parallel::try_map_indexed(count, |k| self.sample(t0 + dt * k as f64, beta))
    }
}

/// The kernel-integral route.
pub struct KernelSource<'a> {
    ev: &'a XiEvaluator,
}

impl<'a> KernelSource<'a> {
    pub fn new(ev: &'a XiEvaluator) -> Self {
        KernelSource { ev }
    }

    pub fn evaluator(&self) -> &XiEvaluator {
        self.ev
    }
}

impl StripSource for KernelSource<'_> {
    fn name(&self) -> &str {
        "kernel"
    }

    fn m_scale(&self, t: f64, beta: f64) -> f64 {
        hp::to_f64(&self.ev.m_scale(t, beta))
    }

    fn err_scaled(&self) -> f64 {
        // scaled error is largest at the top of the range
        self.ev.err_bound(1) / self.m_scale(self.ev.t_cap(), 0.0)
    }

    fn check_height(&self, t: f64) -> Result<()> {
        self.ev.cfg().check_height(t)?;
        if t > self.ev.t_cap() * (1.0 + 1e-12) + 1e-9 {
            return Err(Error::Domain(format!(
                "t = {t} exceeds the evaluator height cap {}",
                self.ev.t_cap()
            )));
        }
        Ok(())
    }

    fn sample(&self, t: f64, beta: f64) -> Result<ScaledSample> {
        self.ev.sample(t, beta)
    }

    fn sample_u(&self, t: f64, beta: f64) -> Result<f64> {
        self.ev.sample_u(t, beta)
    }

    fn sweep(&self, beta: f64, t0: f64, dt: f64, count: usize) -> Result<Vec<ScaledSample>> {
        self.ev.sweep(beta, t0, dt, count, false)
    }
}

/// The closed-form fixture.
pub struct SyntheticSource {
    model: SyntheticModel,
}

impl SyntheticSource {
    pub fn new(model: SyntheticModel) -> Self {
        SyntheticSource { model }
    }

    pub fn model(&self) -> &SyntheticModel {
        &self.model
    }
}

impl StripSource for SyntheticSource {
    fn name(&self) -> &str {
        "fixture"
    }

    fn m_scale(&self, _t: f64, _beta: f64) -> f64 {
        1.0
    }

    fn err_scaled(&self) -> f64 {
        1e-14
    }

    fn sample(&self, t: f64, beta: f64) -> Result<ScaledSample> {
        let m = &self.model;
        Ok(ScaledSample {
            t,
            beta,
            m: 1.0,
            u: m.u(t, beta),
            v: m.v(t, beta),
            ut: m.u_t(t, beta),
            vt: m.v_t(t, beta),
            ub: m.u_beta(t, beta),
            vb: m.v_beta(t, beta),
            // second tau-derivative of cosh(tau) - 1 + eps is cosh(tau) again
            ubb: beta.cosh() * t.cos(),
            vbb: beta.sinh() * t.sin(),
            err: 1e-14,
        })
    }
}

/// The Euler-Maclaurin product route, with t-derivatives by central
/// differences and the Cauchy-Riemann relations. Used for cross-validation;
/// the second-derivative fields are not provided.
pub struct OracleSource {
    cfg: PrecisionConfig,
    fd_step: f64,
}

impl OracleSource {
    pub fn new(cfg: PrecisionConfig) -> Self {
        OracleSource { cfg, fd_step: 1e-6 }
    }

    fn uv(&self, t: f64, beta: f64) -> Result<(f64, f64, f64)> {
        let p = self.cfg.prec();
        let (u, v) = oracle::xi_product_point(t, beta, &self.cfg)?;
        let m = scale_m(t, beta, p);
        let b = p.bits();
        Ok((
            hp::to_f64(&u.div(&m, b, crate::hp::RM)),
            hp::to_f64(&v.div(&m, b, crate::hp::RM)),
            hp::to_f64(&m),
        ))
    }
}

impl StripSource for OracleSource {
    fn name(&self) -> &str {
        "oracle"
    }

    fn m_scale(&self, t: f64, beta: f64) -> f64 {
        hp::to_f64(&scale_m(t, beta, self.cfg.prec()))
    }

    fn err_scaled(&self) -> f64 {
        1e-12
    }

    fn sample(&self, t: f64, beta: f64) -> Result<ScaledSample> {
        let h = self.fd_step;
        let (u, v, m) = self.uv(t, beta)?;
        let (u_hi, v_hi, _) = self.uv(t + h, beta)?;
        let (u_lo, v_lo, _) = self.uv((t - h).max(0.0), beta)?;
        let dt = if t >= h { 2.0 * h } else { h + t };
        let ut = (u_hi - u_lo) / dt;
        let vt = (v_hi - v_lo) / dt;
        Ok(ScaledSample {
            t,
            beta,
            m,
            u,
            v,
            ut,
            vt,
            ub: vt,
            vb: -ut,
            ubb: f64::NAN,
            vbb: f64::NAN,
            err: 1e-12,
        })
    }

    fn sample_u(&self, t: f64, beta: f64) -> Result<f64> {
        Ok(self.uv(t, beta)?.0)
    }
}

/// Verdict of the peak-valley verification of one root-interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PvVerdict {
    SinglePeakOk,
    MultiPeakAnomaly,
    SignAnomaly,
    Unverified,
}

impl std::fmt::Display for PvVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PvVerdict::SinglePeakOk => "single_peak_ok",
            PvVerdict::MultiPeakAnomaly => "multi_peak_anomaly",
            PvVerdict::SignAnomaly => "sign_anomaly",
            PvVerdict::Unverified => "unverified",
        };
        f.write_str(s)
    }
}

/// One interval between consecutive zeros of `u(., beta)`.
///
/// `v_left`/`v_right` are scaled by `M` at the respective endpoint; `mu` is
/// the unscaled norm minimum and `mu_scaled` is `mu / M(t_left, beta)`.
#[derive(Clone, Debug)]
pub struct RootInterval {
    pub beta: f64,
    pub t_left: f64,
    pub t_right: f64,
    pub u_sign_inside: i8,
    pub v_left: f64,
    pub v_right: f64,
    pub v_inner_zero: Option<f64>,
    pub mu: f64,
    pub mu_scaled: f64,
    pub extrema_count: u32,
    pub pv_verdict: PvVerdict,
}

/// Zeros found in a range plus scan diagnostics.
#[derive(Clone, Debug)]
pub struct ZeroScan {
    pub zeros: Vec<f64>,
    pub near_misses: Vec<NearMiss>,
    pub grid_points: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct NearMiss {
    pub t: f64,
    pub u_scaled: f64,
}

/// Grid step of the zero bracketing walk: a tenth (by default) of the mean
/// zero spacing `2 pi / ln(t / 2 pi)`, with the log clamped below t = 20.
fn bracket_step(t: f64, grid_factor: f64) -> f64 {
    let tt = t.max(20.0);
    let mean = 2.0 * std::f64::consts::PI / (tt / (2.0 * std::f64::consts::PI)).ln();
    mean / grid_factor.max(10.0)
}

/// All simple sign-change zeros of `u(., beta)` in `t_range`, bisection
/// refined to a bracket below [`ZERO_REFINE_TOL`].
pub fn find_u_zeros(
    src: &dyn StripSource,
    beta: f64,
    t_range: (f64, f64),
    cfg: &PrecisionConfig,
) -> Result<ZeroScan> {
    let (t0, t1) = t_range;
    if !(t0.is_finite() && t1.is_finite() && t0 < t1 && t0 >= 0.0) {
        return Err(Error::Domain(format!("invalid scan range [{t0}, {t1}]")));
    }
    if !(0.0..=0.5).contains(&beta) {
        return Err(Error::Domain(format!("scan beta must lie in [0, 1/2], got {beta}")));
    }
    src.check_height(t1)?;

    let mut grid = Vec::new();
    let mut t = t0;
    while t < t1 {
        grid.push(t);
        t += bracket_step(t, cfg.grid_factor);
    }
    grid.push(t1);

    let u: Vec<f64> = parallel::try_map_indexed(grid.len(), |i| src.sample_u(grid[i], beta))?;

    let mut brackets = Vec::new();
    for i in 0..grid.len() - 1 {
        if u[i] == 0.0 {
            brackets.push((grid[i], grid[i], u[i], u[i]));
        } else if u[i] * u[i + 1] < 0.0 {
            brackets.push((grid[i], grid[i + 1], u[i], u[i + 1]));
        }
    }
    if *u.last().unwrap() == 0.0 {
        brackets.push((t1, t1, 0.0, 0.0));
    }

    let mut zeros: Vec<f64> =
        parallel::try_map_indexed(brackets.len(), |k| {
            let (a, b, ua, ub) = brackets[k];
            refine_zero(src, beta, a, b, ua, ub)
        })?;
    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zeros.dedup_by(|a, b| (*a - *b).abs() < 1e-8);

    // near-tangency diagnostics: small |u| local minima without a crossing
    let mut near_misses = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        let a = u[i].abs();
        if a < NEAR_MISS_TOL
            && a > 0.0
            && a <= u[i - 1].abs()
            && a <= u[i + 1].abs()
            && u[i - 1] * u[i] > 0.0
            && u[i] * u[i + 1] > 0.0
        {
            near_misses.push(NearMiss { t: grid[i], u_scaled: u[i] });
        }
    }

    Ok(ZeroScan { zeros, near_misses, grid_points: grid.len() })
}

fn refine_zero(
    src: &dyn StripSource,
    beta: f64,
    mut a: f64,
    mut b: f64,
    mut ua: f64,
    _ub: f64,
) -> Result<f64> {
    if a == b {
        return Ok(a);
    }
    while b - a > ZERO_REFINE_TOL {
        let mid = 0.5 * (a + b);
        let um = src.sample_u(mid, beta)?;
        if um == 0.0 {
            return Ok(mid);
        }
        if um * ua > 0.0 {
            a = mid;
            ua = um;
        } else {
            b = mid;
        }
    }
    let mid = 0.5 * (a + b);
    let um = src.sample_u(mid, beta)?;
    if um.abs() >= ZERO_VALUE_TOL {
        return Err(Error::Numerical(format!(
            "refined bracket at t = {mid} still has |u| = {:e} (scaled)",
            um.abs()
        )));
    }
    Ok(mid)
}

/// Pair consecutive zeros into root-intervals, fixing the interior sign at
/// the midpoint and auditing that no sign change hides inside. A detected
/// interior crossing inserts the missing zero and rebuilds.
pub fn build_root_intervals(
    zeros: &[f64],
    src: &dyn StripSource,
    beta: f64,
    cfg: &PrecisionConfig,
) -> Result<Vec<RootInterval>> {
    let mut zs: Vec<f64> = zeros.to_vec();
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zs.dedup_by(|a, b| (*a - *b).abs() < 1e-8);

    for _round in 0..4 {
        let mut missing = Vec::new();
        for i in 0..zs.len().saturating_sub(1) {
            missing.extend(audit_interval(src, beta, zs[i], zs[i + 1], cfg)?);
        }
        if missing.is_empty() {
            let mut out = Vec::with_capacity(zs.len().saturating_sub(1));
            for i in 0..zs.len().saturating_sub(1) {
                let mid = 0.5 * (zs[i] + zs[i + 1]);
                let um = src.sample_u(mid, beta)?;
                out.push(RootInterval {
                    beta,
                    t_left: zs[i],
                    t_right: zs[i + 1],
                    u_sign_inside: if um >= 0.0 { 1 } else { -1 },
                    v_left: 0.0,
                    v_right: 0.0,
                    v_inner_zero: None,
                    mu: 0.0,
                    mu_scaled: 0.0,
                    extrema_count: 0,
                    pv_verdict: PvVerdict::Unverified,
                });
            }
            return Ok(out);
        }
        zs.extend(missing);
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        zs.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    }
    Err(Error::Rescan("interior sign audit kept finding new zeros after 4 rounds".into()))
}

/// Sample the open interval and return refined zeros for any interior sign
/// change relative to the midpoint sign.
fn audit_interval(
    src: &dyn StripSource,
    beta: f64,
    left: f64,
    right: f64,
    _cfg: &PrecisionConfig,
) -> Result<Vec<f64>> {
    let width = right - left;
    if width <= 4.0 * ZERO_REFINE_TOL {
        return Ok(Vec::new());
    }
    let dt = width / (AUDIT_SAMPLES as f64 + 1.0);
    let samples = src.sweep(beta, left + dt, dt, AUDIT_SAMPLES)?;
    let noise = 3.0 * src.err_scaled();
    let mut found = Vec::new();
    for w in samples.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        if p.u * q.u < 0.0 && p.u.abs() > noise && q.u.abs() > noise {
            found.push(refine_zero(src, beta, p.t, q.t, p.u, q.u)?);
        }
    }
    Ok(found)
}

/// Outcome of the norm minimisation over one interval.
#[derive(Clone, Copy, Debug)]
pub struct NormMin {
    pub mu: f64,
    pub mu_scaled: f64,
    pub argmin: f64,
}

/// Minimum of `phi(t) = |u| + |v|/beta` (unscaled) over the interval: dense
/// sampling plus golden-section refinement of the winning bracket. The
/// minimiser is not derivative-based because `phi` has kinks at u- and
/// v-zeros.
pub fn min_norm(iv: &RootInterval, src: &dyn StripSource, _cfg: &PrecisionConfig) -> Result<NormMin> {
    if !(iv.beta > 0.0) {
        return Err(Error::Domain("min_norm requires beta > 0".into()));
    }
    let phi = |s: &ScaledSample| (s.u.abs() + s.v.abs() / iv.beta) * s.m;
    let width = iv.t_right - iv.t_left;
    let dt = width / (DENSE_SAMPLES as f64 - 1.0);
    let dense = src.sweep(iv.beta, iv.t_left, dt, DENSE_SAMPLES)?;
    let mut best = f64::INFINITY;
    let mut best_i = 0usize;
    for (i, s) in dense.iter().enumerate() {
        let val = phi(s);
        if val < best {
            best = val;
            best_i = i;
        }
    }

    // golden-section inside the winning bracket
    let mut lo = dense[best_i.saturating_sub(1)].t;
    let mut hi = dense[(best_i + 1).min(DENSE_SAMPLES - 1)].t;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |t: f64| -> Result<f64> { Ok(phi(&src.sample(t, iv.beta)?)) };
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..60 {
        if hi - lo < 1e-10 * width.max(1.0) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = eval(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = eval(d)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    let fmid = eval(mid)?;
    let (mu, argmin) = if fmid < best { (fmid, mid) } else { (best, dense[best_i].t) };
    let m_left = src.m_scale(iv.t_left, iv.beta);
    Ok(NormMin { mu, mu_scaled: mu / m_left, argmin })
}

/// Fill the peak-valley fields of a root-interval and classify it.
///
/// The endpoint sign law is the one the structure demands: with `u > 0`
/// inside, `v(t_left) < 0` and `v(t_right) > 0` (mirrored for `u < 0`).
/// Extrema of `u` are counted through sign changes of `u_t` on the dense
/// grid; values below the noise floor are treated as plateau and collapse
/// into their neighbours.
pub fn verify_peak_valley(
    iv: RootInterval,
    src: &dyn StripSource,
    cfg: &PrecisionConfig,
) -> Result<RootInterval> {
    if !(iv.beta > 0.0) {
        return Err(Error::Domain("peak-valley verification requires beta > 0".into()));
    }
    let mut iv = iv;
    let s_left = src.sample(iv.t_left, iv.beta)?;
    let s_right = src.sample(iv.t_right, iv.beta)?;
    iv.v_left = s_left.v;
    iv.v_right = s_right.v;
    let noise = 3.0 * src.err_scaled();
    let sign = iv.u_sign_inside as f64;
    let signs_ok = iv.v_left * sign < -noise && iv.v_right * sign > noise;

    let width = iv.t_right - iv.t_left;
    let dt = width / (DENSE_SAMPLES as f64 + 1.0);
    let dense = src.sweep(iv.beta, iv.t_left + dt, dt, DENSE_SAMPLES)?;

    // count v sign changes across [left, interior..., right]
    let mut v_seq: Vec<f64> = Vec::with_capacity(DENSE_SAMPLES + 2);
    v_seq.push(iv.v_left);
    v_seq.extend(dense.iter().map(|s| s.v));
    v_seq.push(iv.v_right);
    let v_crossings = count_sign_changes(&v_seq, noise);

    // locate the inner v-zero by bisection when the endpoint signs differ
    iv.v_inner_zero = if iv.v_left * iv.v_right < 0.0 {
        Some(bisect_component(src, iv.beta, iv.t_left, iv.t_right, iv.v_left, |s| s.v)?)
    } else {
        None
    };

    // u-extrema via u_t sign changes strictly inside
    let ut_seq: Vec<f64> = dense.iter().map(|s| s.ut).collect();
    let flips = count_sign_changes(&ut_seq, noise);
    iv.extrema_count = flips.max(1);

    let norm = min_norm(&iv, src, cfg)?;
    iv.mu = norm.mu;
    iv.mu_scaled = norm.mu_scaled;

    iv.pv_verdict = if !signs_ok || iv.v_inner_zero.is_none() || v_crossings != 1 {
        PvVerdict::SignAnomaly
    } else if iv.extrema_count > 1 {
        PvVerdict::MultiPeakAnomaly
    } else if !(iv.mu > 0.0) {
        PvVerdict::SignAnomaly
    } else {
        PvVerdict::SinglePeakOk
    };
    Ok(iv)
}

fn count_sign_changes(values: &[f64], noise: f64) -> u32 {
    let mut count = 0u32;
    let mut last = 0i8;
    for &v in values {
        if v.abs() <= noise {
            continue; // plateau: collapse into the surrounding signs
        }
        let s = if v > 0.0 { 1i8 } else { -1i8 };
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn bisect_component(
    src: &dyn StripSource,
    beta: f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    pick: impl Fn(&ScaledSample) -> f64,
) -> Result<f64> {
    while b - a > ZERO_REFINE_TOL {
        let mid = 0.5 * (a + b);
        let fm = pick(&src.sample(mid, beta)?);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm * fa > 0.0 {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// The positivity functional `psi = u v_t - v u_t` (unscaled).
pub fn lagarias_psi(src: &dyn StripSource, t: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain("the positivity functional is defined for beta > 0".into()));
    }
    let s = src.sample(t, beta)?;
    Ok((s.u * s.vt - s.v * s.ut) * s.m * s.m)
}

/// The ratio form `Re(xi'/xi) = (u u_beta + v v_beta)/|xi|^2`; `None` when
/// `|xi|` sits below the noise floor and the sign is indeterminate.
pub fn lagarias_ratio(src: &dyn StripSource, t: f64, beta: f64) -> Result<Option<f64>> {
    if !(beta > 0.0) {
        return Err(Error::Domain("the positivity functional is defined for beta > 0".into()));
    }
    let s = src.sample(t, beta)?;
    let denom = s.u * s.u + s.v * s.v;
    let floor = 3.0 * src.err_scaled();
    if denom <= floor * floor {
        return Ok(None);
    }
    Ok(Some((s.u * s.ub + s.v * s.vb) / denom))
}

/// `|v(t, beta) + int_0^beta u_t(t, r) dr|` (unscaled), the imaginary part
/// reconstructed from the real one. The r-integral uses Gauss-Legendre with
/// `r_nodes` nodes.
pub fn lemma1_residual(
    src: &dyn StripSource,
    t: f64,
    beta: f64,
    r_nodes: u32,
    cfg: &PrecisionConfig,
) -> Result<f64> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::Domain(format!("lemma-1 residual needs beta in (0, 1/2], got {beta}")));
    }
    if r_nodes < 4 {
        return Err(Error::Domain(format!("r_nodes must be >= 4, got {r_nodes}")));
    }
    let _ = cfg;
    let rule = gauss_legendre(r_nodes, Prec::from_digits(20));
    let nodes: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| {
            let r = beta * (hp::to_f64(x) + 1.0) / 2.0;
            (r, hp::to_f64(w) * beta / 2.0)
        })
        .collect();
    let terms: Vec<f64> = parallel::try_map_indexed(nodes.len(), |i| {
        let (r, w) = nodes[i];
        let s = src.sample(t, r)?;
        Ok(w * s.ut * s.m)
    })?;
    let integral: f64 = terms.iter().sum();
    let s = src.sample(t, beta)?;
    Ok((s.v * s.m + integral).abs())
}

/// Zero count against the density main term.
#[derive(Clone, Copy, Debug)]
pub struct ZeroCountCheck {
    pub count: usize,
    pub main_term: f64,
    pub gap: f64,
    pub bound: f64,
}

impl ZeroCountCheck {
    pub fn pass(&self) -> bool {
        self.gap <= self.bound
    }
}

/// Count zeros of `u(., 0)` in `(0, T]` and compare with
/// `(T ln(T/2pi) - T)/2pi`; the gap must stay within `2 ln T`.
pub fn zero_count_check(
    src: &dyn StripSource,
    t_max: f64,
    cfg: &PrecisionConfig,
) -> Result<ZeroCountCheck> {
    if !(t_max > 1.0) {
        return Err(Error::Domain(format!("zero count needs T > 1, got {t_max}")));
    }
    let scan = find_u_zeros(src, 0.0, (0.0, t_max), cfg)?;
    let count = scan.zeros.iter().filter(|z| **z <= t_max).count();
    let two_pi = 2.0 * std::f64::consts::PI;
    let main_term = (t_max * (t_max / two_pi).ln() - t_max) / two_pi;
    let gap = (count as f64 - main_term).abs();
    Ok(ZeroCountCheck { count, main_term, gap, bound: 2.0 * t_max.ln() })
}

/// Which global checks a scan should run.
#[derive(Clone, Debug)]
pub struct CheckSet {
    pub peak_valley: bool,
    /// Step of the positivity grid, if requested.
    pub lagarias_step: Option<f64>,
    /// Number of seeded lemma-1 residual samples, if requested.
    pub lemma1_samples: Option<u32>,
    /// Height for the zero-count comparison, if requested.
    pub zero_count_t: Option<f64>,
}

impl Default for CheckSet {
    fn default() -> Self {
        CheckSet { peak_valley: true, lagarias_step: None, lemma1_samples: None, zero_count_t: None }
    }
}

/// Pass/fail plus the worst-case margin of one named check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CheckOutcome {
    pub pass: bool,
    pub margin: f64,
}

/// A structured anomaly or diagnostic record.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub kind: String,
    pub beta: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub message: String,
}

/// Full record of one scan.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub source: String,
    pub beta_list: Vec<f64>,
    pub t_range: (f64, f64),
    pub fixture_epsilon: Option<f64>,
    pub config: PrecisionConfig,
    pub intervals: Vec<RootInterval>,
    pub checks: BTreeMap<String, CheckOutcome>,
    pub failures: Vec<Failure>,
}

/// How a scan outcome maps onto the process exit contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitClass {
    /// Everything passed.
    Clean,
    /// A check failed numerically (identity out of tolerance etc.).
    NumericFailure,
    /// A structural anomaly: a candidate counterexample.
    StructuralAnomaly,
}

impl ScanReport {
    pub fn exit_class(&self) -> ExitClass {
        let structural = self.failures.iter().any(|f| {
            matches!(
                f.kind.as_str(),
                "sign_anomaly" | "multi_peak_anomaly" | "mu_nonpositive" | "lagarias_nonpositive"
            )
        });
        if structural {
            return ExitClass::StructuralAnomaly;
        }
        if self.checks.values().any(|c| !c.pass) {
            return ExitClass::NumericFailure;
        }
        ExitClass::Clean
    }
}

/// Run the full pipeline over each beta: zeros, intervals, peak-valley
/// verification, plus the requested global checks. Output is deterministic:
/// the work is chunked independently of the thread count and merged in
/// ascending order.
pub fn scan_range(
    src: &dyn StripSource,
    beta_list: &[f64],
    t_range: (f64, f64),
    checks: &CheckSet,
    cfg: &PrecisionConfig,
) -> Result<ScanReport> {
    let (t0, t1) = t_range;
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::Domain(format!("invalid scan range [{t0}, {t1}]")));
    }
    for &b in beta_list {
        if !(0.0..=0.5).contains(&b) {
            return Err(Error::Domain(format!("scan beta must lie in [0, 1/2], got {b}")));
        }
    }
    src.check_height(t1)?;

    let mut intervals = Vec::new();
    let mut failures = Vec::new();
    let mut checks_out: BTreeMap<String, CheckOutcome> = BTreeMap::new();
    let mut min_mu_scaled = f64::INFINITY;
    let mut any_pv = false;

    for &beta in beta_list {
        let scan = find_u_zeros(src, beta, t_range, cfg)?;
        for nm in &scan.near_misses {
            failures.push(Failure {
                kind: "near_miss".into(),
                beta,
                t_lo: nm.t,
                t_hi: nm.t,
                message: format!("|u| dips to {:e} (scaled) without a sign change", nm.u_scaled),
            });
        }
        let built = build_root_intervals(&scan.zeros, src, beta, cfg)?;
        if beta > 0.0 && checks.peak_valley {
            any_pv = true;
            let verified: Vec<RootInterval> = parallel::try_map_indexed(built.len(), |i| {
                verify_peak_valley(built[i].clone(), src, cfg)
            })?;
            for iv in &verified {
                if iv.pv_verdict != PvVerdict::SinglePeakOk {
                    failures.push(Failure {
                        kind: iv.pv_verdict.to_string(),
                        beta,
                        t_lo: iv.t_left,
                        t_hi: iv.t_right,
                        message: format!(
                            "interval [{:.6}, {:.6}]: verdict {}, v_left = {:e}, v_right = {:e}, extrema = {}, mu = {:e}",
                            iv.t_left,
                            iv.t_right,
                            iv.pv_verdict,
                            iv.v_left,
                            iv.v_right,
                            iv.extrema_count,
                            iv.mu
                        ),
                    });
                }
                if !(iv.mu > 0.0) {
                    failures.push(Failure {
                        kind: "mu_nonpositive".into(),
                        beta,
                        t_lo: iv.t_left,
                        t_hi: iv.t_right,
                        message: format!("norm minimum mu = {:e}", iv.mu),
                    });
                }
                min_mu_scaled = min_mu_scaled.min(iv.mu_scaled);
            }
            intervals.extend(verified);
        } else {
            intervals.extend(built);
        }
    }

    if any_pv {
        checks_out.insert(
            "min_mu_scaled".into(),
            CheckOutcome {
                pass: min_mu_scaled.is_finite() && min_mu_scaled > 0.0,
                margin: if min_mu_scaled.is_finite() { min_mu_scaled } else { 0.0 },
            },
        );
    }

    if let Some(step) = checks.lagarias_step {
        if !(step > 0.0) {
            return Err(Error::Domain(format!("lagarias grid step must be positive, got {step}")));
        }
        let mut worst = f64::INFINITY;
        let mut worst_at = (0.0, 0.0);
        for &beta in beta_list.iter().filter(|b| **b > 0.0) {
            let count = ((t1 - t0) / step).floor() as usize + 1;
            let sweep = src.sweep(beta, t0, step, count)?;
            for s in &sweep {
                let psi_scaled = s.u * s.vt - s.v * s.ut;
                if psi_scaled < worst {
                    worst = psi_scaled;
                    worst_at = (beta, s.t);
                }
            }
        }
        let pass = worst.is_finite() && worst > 0.0;
        if !pass && worst.is_finite() {
            failures.push(Failure {
                kind: "lagarias_nonpositive".into(),
                beta: worst_at.0,
                t_lo: worst_at.1,
                t_hi: worst_at.1,
                message: format!("u v_t - v u_t = {worst:e} (scaled) at the grid point"),
            });
        }
        checks_out.insert(
            "lagarias".into(),
            CheckOutcome { pass, margin: if worst.is_finite() { worst } else { 0.0 } },
        );
    }

    if let Some(n) = checks.lemma1_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(LEMMA1_SEED);
        let mut worst = 0.0f64;
        for _ in 0..n {
            let t = rng.gen_range(t0..t1);
            let beta = rng.gen_range(0.05..=0.5);
            let resid = lemma1_residual(src, t, beta, 10, cfg)?;
            let scaled = resid / src.m_scale(t, beta);
            worst = worst.max(scaled);
        }
        checks_out.insert("lemma1".into(), CheckOutcome { pass: worst < 1e-12, margin: worst });
    }

    if let Some(t_zc) = checks.zero_count_t {
        let zc = zero_count_check(src, t_zc, cfg)?;
        checks_out
            .insert("zero_count".into(), CheckOutcome { pass: zc.pass(), margin: zc.bound - zc.gap });
    }

    Ok(ScanReport {
        source: src.name().to_string(),
        beta_list: beta_list.to_vec(),
        t_range,
        fixture_epsilon: None,
        config: cfg.clone(),
        intervals,
        checks: checks_out,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fixture(eps: f64) -> SyntheticSource {
        SyntheticSource::new(SyntheticModel::new(eps).unwrap())
    }

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::new(30).unwrap()
    }

    /// The fixture's close zero pairs near 2 pi are narrower than the
    /// default bracketing step, so fixture scans refine the grid.
    fn fine_cfg() -> PrecisionConfig {
        let mut c = PrecisionConfig::new(30).unwrap();
        c.grid_factor = 40.0;
        c
    }

    #[test]
    fn fixture_zeros_match_closed_form() {
        let src = fixture(0.01);
        let scan = find_u_zeros(&src, 0.2, (5.5, 7.5), &cfg()).unwrap();
        // 2 pi -+ arccos(0.99 / cosh 0.2)
        let theta = (0.99f64 / 0.2f64.cosh()).acos();
        assert_eq!(scan.zeros.len(), 2, "zeros: {:?}", scan.zeros);
        assert!((scan.zeros[0] - (2.0 * PI - theta)).abs() < 1e-8);
        assert!((scan.zeros[1] - (2.0 * PI + theta)).abs() < 1e-8);
    }

    #[test]
    fn fixture_empty_range() {
        let src = fixture(0.01);
        // u < 0 everywhere on [2, 4] at beta = 0.2
        let scan = find_u_zeros(&src, 0.2, (2.0, 4.0), &cfg()).unwrap();
        assert!(scan.zeros.is_empty());
        let built = build_root_intervals(&scan.zeros, &src, 0.2, &cfg()).unwrap();
        assert!(built.is_empty());
    }

    #[test]
    fn fixture_interval_and_verdict() {
        let src = fixture(0.01);
        let scan = find_u_zeros(&src, 0.2, (5.5, 7.5), &cfg()).unwrap();
        let built = build_root_intervals(&scan.zeros, &src, 0.2, &cfg()).unwrap();
        assert_eq!(built.len(), 1);
        assert_eq!(built[0].u_sign_inside, 1);
        let iv = verify_peak_valley(built[0].clone(), &src, &cfg()).unwrap();
        assert_eq!(iv.pv_verdict, PvVerdict::SinglePeakOk);
        assert!(iv.v_left < 0.0 && iv.v_right > 0.0);
        let inner = iv.v_inner_zero.expect("inner v-zero");
        assert!((inner - 2.0 * PI).abs() < 1e-6);
        assert_eq!(iv.extrema_count, 1);
        // mu = eps + (cosh 0.2 - 1), attained at t = 2 pi
        assert!((iv.mu - 0.030066755619075846).abs() < 1e-7, "mu = {}", iv.mu);
        assert_eq!(iv.mu, iv.mu_scaled);
    }

    #[test]
    fn fixture_double_root_case() {
        // eps = 0: double root at beta = 0 but a clean interval for beta > 0
        let src = fixture(0.0);
        let scan = find_u_zeros(&src, 0.2, (5.5, 7.5), &fine_cfg()).unwrap();
        assert_eq!(scan.zeros.len(), 2);
        let halfwidth = (1.0 / 0.2f64.cosh()).acos();
        assert!((scan.zeros[0] - (2.0 * PI - halfwidth)).abs() < 1e-8);
        let built = build_root_intervals(&scan.zeros, &src, 0.2, &fine_cfg()).unwrap();
        let iv = verify_peak_valley(built[0].clone(), &src, &fine_cfg()).unwrap();
        assert_eq!(iv.pv_verdict, PvVerdict::SinglePeakOk);
        assert!((iv.mu - (0.2f64.cosh() - 1.0)).abs() < 1e-7);
    }

    #[test]
    fn fixture_interval_enlarges_with_beta() {
        let src0 = fixture(0.01);
        let z0 = find_u_zeros(&src0, 0.0, (5.5, 7.5), &fine_cfg()).unwrap().zeros;
        let z2 = find_u_zeros(&src0, 0.2, (5.5, 7.5), &fine_cfg()).unwrap().zeros;
        let w0 = z0[1] - z0[0];
        let w2 = z2[1] - z2[0];
        assert!((w0 - 0.28307894664885444).abs() < 1e-7);
        assert!((w2 - 0.48679548123668576).abs() < 1e-7);
        assert!(w2 > w0);
    }

    #[test]
    fn fixture_lagarias_closed_form() {
        let src = fixture(0.01);
        let at_peak = lagarias_psi(&src, 2.0 * PI, 0.2).unwrap();
        assert!((at_peak - 0.006053520385724707).abs() < 1e-12);
        // positive wherever beta > 0 for this model
        for t in [5.0, 6.0, 7.0, 9.42] {
            assert!(lagarias_psi(&src, t, 0.35).unwrap() > 0.0);
        }
        assert!(lagarias_psi(&src, 1.0, 0.0).is_err());
    }

    #[test]
    fn fixture_lemma1_exact() {
        let src = fixture(0.01);
        let c = cfg();
        for (t, b) in [(6.0, 0.2), (2.5, 0.5), (7.1, 0.35)] {
            let r = lemma1_residual(&src, t, b, 10, &c).unwrap();
            assert!(r < 1e-14, "residual {r:e} at ({t}, {b})");
        }
        assert!(lemma1_residual(&src, 6.0, 0.0, 10, &c).is_err());
        assert!(lemma1_residual(&src, 6.0, 0.2, 3, &c).is_err());
    }

    #[test]
    fn corrupted_fixture_flags_anomalies() {
        let src = SyntheticSource::new(SyntheticModel::corrupted(0.01).unwrap());
        let report = scan_range(
            &src,
            &[0.2],
            (5.5, 7.5),
            &CheckSet { lagarias_step: Some(0.05), ..CheckSet::default() },
            &cfg(),
        )
        .unwrap();
        assert_eq!(report.exit_class(), ExitClass::StructuralAnomaly);
        assert!(report.failures.iter().any(|f| f.kind == "sign_anomaly"));
        assert!(report.failures.iter().any(|f| f.kind == "lagarias_nonpositive"));
    }

    #[test]
    fn fixture_scan_report_clean() {
        let src = fixture(0.01);
        let report = scan_range(
            &src,
            &[0.2],
            (5.5, 7.5),
            &CheckSet { lagarias_step: Some(0.05), lemma1_samples: Some(5), ..CheckSet::default() },
            &cfg(),
        )
        .unwrap();
        assert_eq!(report.exit_class(), ExitClass::Clean);
        assert_eq!(report.intervals.len(), 1);
        assert!((report.intervals[0].mu - 0.030066755619075846).abs() < 1e-7);
        assert!(report.checks["lagarias"].pass);
        assert!(report.checks["lemma1"].pass);
        assert!(report.checks["min_mu_scaled"].pass);
    }

    #[test]
    fn empty_beta_list_is_a_clean_report() {
        let src = fixture(0.01);
        let report =
            scan_range(&src, &[], (5.5, 7.5), &CheckSet::default(), &cfg()).unwrap();
        assert_eq!(report.exit_class(), ExitClass::Clean);
        assert!(report.intervals.is_empty());
    }

    #[test]
    fn scan_rejects_bad_input() {
        let src = fixture(0.01);
        assert!(scan_range(&src, &[0.2], (7.5, 5.5), &CheckSet::default(), &cfg()).is_err());
        assert!(scan_range(&src, &[0.7], (5.5, 7.5), &CheckSet::default(), &cfg()).is_err());
        assert!(find_u_zeros(&src, -0.1, (5.5, 7.5), &cfg()).is_err());
    }

    #[test]
    fn interval_tiling_is_exact() {
        // intervals share endpoints and alternate interior sign
        let src = fixture(0.3); // eps large: zeros of cosh(b)cos t = 0.7
        let scan = find_u_zeros(&src, 0.25, (1.0, 14.0), &cfg()).unwrap();
        let built = build_root_intervals(&scan.zeros, &src, 0.25, &cfg()).unwrap();
        assert!(built.len() >= 3);
        for w in built.windows(2) {
            assert_eq!(w[0].t_right, w[1].t_left);
            assert_eq!(w[0].u_sign_inside, -w[1].u_sign_inside);
        }
    }
}
