//! The symmetric kernel transform of the decay function: evaluation of
//! `xi(tau) = K(f) = int_1^inf (x^{tau/2} + x^{-tau/2}) x^{-3/4} f(x) dx`
//! and its first two tau-derivatives on the shifted strip `tau = beta + it`.
//!
//! The substitution `x = e^{2w}` turns the oscillation into `cos(t w)` with
//! period `2pi/t`, integrated by fixed-order Gauss-Legendre panels of length
//! `min(pi/(2t), 1/2)`. With `tau = beta + it`,
//!
//! ```text
//!   u       = 2 sum g_i cosh(beta w_i) cos(t w_i)
//!   v       = 2 sum g_i sinh(beta w_i) sin(t w_i)
//!   u_beta  = 2 sum g_i w_i sinh(beta w_i) cos(t w_i)
//!   v_beta  = 2 sum g_i w_i cosh(beta w_i) sin(t w_i)
//!   u_bb    = 2 sum g_i w_i^2 cosh(beta w_i) cos(t w_i)
//!   v_bb    = 2 sum g_i w_i^2 sinh(beta w_i) sin(t w_i)
//! ```
//!
//! with `g_i` the panel weights times `2 e^{w/2} f(e^{2w})`. On the critical
//! line (`beta = 0`) every `sinh` factor vanishes identically, so `v`,
//! `u_beta` and `v_bb` come out as exact zeros rather than as cancellation
//! residue.
//!
//! The oscillatory factors are advanced across panels by a rotation
//! recurrence: panels are congruent, so nodes at a fixed panel offset form
//! arithmetic progressions in `w` and only the first panel needs direct
//! sin/cos calls.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use astro_float::BigFloat;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::gauss::gauss_legendre;
use crate::hp::{self, Prec, RM};
use crate::precision::PrecisionConfig;
use crate::theta;

/// Fixed sweep chunk length. Chunks re-seed the rotation recurrence from
/// direct sin/cos, and the chunk layout is independent of thread count so
/// sweep output is bit-stable under any parallelism.
pub(crate) const SWEEP_CHUNK: usize = 256;

/// A point `tau = beta + it` of the shifted critical strip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripPoint {
    beta: f64,
    t: f64,
}

impl StripPoint {
    pub fn new(beta: f64, t: f64) -> Result<Self> {
        if !(beta.is_finite() && beta.abs() <= 0.5) {
            return Err(Error::Domain(format!("beta must lie in [-1/2, 1/2], got {beta}")));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
        }
        Ok(StripPoint { beta, t })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `xi` at a strip point, with the display scale and an error bound.
#[derive(Clone, Debug)]
pub struct XiValue {
    pub point: StripPoint,
    pub u: BigFloat,
    pub v: BigFloat,
    pub m_scale: BigFloat,
    pub u_scaled: f64,
    pub v_scaled: f64,
    pub err_estimate: f64,
}

/// First or second tau-derivative of `xi` at a strip point.
#[derive(Clone, Debug)]
pub struct DerivativeValue {
    pub point: StripPoint,
    pub order: u8,
    pub re: BigFloat,
    pub im: BigFloat,
    pub err_estimate: f64,
}

/// Tail-bound model `exp(amp_ln + (power + beta/2) ln x - rate x)` for the
/// integral remainder past the truncation point.
#[derive(Clone, Copy, Debug)]
pub struct TailModel {
    pub amp_ln: f64,
    pub power: f64,
    pub rate: f64,
}

impl TailModel {
    fn bound_ln(&self, x: f64, beta: f64) -> f64 {
        self.amp_ln + (self.power + beta / 2.0) * x.ln() - self.rate * x
    }
}

type KernelEval = dyn Fn(&BigFloat, &PrecisionConfig) -> Result<BigFloat> + Send + Sync;

/// A fast-decay integrand for the kernel transform, with its decay
/// certificate `|g(x)| <= A e^{-c x}` for `x >= 1`.
#[derive(Clone)]
pub struct KernelFunction {
    name: String,
    decay_c: f64,
    decay_a: f64,
    tail: TailModel,
    eval: Arc<KernelEval>,
}

impl std::fmt::Debug for KernelFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelFunction")
            .field("name", &self.name)
            .field("decay_c", &self.decay_c)
            .field("decay_a", &self.decay_a)
            .finish()
    }
}

impl KernelFunction {
    /// Wrap an integrand with its decay certificate. The bound is spot-checked
    /// at x in {1, 2, 5, 10, 20}; a violation is a contract error.
    pub fn new(
        name: impl Into<String>,
        decay_c: f64,
        decay_a: f64,
        eval: Arc<KernelEval>,
    ) -> Result<Self> {
        let name = name.into();
        if !(decay_c > 0.0) {
            return Err(Error::Domain(format!("decay rate must be positive, got {decay_c}")));
        }
        let tail = TailModel { amp_ln: (2.0 * decay_a / decay_c).ln(), power: -0.75, rate: decay_c };
        let kf = KernelFunction { name, decay_c, decay_a, tail, eval };
        kf.check_decay()?;
        Ok(kf)
    }

    fn check_decay(&self) -> Result<()> {
        let cfg = PrecisionConfig::new(30)?;
        for &x in &[1.0f64, 2.0, 5.0, 10.0, 20.0] {
            let v = hp::to_f64(&(self.eval)(&hp::real(x, cfg.prec()), &cfg)?).abs();
            let bound = self.decay_a * (-self.decay_c * x).exp();
            if v > bound * (1.0 + 1e-9) {
                return Err(Error::Contract(format!(
                    "kernel '{}' breaks its decay bound at x = {x}: |g| = {v:e} > {bound:e}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// The theta-series decay kernel `f(x) = 2x^2 psi'' + 3x psi'`.
    /// Its sharper tail model `5 pi^2 x^{5/4 + beta/2} e^{-pi x}` replaces the
    /// generic envelope.
    pub fn theta() -> Self {
        let mut kf = KernelFunction::new(
            "theta",
            2.5,
            30.0,
            Arc::new(|x: &BigFloat, cfg: &PrecisionConfig| theta::f_decay(x, cfg)),
        )
        .expect("theta kernel satisfies its decay certificate");
        kf.tail = TailModel {
            amp_ln: (5.0 * std::f64::consts::PI * std::f64::consts::PI).ln(),
            power: 1.25,
            rate: std::f64::consts::PI,
        };
        kf
    }

    /// The reference kernel `g(x) = e^{-x}` used in tests.
    pub fn exp_neg() -> Self {
        KernelFunction::new(
            "exp-neg",
            1.0,
            1.0,
            Arc::new(|x: &BigFloat, cfg: &PrecisionConfig| {
                Ok(hp::exp(&x.neg(), cfg.prec()))
            }),
        )
        .expect("e^{-x} satisfies its decay certificate")
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// The display scale `M = 8 max(t/2, 1)^{23/12 + beta/6} e^{-t pi/4}`.
///
/// The power base is clamped at 1 below t = 2, where no scaling is needed.
pub fn scale_m(t: f64, beta: f64, p: Prec) -> BigFloat {
    let b = p.bits();
    let base = hp::real((t / 2.0).max(1.0), p);
    let expo = hp::ratio(23, 12, p).add(&hp::real(beta, p).mul(&hp::ratio(1, 6, p), b, RM), b, RM);
    let pow = hp::exp(&expo.mul(&hp::ln(&base, p), b, RM), p);
    let decay = hp::exp(
        &hp::real(t, p).mul(&hp::pi(p), b, RM).mul(&hp::ratio(-1, 4, p), b, RM),
        p,
    );
    hp::from_u64(8, p).mul(&pow, b, RM).mul(&decay, b, RM)
}

/// Raw accumulated sums of one evaluation (unscaled, full precision).
#[derive(Clone, Debug)]
pub struct RawEval {
    pub u: BigFloat,
    pub v: BigFloat,
    pub ub: BigFloat,
    pub vb: BigFloat,
    pub ubb: BigFloat,
    pub vbb: BigFloat,
}

/// One strip sample scaled by `M(t, beta)`, for scan-level logic.
#[derive(Clone, Copy, Debug)]
pub struct ScaledSample {
    pub t: f64,
    pub beta: f64,
    /// `M(t, beta)` itself.
    pub m: f64,
    pub u: f64,
    pub v: f64,
    /// `u_t = -v_beta` (Cauchy-Riemann).
    pub ut: f64,
    /// `v_t = u_beta`.
    pub vt: f64,
    pub ub: f64,
    pub vb: f64,
    pub ubb: f64,
    pub vbb: f64,
    /// Scaled error bound for `u` and `v`.
    pub err: f64,
}

const ORDER_0: u8 = 1;
const ORDER_1: u8 = 2;
const ORDER_2: u8 = 4;

/// Hyperbolic weight vectors for one |beta|; the sinh-side vectors are
/// absent at beta = 0 so those components are identically zero.
struct BetaWeights {
    a0: Vec<BigFloat>, // g cosh
    b1: Vec<BigFloat>, // g w cosh
    a2: Vec<BigFloat>, // g w^2 cosh
    sinh_side: Option<SinhWeights>,
}

struct SinhWeights {
    b0: Vec<BigFloat>, // g sinh
    a1: Vec<BigFloat>, // g w sinh
    b2: Vec<BigFloat>, // g w^2 sinh
}

/// Reusable quadrature state for one kernel, precision and height cap.
pub struct XiEvaluator {
    cfg: PrecisionConfig,
    p: Prec,
    kernel: KernelFunction,
    t_cap: f64,
    x_max: f64,
    panel_h: f64,
    gl_n: usize,
    w_nodes: Vec<BigFloat>,
    g: Vec<BigFloat>,
    w_cap: f64,
    /// Absolute error bound for the order-0 sums (tail + quadrature + series).
    err0: f64,
    /// Reduced precision for the display scale when it only feeds f64
    /// outputs; 20 digits keep its relative error far below f64 resolution.
    p_scale: Prec,
    beta_cache: Mutex<HashMap<u64, Arc<BetaWeights>>>,
}

impl XiEvaluator {
    /// Evaluator for the Riemann kernel (theta decay function).
    pub fn new(cfg: PrecisionConfig, t_cap: f64) -> Result<Self> {
        Self::with_kernel(KernelFunction::theta(), cfg, t_cap)
    }

    /// Evaluator for an arbitrary fast-decay kernel.
    pub fn with_kernel(kernel: KernelFunction, cfg: PrecisionConfig, t_cap: f64) -> Result<Self> {
        cfg.validate()?;
        if !(t_cap.is_finite() && t_cap >= 0.0) {
            return Err(Error::Domain(format!("height cap must be >= 0, got {t_cap}")));
        }
        cfg.check_height(t_cap)?;
        let p = cfg.prec();
        let b = p.bits();

        // truncation point: push the analytic tail bound below 10^-digits * M
        let ln10 = std::f64::consts::LN_10;
        let m_ln = ln_scale_m(t_cap, -0.5);
        let target_ln = -(cfg.digits as f64) * ln10 + m_ln;
        let mut x_max = (t_cap / 4.0 + 40.0).max(cfg.x_max);
        for _ in 0..64 {
            let excess = kernel.tail.bound_ln(x_max, 0.5) - target_ln;
            if excess <= 0.0 {
                break;
            }
            x_max += excess / kernel.tail.rate + 1.0;
        }
        if kernel.tail.bound_ln(x_max, 0.5) > target_ln {
            return Err(Error::Numerical("could not satisfy the tail bound".into()));
        }

        let w_cap = x_max.ln() / 2.0;
        let panel_h = (std::f64::consts::PI / (2.0 * t_cap.max(1.0))).min(0.5);
        let n_panels = (w_cap / panel_h).ceil() as usize;
        let gl_n = cfg.nodes_per_halfperiod as usize;
        let rule = gauss_legendre(gl_n as u32, p);

        let half = hp::ratio(1, 2, p);
        let h_r = hp::real(panel_h, p);
        let two = hp::from_u64(2, p);
        let mut w_nodes = Vec::with_capacity(n_panels * gl_n);
        let mut g = Vec::with_capacity(n_panels * gl_n);
        let mut sum_abs_g = 0.0f64;
        for k in 0..n_panels {
            let k_r = hp::from_u64(k as u64, p);
            for j in 0..gl_n {
                // w = h (k + (node+1)/2)
                let z = rule.nodes[j].add(&hp::one(p), b, RM).mul(&half, b, RM);
                let w = h_r.mul(&k_r.add(&z, b, RM), b, RM);
                let x = hp::exp(&w.mul(&two, b, RM), p);
                let fx = (kernel.eval)(&x, &cfg)?;
                // g = glw * h/2 * 2 e^{w/2} f(e^{2w})
                let weight = rule.weights[j]
                    .mul(&h_r, b, RM)
                    .mul(&hp::exp(&w.mul(&half, b, RM), p), b, RM)
                    .mul(&fx, b, RM);
                sum_abs_g += hp::to_f64(&weight).abs();
                w_nodes.push(w);
                g.push(weight);
            }
        }
        // error model: analytic tail + Gauss-Legendre panel bound + series
        // truncation of the kernel values
        let tail = kernel.tail.bound_ln(x_max, 0.5).exp();
        let quad = {
            // C_n = (n!)^4 / ((2n+1) ((2n)!)^3), applied to (h t)^{2n} <= (pi/2)^{2n}
            let n = gl_n as f64;
            let ln_fact = |m: f64| -> f64 { (1..=(m as u64)).map(|i| (i as f64).ln()).sum() };
            let ln_cn = 4.0 * ln_fact(n) - 3.0 * ln_fact(2.0 * n) - (2.0 * n + 1.0).ln();
            let ln_osc = 2.0 * n * (std::f64::consts::PI / 2.0).ln();
            (ln_cn + ln_osc).exp() * sum_abs_g * 4.0
        };
        let series = sum_abs_g * 10f64.powf(-(cfg.series_eps_exponent as f64).min(290.0));
        let err0 = tail + quad + series;

        Ok(XiEvaluator {
            cfg,
            p,
            kernel,
            t_cap,
            x_max,
            panel_h,
            gl_n,
            w_nodes,
            g,
            w_cap,
            err0,
            p_scale: Prec::from_digits(20),
            beta_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn cfg(&self) -> &PrecisionConfig {
        &self.cfg
    }

    pub fn t_cap(&self) -> f64 {
        self.t_cap
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn node_count(&self) -> usize {
        self.w_nodes.len()
    }

    pub fn kernel_name(&self) -> &str {
        self.kernel.name()
    }

    /// Absolute error bound for order-`k` component sums.
    pub fn err_bound(&self, order: u8) -> f64 {
        self.err0 * self.w_cap.max(1.0).powi(order as i32) * 2.0
    }

    pub fn m_scale(&self, t: f64, beta: f64) -> BigFloat {
        scale_m(t, beta, self.p)
    }

    fn check_point(&self, t: f64, beta: f64) -> Result<()> {
        if !(beta.is_finite() && beta.abs() <= 0.5) {
            return Err(Error::Domain(format!("beta must lie in [-1/2, 1/2], got {beta}")));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
        }
        if t > self.t_cap * (1.0 + 1e-12) + 1e-9 {
            return Err(Error::Domain(format!(
                "t = {t} exceeds the evaluator height cap {}",
                self.t_cap
            )));
        }
        Ok(())
    }

    fn beta_weights(&self, beta: f64) -> Arc<BetaWeights> {
        let key = beta.abs().to_bits();
        if let Some(hit) = self.beta_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let built = Arc::new(self.build_beta_weights(beta.abs()));
        let mut cache = self.beta_cache.lock().unwrap();
        // one-off beta values (integration nodes, random samples) must not
        // pile up: a flush keeps the hot scan betas cheap to rebuild
        if cache.len() >= 32 {
            cache.clear();
        }
        cache.entry(key).or_insert(built).clone()
    }

    fn build_beta_weights(&self, beta_abs: f64) -> BetaWeights {
        let p = self.p;
        let b = p.bits();
        let n = self.w_nodes.len();
        let mut a0 = Vec::with_capacity(n);
        let mut b1 = Vec::with_capacity(n);
        let mut a2 = Vec::with_capacity(n);
        if beta_abs == 0.0 {
            for i in 0..n {
                let gw = self.g[i].mul(&self.w_nodes[i], b, RM);
                a0.push(self.g[i].clone());
                a2.push(gw.mul(&self.w_nodes[i], b, RM));
                b1.push(gw);
            }
            return BetaWeights { a0, b1, a2, sinh_side: None };
        }
        let beta_r = hp::real(beta_abs, p);
        let mut b0 = Vec::with_capacity(n);
        let mut a1 = Vec::with_capacity(n);
        let mut b2 = Vec::with_capacity(n);
        for i in 0..n {
            let bw = beta_r.mul(&self.w_nodes[i], b, RM);
            let ch = hp::cosh(&bw, p);
            let sh = hp::sinh(&bw, p);
            let g_ch = self.g[i].mul(&ch, b, RM);
            let g_sh = self.g[i].mul(&sh, b, RM);
            let w = &self.w_nodes[i];
            a0.push(g_ch.clone());
            b0.push(g_sh.clone());
            a1.push(g_sh.mul(w, b, RM));
            b1.push(g_ch.mul(w, b, RM));
            a2.push(g_ch.mul(w, b, RM).mul(w, b, RM));
            b2.push(g_sh.mul(w, b, RM).mul(w, b, RM));
        }
        BetaWeights { a0, b1, a2, sinh_side: Some(SinhWeights { b0, a1, b2 }) }
    }

    /// cos/sin of `scale * w_i` for every node: direct calls on the first
    /// panel, then a rotation by `scale * h` per panel.
    fn unit_vectors(&self, scale: f64) -> (Vec<BigFloat>, Vec<BigFloat>) {
        let p = self.p;
        let b = p.bits();
        let n = self.w_nodes.len();
        let gl = self.gl_n;
        let scale_r = hp::real(scale, p);
        let mut c = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        for j in 0..gl.min(n) {
            let th = scale_r.mul(&self.w_nodes[j], b, RM);
            c.push(hp::cos(&th, p));
            s.push(hp::sin(&th, p));
        }
        if n > gl {
            let th_h = scale_r.mul(&hp::real(self.panel_h, p), b, RM);
            let ch = hp::cos(&th_h, p);
            let sh = hp::sin(&th_h, p);
            for i in gl..n {
                let (pc, ps) = (&c[i - gl], &s[i - gl]);
                let nc = pc.mul(&ch, b, RM).sub(&ps.mul(&sh, b, RM), b, RM);
                let ns = ps.mul(&ch, b, RM).add(&pc.mul(&sh, b, RM), b, RM);
                c.push(nc);
                s.push(ns);
            }
        }
        (c, s)
    }

    fn accumulate(
        &self,
        bw: &BetaWeights,
        sinh_sign: f64,
        c: &[BigFloat],
        s: &[BigFloat],
        orders: u8,
    ) -> RawEval {
        let p = self.p;
        let b = p.bits();
        let two = hp::from_u64(2, p);
        let zero = || hp::zero(p);
        let mut u = zero();
        let mut v = zero();
        let mut ub = zero();
        let mut vb = zero();
        let mut ubb = zero();
        let mut vbb = zero();
        let n = c.len();
        for i in 0..n {
            if orders & ORDER_0 != 0 {
                u = u.add(&bw.a0[i].mul(&c[i], b, RM), b, RM);
            }
            if orders & ORDER_1 != 0 {
                vb = vb.add(&bw.b1[i].mul(&s[i], b, RM), b, RM);
            }
            if orders & ORDER_2 != 0 {
                ubb = ubb.add(&bw.a2[i].mul(&c[i], b, RM), b, RM);
            }
            if let Some(sw) = &bw.sinh_side {
                if orders & ORDER_0 != 0 {
                    v = v.add(&sw.b0[i].mul(&s[i], b, RM), b, RM);
                }
                if orders & ORDER_1 != 0 {
                    ub = ub.add(&sw.a1[i].mul(&c[i], b, RM), b, RM);
                }
                if orders & ORDER_2 != 0 {
                    vbb = vbb.add(&sw.b2[i].mul(&s[i], b, RM), b, RM);
                }
            }
        }
        let sign = hp::real(sinh_sign, p);
        RawEval {
            u: u.mul(&two, b, RM),
            v: v.mul(&two, b, RM).mul(&sign, b, RM),
            ub: ub.mul(&two, b, RM).mul(&sign, b, RM),
            vb: vb.mul(&two, b, RM),
            ubb: ubb.mul(&two, b, RM),
            vbb: vbb.mul(&two, b, RM).mul(&sign, b, RM),
        }
    }

    fn eval_raw(&self, t: f64, beta: f64, orders: u8) -> Result<RawEval> {
        self.check_point(t, beta)?;
        let bw = self.beta_weights(beta);
        let sign = if beta < 0.0 { -1.0 } else { 1.0 };
        let (c, s) = self.unit_vectors(t);
        Ok(self.accumulate(&bw, sign, &c, &s, orders))
    }

    fn scaled_from_raw(&self, raw: &RawEval, t: f64, beta: f64) -> ScaledSample {
        let b = self.p.bits();
        let m = scale_m(t, beta, self.p_scale);
        let div = |x: &BigFloat| hp::to_f64(&x.div(&m, b, RM));
        let m_f = hp::to_f64(&m);
        let (u, v) = (div(&raw.u), div(&raw.v));
        let (ub, vb) = (div(&raw.ub), div(&raw.vb));
        let (ubb, vbb) = (div(&raw.ubb), div(&raw.vbb));
        ScaledSample {
            t,
            beta,
            m: m_f,
            u,
            v,
            ut: -vb,
            vt: ub,
            ub,
            vb,
            ubb,
            vbb,
            err: self.err_bound(0) / m_f,
        }
    }

    /// One fully scaled sample (orders 0 and 1).
    pub fn sample(&self, t: f64, beta: f64) -> Result<ScaledSample> {
        let raw = self.eval_raw(t, beta, ORDER_0 | ORDER_1)?;
        Ok(self.scaled_from_raw(&raw, t, beta))
    }

    /// Scaled sample including the second derivative sums.
    pub fn sample_with_second(&self, t: f64, beta: f64) -> Result<ScaledSample> {
        let raw = self.eval_raw(t, beta, ORDER_0 | ORDER_1 | ORDER_2)?;
        Ok(self.scaled_from_raw(&raw, t, beta))
    }

    /// Scaled `u` only; the fast path for bracketing and bisection.
    pub fn sample_u(&self, t: f64, beta: f64) -> Result<f64> {
        let raw = self.eval_raw(t, beta, ORDER_0)?;
        let m = self.m_scale(t, beta);
        Ok(hp::to_f64(&raw.u.div(&m, self.p.bits(), RM)))
    }

    /// Uniform-grid sweep `t = t0 + k dt, k < count` at fixed `beta`.
    ///
    /// Fixed-size chunks re-seed the rotation recurrence, are processed in
    /// parallel when the `parallel` feature is on, and are concatenated in
    /// order, so the output does not depend on the thread count.
    pub fn sweep(
        &self,
        beta: f64,
        t0: f64,
        dt: f64,
        count: usize,
        with_second: bool,
    ) -> Result<Vec<ScaledSample>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("sweep step must be positive, got {dt}")));
        }
        self.check_point(t0, beta)?;
        self.check_point(t0 + dt * (count.saturating_sub(1)) as f64, beta)?;
        let orders = if with_second { ORDER_0 | ORDER_1 | ORDER_2 } else { ORDER_0 | ORDER_1 };
        let bw = self.beta_weights(beta);
        let sign = if beta < 0.0 { -1.0 } else { 1.0 };

        let b = self.p.bits();
        let (step_c, step_s) = self.unit_vectors(dt);
        let n_chunks = count.div_ceil(SWEEP_CHUNK);
        let chunks: Vec<Vec<ScaledSample>> = crate::parallel::try_map_indexed(n_chunks, |ci| {
            let start = ci * SWEEP_CHUNK;
            let len = SWEEP_CHUNK.min(count - start);
            let t_start = t0 + dt * start as f64;
            let (mut c, mut s) = self.unit_vectors(t_start);
            let mut out = Vec::with_capacity(len);
            for k in 0..len {
                let t = t0 + dt * (start + k) as f64;
                let raw = self.accumulate(&bw, sign, &c, &s, orders);
                out.push(self.scaled_from_raw(&raw, t, beta));
                if k + 1 < len {
                    for i in 0..c.len() {
                        let nc = c[i].mul(&step_c[i], b, RM).sub(&s[i].mul(&step_s[i], b, RM), b, RM);
                        let ns = s[i].mul(&step_c[i], b, RM).add(&c[i].mul(&step_s[i], b, RM), b, RM);
                        c[i] = nc;
                        s[i] = ns;
                    }
                }
            }
            Ok(out)
        })?;
        Ok(chunks.into_iter().flatten().collect())
    }

    /// `xi(tau)` with the anti-underflow scale and an error bound.
    pub fn eval_xi(&self, pt: StripPoint) -> Result<XiValue> {
        let raw = self.eval_raw(pt.t, pt.beta, ORDER_0)?;
        let m_scale = self.m_scale(pt.t, pt.beta);
        let b = self.p.bits();
        let m_f = hp::to_f64(&m_scale);
        let u_scaled = hp::to_f64(&raw.u.div(&m_scale, b, RM));
        let v_scaled = hp::to_f64(&raw.v.div(&m_scale, b, RM));
        // the bound also covers the f64 rounding of the scaled components
        let err_estimate =
            self.err_bound(0) + (u_scaled.abs() + v_scaled.abs()) * m_f * 2f64.powi(-50);
        if err_estimate >= 1e-10 * m_f {
            return Err(Error::Numerical(format!(
                "error bound {err_estimate:e} exceeds 1e-10 M at t = {}",
                pt.t
            )));
        }
        Ok(XiValue { point: pt, u: raw.u, v: raw.v, m_scale, u_scaled, v_scaled, err_estimate })
    }

    /// `xi'` (order 1) or `xi''` (order 2) as `(re, im)` strip derivatives.
    pub fn eval_derivative(&self, pt: StripPoint, order: u8) -> Result<DerivativeValue> {
        let (mask, err) = match order {
            1 => (ORDER_1, self.err_bound(1)),
            2 => (ORDER_2, self.err_bound(2)),
            _ => return Err(Error::Domain(format!("derivative order must be 1 or 2, got {order}"))),
        };
        let raw = self.eval_raw(pt.t, pt.beta, mask)?;
        let (re, im) = match order {
            1 => (raw.ub, raw.vb),
            _ => (raw.ubb, raw.vbb),
        };
        Ok(DerivativeValue { point: pt, order, re, im, err_estimate: err })
    }

    /// `(u_t, v_t)` from the Cauchy-Riemann relations `u_t = -v_beta`,
    /// `v_t = u_beta`; exact analytic identities, not finite differences.
    pub fn t_gradient(&self, pt: StripPoint) -> Result<(BigFloat, BigFloat)> {
        let d = self.eval_derivative(pt, 1)?;
        Ok((d.im.neg(), d.re))
    }

    /// The strip norm: `|u| + |v|/beta` for beta > 0, and its limit
    /// `|u| + |u_t|` on the critical line.
    pub fn norm_xi(&self, pt: StripPoint) -> Result<BigFloat> {
        if pt.beta < 0.0 {
            return Err(Error::Domain("the strip norm is defined for beta in [0, 1/2]".into()));
        }
        let b = self.p.bits();
        if pt.beta == 0.0 {
            let raw = self.eval_raw(pt.t, 0.0, ORDER_0 | ORDER_1)?;
            // u_t = -v_beta
            return Ok(raw.u.abs().add(&raw.vb.abs(), b, RM));
        }
        let raw = self.eval_raw(pt.t, pt.beta, ORDER_0)?;
        let beta_r = hp::real(pt.beta, self.p);
        Ok(raw.u.abs().add(&raw.v.abs().div(&beta_r, b, RM), b, RM))
    }

    /// Kernel transform value for the configured kernel at the given order,
    /// as a complex pair plus error bound.
    pub fn transform(&self, pt: StripPoint, order: u8) -> Result<(Complex, f64)> {
        match order {
            0 => {
                let raw = self.eval_raw(pt.t, pt.beta, ORDER_0)?;
                Ok((Complex::new(raw.u, raw.v), self.err_bound(0)))
            }
            1 => {
                let raw = self.eval_raw(pt.t, pt.beta, ORDER_1)?;
                Ok((Complex::new(raw.ub, raw.vb), self.err_bound(1)))
            }
            2 => {
                let raw = self.eval_raw(pt.t, pt.beta, ORDER_2)?;
                Ok((Complex::new(raw.ubb, raw.vbb), self.err_bound(2)))
            }
            _ => Err(Error::Domain(format!("transform order must be 0, 1 or 2, got {order}"))),
        }
    }
}

fn ln_scale_m(t: f64, beta: f64) -> f64 {
    8f64.ln() + (23.0 / 12.0 + beta / 6.0) * (t / 2.0).max(1.0).ln()
        - t * std::f64::consts::PI / 4.0
}

/// One-shot `xi` evaluation; builds a throwaway evaluator sized for the point.
pub fn eval_xi(pt: StripPoint, cfg: &PrecisionConfig) -> Result<XiValue> {
    XiEvaluator::new(cfg.clone(), pt.t)?.eval_xi(pt)
}

/// One-shot derivative evaluation.
pub fn eval_xi_derivative(pt: StripPoint, order: u8, cfg: &PrecisionConfig) -> Result<DerivativeValue> {
    XiEvaluator::new(cfg.clone(), pt.t)?.eval_derivative(pt, order)
}

/// One-shot `(u_t, v_t)`.
pub fn t_gradient(pt: StripPoint, cfg: &PrecisionConfig) -> Result<(BigFloat, BigFloat)> {
    XiEvaluator::new(cfg.clone(), pt.t)?.t_gradient(pt)
}

/// One-shot strip norm.
pub fn norm_xi(pt: StripPoint, cfg: &PrecisionConfig) -> Result<BigFloat> {
    XiEvaluator::new(cfg.clone(), pt.t)?.norm_xi(pt)
}

/// One-shot kernel transform with an arbitrary fast-decay kernel.
pub fn eval_kernel_transform(
    kernel: &KernelFunction,
    pt: StripPoint,
    order: u8,
    cfg: &PrecisionConfig,
) -> Result<(Complex, f64)> {
    XiEvaluator::with_kernel(kernel.clone(), cfg.clone(), pt.t)?.transform(pt, order)
}
