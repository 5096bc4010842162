//! Independent product-formula route to xi: Euler-Maclaurin zeta and
//! Stirling log-gamma assembled into `xi(s) = s(s-1)/2 * pi^{-s/2} Gamma(s/2) zeta(s)`.
//!
//! This module never touches the kernel integral; agreement between the two
//! routes is the crate's main cross-validation.

use astro_float::BigFloat;
use num_rational::BigRational;

use crate::bernoulli::{self, rational_to_r};
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::hp::{self, Prec, RM};
use crate::kernel::scale_m;
use crate::precision::PrecisionConfig;

fn is_exact_real(s: &Complex, v: f64) -> bool {
    if !s.im.is_zero() {
        return false;
    }
    hp::to_f64(&s.re) == v && {
        // exclude values that merely round to v
        let p = Prec::from_digits(20);
        s.re.sub(&hp::real(v, p), p.bits(), RM).is_zero()
    }
}

/// Euler-Maclaurin evaluation of the Riemann zeta function.
///
/// `zeta(s) = sum_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2 + sum_k B_{2k}/(2k)! *
/// (s)_{2k-1} * N^{-s-2k+1}` with `N = max(10, ceil(|s| + 0.7 digits))`.
pub fn zeta_em(s: &Complex, cfg: &PrecisionConfig) -> Result<Complex> {
    if is_exact_real(s, 1.0) {
        return Err(Error::Pole("zeta has its pole at s = 1".into()));
    }
    let p = cfg.prec();
    let b = p.bits();
    let (sre, sim) = s.to_f64s();
    let smod = (sre * sre + sim * sim).sqrt();
    let n_cut = (smod + 0.7 * cfg.digits as f64).ceil().max(10.0) as u64;

    // partial sum of n^-s
    let mut acc = Complex::zero(p);
    for n in 1..n_cut {
        acc = acc.add(&pow_int_neg_s(n, s, p), p);
    }

    // N^{1-s}/(s-1) + N^-s/2
    let n_f = hp::from_u64(n_cut, p);
    let npow = pow_int_neg_s(n_cut, s, p); // N^-s
    let one = Complex::real(hp::one(p), p);
    let s_minus_1 = s.sub(&one, p);
    acc = acc.add(&npow.scale(&n_f, p).div(&s_minus_1, p), p);
    acc = acc.add(&npow.scale(&hp::ratio(1, 2, p), p), p);

    // Bernoulli correction: T_k = B_{2k}/(2k)! * prod_{j=0}^{2k-2}(s+j) * N^{-s-2k+1}
    // magnitudes are compared squared, so square the tolerance too
    let tol = hp::pow10_neg(cfg.series_eps_exponent, p);
    let tol2 = tol.mul(&tol, b, RM);
    let n_sq_inv = n_f.mul(&n_f, b, RM).reciprocal(b, RM);
    let mut poch = s.clone(); // prod so far, starts at (s)
    let mut npow_k = npow.scale(&n_f.reciprocal(b, RM), p); // N^{-s-1}
    let mut fact = BigRational::from_integer(2.into()); // (2k)! running
    let mut prev_mag: Option<BigFloat> = None;
    let mut converged = false;
    for k in 1..=bernoulli::max_k() {
        let coeff = rational_to_r(&(bernoulli::bern(k) / &fact), p);
        let term = poch.mul(&npow_k, p).scale(&coeff, p);
        let mag = term.norm_sqr(p);
        if let Some(prev) = &prev_mag {
            if matches!(mag.cmp(prev), Some(c) if c > 0) {
                // asymptotic tail started to grow; stop at the previous term
                converged = true;
                break;
            }
        }
        acc = acc.add(&term, p);
        let cut = tol2.mul(&acc.norm_sqr(p), b, RM);
        if matches!(mag.cmp(&cut), Some(c) if c <= 0) {
            converged = true;
            break;
        }
        prev_mag = Some(mag);
        // advance: *(s+2k-1)(s+2k) / ((2k+1)(2k+2)) and N^-2
        let j1 = Complex::real(hp::from_u64(2 * k as u64 - 1, p), p).add(s, p);
        let j2 = Complex::real(hp::from_u64(2 * k as u64, p), p).add(s, p);
        poch = poch.mul(&j1, p).mul(&j2, p);
        npow_k = npow_k.scale(&n_sq_inv, p);
        fact *= BigRational::from_integer(((2 * k + 1) * (2 * k + 2)).into());
    }
    if !converged {
        return Err(Error::Numerical("Euler-Maclaurin correction did not converge".into()));
    }
    Ok(acc)
}

/// `n^{-s} = exp(-s ln n)` for a positive integer n.
fn pow_int_neg_s(n: u64, s: &Complex, p: Prec) -> Complex {
    if n == 1 {
        return Complex::real(hp::one(p), p);
    }
    let ln_n = hp::ln(&hp::from_u64(n, p), p);
    s.neg().scale(&ln_n, p).exp(p)
}

/// Principal-branch log-gamma by the Stirling series after argument shifting.
pub fn log_gamma(s: &Complex, cfg: &PrecisionConfig) -> Result<Complex> {
    let p = cfg.prec();
    let b = p.bits();
    let (sre, sim) = s.to_f64s();
    if sim == 0.0 && s.im.is_zero() && sre <= 0.0 && s.re.is_int() {
        return Err(Error::Domain(format!("log_gamma pole at non-positive integer {sre}")));
    }

    // Shift until the Stirling series can reach ~10^-(digits+5):
    // its optimal-truncation floor is about e^{-2 pi Re z}.
    let r0 = (0.3665 * (cfg.digits as f64 + 5.0) + 2.0).max(10.0);
    let shift = if sre < r0 { (r0 - sre).ceil() as u32 } else { 0 };

    let z = s.add(&Complex::real(hp::from_u64(shift as u64, p), p), p);
    let ln_z = z.ln(p);

    // (z - 1/2) ln z - z + ln(2 pi)/2
    let half = hp::ratio(1, 2, p);
    let mut acc = z.sub(&Complex::real(half.clone(), p), p).mul(&ln_z, p);
    acc = acc.sub(&z, p);
    let ln_two_pi = hp::ln(&hp::pi(p).mul(&hp::from_u64(2, p), b, RM), p);
    acc = acc.add(&Complex::real(ln_two_pi.mul(&half, b, RM), p), p);

    // sum_k B_{2k} / ((2k)(2k-1) z^{2k-1}); magnitudes compared squared
    let tol = hp::pow10_neg(cfg.series_eps_exponent, p);
    let tol2 = tol.mul(&tol, b, RM);
    let z_inv = Complex::real(hp::one(p), p).div(&z, p);
    let z_inv2 = z_inv.mul(&z_inv, p);
    let mut zpow = z_inv.clone();
    let mut prev_mag: Option<BigFloat> = None;
    let mut converged = false;
    for k in 1..=bernoulli::max_k() {
        let denom = BigRational::from_integer(((2 * k) * (2 * k - 1)).into());
        let coeff = rational_to_r(&(bernoulli::bern(k) / denom), p);
        let term = zpow.scale(&coeff, p);
        let mag = term.norm_sqr(p);
        if let Some(prev) = &prev_mag {
            if matches!(mag.cmp(prev), Some(c) if c > 0) {
                converged = true;
                break;
            }
        }
        acc = acc.add(&term, p);
        let cut = tol2.mul(&acc.norm_sqr(p), b, RM);
        if matches!(mag.cmp(&cut), Some(c) if c <= 0) {
            converged = true;
            break;
        }
        prev_mag = Some(mag);
        zpow = zpow.mul(&z_inv2, p);
    }
    if !converged {
        return Err(Error::Numerical("Stirling series did not converge".into()));
    }

    // unwind the shift: ln Gamma(s) = ln Gamma(s + m) - sum_j ln(s + j)
    for j in 0..shift {
        let sj = s.add(&Complex::real(hp::from_u64(j as u64, p), p), p);
        acc = acc.sub(&sj.ln(p), p);
    }
    Ok(acc)
}

/// The completed zeta function through the product formula,
/// `xi(s) = s(s-1)/2 * pi^{-s/2} * Gamma(s/2) * zeta(s)`.
///
/// The points s = 0 and s = 1 are excluded by contract (the s(s-1) zero
/// cancels poles there; the kernel route covers those points).
pub fn xi_product(s: &Complex, cfg: &PrecisionConfig) -> Result<Complex> {
    if is_exact_real(s, 0.0) || is_exact_real(s, 1.0) {
        return Err(Error::ExcludedPoint("xi_product excludes s in {0, 1}".into()));
    }
    let p = cfg.prec();
    let half = hp::ratio(1, 2, p);
    let s_half = s.scale(&half, p);

    let zeta = zeta_em(s, cfg)?;
    let lg = log_gamma(&s_half, cfg)?;
    // pi^{-s/2} Gamma(s/2) = exp(lnGamma(s/2) - (s/2) ln pi)
    let ln_pi = hp::ln(&hp::pi(p), p);
    let gamma_factor = lg.sub(&s_half.scale(&ln_pi, p), p).exp(p);

    let one = Complex::real(hp::one(p), p);
    let quad = s.mul(&s.sub(&one, p), p).scale(&half, p);
    Ok(quad.mul(&gamma_factor, p).mul(&zeta, p))
}

/// `|xi(s) - xi(1-s)| / M(|Im s|, 1/2)`; the functional equation demands
/// this stays below 1e-12.
pub fn functional_eq_residual(s: &Complex, cfg: &PrecisionConfig) -> Result<f64> {
    let p = cfg.prec();
    let one = Complex::real(hp::one(p), p);
    let a = xi_product(s, cfg)?;
    let b = xi_product(&one.sub(s, p), cfg)?;
    let diff = a.sub(&b, p).abs(p);
    let t = hp::to_f64(&s.im).abs();
    let m = scale_m(t, 0.5, p);
    Ok(hp::to_f64(&diff.div(&m, p.bits(), RM)))
}

/// Relative residual of `|Gamma((beta+1/2+it)/2)|` against its exponential
/// asymptotic `sqrt(2 pi) (t/2)^{beta/2 - 1/4} e^{-t pi/4}`; O(1/t).
pub fn gamma_asymptotic_residual(t: f64, beta: f64, cfg: &PrecisionConfig) -> Result<f64> {
    if t < 20.0 {
        return Err(Error::Domain("asymptotic residual is specified for t >= 20".into()));
    }
    let p = cfg.prec();
    let b = p.bits();
    let s = Complex::from_f64(beta + 0.5, t, p);
    let lg = log_gamma(&s.scale(&hp::ratio(1, 2, p), p), cfg)?;
    // ln of the asymptotic magnitude
    let ln_asym = {
        let ln_2pi_half = hp::ln(&hp::pi(p).mul(&hp::from_u64(2, p), b, RM), p)
            .mul(&hp::ratio(1, 2, p), b, RM);
        let expo = hp::real(beta / 2.0 - 0.25, p);
        let ln_t2 = hp::ln(&hp::real(t / 2.0, p), p);
        let decay = hp::real(t, p).mul(&hp::pi(p), b, RM).mul(&hp::ratio(-1, 4, p), b, RM);
        ln_2pi_half.add(&expo.mul(&ln_t2, b, RM), b, RM).add(&decay, b, RM)
    };
    let ratio = hp::exp(&lg.re.sub(&ln_asym, b, RM), p);
    Ok((hp::to_f64(&ratio) - 1.0).abs())
}

/// Both components of `xi(beta + 1/2 + it)` via the product route.
///
/// The real part is assembled in working precision: `beta + 0.5` rounded in
/// f64 would disagree with the kernel route's beta in the last bit.
pub fn xi_product_point(t: f64, beta: f64, cfg: &PrecisionConfig) -> Result<(BigFloat, BigFloat)> {
    let p = cfg.prec();
    let re = hp::real(beta, p).add(&hp::ratio(1, 2, p), p.bits(), RM);
    let z = xi_product(&Complex::new(re, hp::real(t, p)), cfg)?;
    Ok((z.re, z.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::to_f64;

    fn cfg(digits: u32) -> PrecisionConfig {
        PrecisionConfig::new(digits).unwrap()
    }

    #[test]
    fn zeta_known_values() {
        let c = cfg(30);
        let p = c.prec();
        let z2 = zeta_em(&Complex::from_f64(2.0, 0.0, p), &c).unwrap();
        assert!((to_f64(&z2.re) - 1.6449340668482264).abs() < 1e-14);
        let z3 = zeta_em(&Complex::from_f64(3.0, 0.0, p), &c).unwrap();
        assert!((to_f64(&z3.re) - 1.2020569031595943).abs() < 1e-14);
        let z0 = zeta_em(&Complex::from_f64(0.0, 0.0, p), &c).unwrap();
        assert!((to_f64(&z0.re) + 0.5).abs() < 1e-14);
        let zh = zeta_em(&Complex::from_f64(0.5, 0.0, p), &c).unwrap();
        assert!((to_f64(&zh.re) + 1.4603545088095868).abs() < 1e-13);
    }

    #[test]
    fn zeta_pole() {
        let c = cfg(25);
        let p = c.prec();
        assert!(matches!(zeta_em(&Complex::from_f64(1.0, 0.0, p), &c), Err(Error::Pole(_))));
    }

    #[test]
    fn zeta_conjugate_symmetry() {
        let c = cfg(30);
        let p = c.prec();
        let s = Complex::from_f64(0.3, 12.5, p);
        let a = zeta_em(&s, &c).unwrap();
        let b = zeta_em(&s.conj(), &c).unwrap();
        let d = a.conj().sub(&b, p).abs(p);
        assert!(to_f64(&d) < 1e-25);
    }

    #[test]
    fn log_gamma_known_values() {
        let c = cfg(30);
        let p = c.prec();
        let at_half = log_gamma(&Complex::from_f64(0.5, 0.0, p), &c).unwrap();
        assert!((to_f64(&at_half.re) - 0.5723649429247001).abs() < 1e-14);
        let at_one = log_gamma(&Complex::from_f64(1.0, 0.0, p), &c).unwrap();
        assert!(to_f64(&at_one.re).abs() < 1e-25);
        let at_five = log_gamma(&Complex::from_f64(5.0, 0.0, p), &c).unwrap();
        assert!((to_f64(&at_five.re) - 24f64.ln()).abs() < 1e-14);
        assert!(matches!(
            log_gamma(&Complex::from_f64(-3.0, 0.0, p), &c),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn xi_product_known_values() {
        let c = cfg(30);
        let p = c.prec();
        let at_half = xi_product(&Complex::from_f64(0.5, 0.0, p), &c).unwrap();
        assert!((to_f64(&at_half.re) - 0.4971207781883141).abs() < 1e-14);
        assert!(to_f64(&at_half.im).abs() < 1e-25);
        let at_two = xi_product(&Complex::from_f64(2.0, 0.0, p), &c).unwrap();
        assert!((to_f64(&at_two.re) - std::f64::consts::PI / 6.0).abs() < 1e-14);
        assert!(matches!(
            xi_product(&Complex::from_f64(0.0, 0.0, p), &c),
            Err(Error::ExcludedPoint(_))
        ));
        assert!(matches!(
            xi_product(&Complex::from_f64(1.0, 0.0, p), &c),
            Err(Error::ExcludedPoint(_))
        ));
    }

    #[test]
    fn xi_functional_equation_spot() {
        let c = cfg(40);
        let p = c.prec();
        for (re, im) in [(0.5, 10.0), (0.9, 25.0), (0.3, 7.0)] {
            let r = functional_eq_residual(&Complex::from_f64(re, im, p), &c).unwrap();
            assert!(r < 1e-12, "residual at ({re},{im}): {r:e}");
        }
    }

    #[test]
    fn xi_reflection_conjugation() {
        let c = cfg(30);
        let p = c.prec();
        let s = Complex::from_f64(0.3, 7.0, p);
        let a = xi_product(&s, &c).unwrap();
        // functional equation partner 1 - s (built in working precision:
        // the f64 literal 0.7 is not 1 - 0.3_f64)
        let one = Complex::real(crate::hp::one(p), p);
        let b = xi_product(&one.sub(&s, p), &c).unwrap();
        let d = a.sub(&b, p).abs(p);
        assert!(to_f64(&d) < 1e-20, "functional equation diff {:e}", to_f64(&d));
        // reflection: xi(conj s) = conj xi(s)
        let r = xi_product(&s.conj(), &c).unwrap();
        let d2 = r.sub(&a.conj(), p).abs(p);
        assert!(to_f64(&d2) < 1e-20, "reflection diff {:e}", to_f64(&d2));
    }

    #[test]
    fn gamma_asymptotic_residuals() {
        let c = cfg(30);
        let r50 = gamma_asymptotic_residual(50.0, 0.0, &c).unwrap();
        let r100 = gamma_asymptotic_residual(100.0, 0.5, &c).unwrap();
        assert!(r50 < 0.2, "r(50) = {r50}");
        assert!(r100 < 0.1, "r(100) = {r100}");
        let r100b = gamma_asymptotic_residual(100.0, 0.0, &c).unwrap();
        assert!(r100b < r50 + 0.05);
        assert!(r50 < 10.0 / 50.0 && r100 < 10.0 / 100.0);
        assert!(matches!(gamma_asymptotic_residual(10.0, 0.0, &c), Err(Error::Domain(_))));
    }
}
