//! The Jacobi series `psi(x) = sum_{n>=1} e^{-n^2 pi x}`, its derivatives,
//! the decay kernel `f(x) = 2x^2 psi'' + 3x psi'`, and the classical
//! identities the rest of the crate leans on.

use astro_float::BigFloat;

use crate::error::{Error, Result};
use crate::hp::{self, RM};
use crate::precision::PrecisionConfig;

/// Hard cap on series length; reached only for absurdly small arguments.
const MAX_TERMS: u32 = 2_000_000;

/// One evaluation of the Jacobi series or a derivative.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub x: BigFloat,
    pub order: u8,
    pub value: BigFloat,
    pub terms_used: u32,
}

/// `sum_{n>=1} (-n^2 pi)^order e^{-n^2 pi x}`, truncated when the next term
/// drops below `10^-series_eps_exponent` relative to the running sum.
pub fn psi(x: &BigFloat, order: u8, cfg: &PrecisionConfig) -> Result<ThetaValue> {
    if !x.is_positive() || x.is_zero() {
        return Err(Error::Domain("psi requires x > 0".into()));
    }
    if order > 3 {
        return Err(Error::Domain(format!("psi derivative order must be 0..3, got {order}")));
    }
    let p = cfg.prec();
    let b = p.bits();

    // Upfront length estimate: terms die once n^2 pi x exceeds the decimal
    // target, so n_max ~ sqrt(k ln 10 / (pi x)).
    let xf = hp::to_f64(x);
    if !xf.is_finite() || xf <= 0.0 {
        return Err(Error::Resource("psi argument underflows the length estimate".into()));
    }
    let est = ((cfg.series_eps_exponent as f64 * std::f64::consts::LN_10
        / (std::f64::consts::PI * xf))
        .sqrt()
        + 2.0) as u64;
    if est > MAX_TERMS as u64 {
        return Err(Error::Resource(format!("psi series would need ~{est} terms at x = {xf:e}")));
    }

    let pi = hp::pi(p);
    let pix = pi.mul(x, b, RM);
    let q = hp::exp(&pix.neg(), p); // e^{-pi x}
    let q2 = q.mul(&q, b, RM);

    let tol = hp::pow10_neg(cfg.series_eps_exponent, p);

    let coeff = |n: u64| -> BigFloat {
        // (-n^2 pi)^order
        match order {
            0 => hp::one(p),
            _ => {
                let n2pi = hp::from_u64(n * n, p).mul(&pi, b, RM);
                let mag = n2pi.powi(order as usize, b, RM);
                if order % 2 == 1 {
                    mag.neg()
                } else {
                    mag
                }
            }
        }
    };

    // e_{n+1} = e_n * q^{2n+1}; keep the running odd power of q.
    let mut e_n = q.clone();
    let mut odd_pow = q.mul(&q2, b, RM); // q^3
    let mut sum = coeff(1).mul(&e_n, b, RM);
    let mut terms = 1u32;

    loop {
        let n = (terms + 1) as u64;
        e_n = e_n.mul(&odd_pow, b, RM);
        odd_pow = odd_pow.mul(&q2, b, RM);
        let term = coeff(n).mul(&e_n, b, RM);
        let cutoff = tol.mul(&sum, b, RM);
        if hp::abs_le(&term, &cutoff) {
            break;
        }
        sum = sum.add(&term, b, RM);
        terms += 1;
        if terms >= MAX_TERMS {
            return Err(Error::Resource("psi series exceeded the term cap".into()));
        }
    }

    Ok(ThetaValue { x: x.clone(), order, value: sum, terms_used: terms })
}

/// Convenience wrapper for exactly representable arguments.
pub fn psi_f64(x: f64, order: u8, cfg: &PrecisionConfig) -> Result<ThetaValue> {
    psi(&hp::real(x, cfg.prec()), order, cfg)
}

/// The decay kernel `f(x) = 2x^2 psi''(x) + 3x psi'(x)`, defined for x >= 1.
pub fn f_decay(x: &BigFloat, cfg: &PrecisionConfig) -> Result<BigFloat> {
    let p = cfg.prec();
    let b = p.bits();
    if matches!(x.cmp(&hp::one(p)), Some(c) if c < 0) {
        return Err(Error::Domain(
            "f(x) = 2x^2 psi'' + 3x psi' is only used on the integral range x >= 1".into(),
        ));
    }
    let d1 = psi(x, 1, cfg)?.value;
    let d2 = psi(x, 2, cfg)?.value;
    let x2 = x.mul(x, b, RM);
    let two_x2 = x2.mul(&hp::from_u64(2, p), b, RM);
    let three_x = x.mul(&hp::from_u64(3, p), b, RM);
    Ok(two_x2.mul(&d2, b, RM).add(&three_x.mul(&d1, b, RM), b, RM))
}

/// Residual of the Jacobi transformation
/// `(2 psi(x) + 1) - x^{-1/2} (2 psi(1/x) + 1)`.
///
/// Both sides are summed directly; the identity is the thing under test,
/// so it is never used to accelerate the small-x side.
pub fn jacobi_residual(x: &BigFloat, cfg: &PrecisionConfig) -> Result<BigFloat> {
    let p = cfg.prec();
    let b = p.bits();
    if !x.is_positive() || x.is_zero() {
        return Err(Error::Domain("jacobi identity requires x > 0".into()));
    }
    let two = hp::from_u64(2, p);
    let one = hp::one(p);
    let lhs = two.mul(&psi(x, 0, cfg)?.value, b, RM).add(&one, b, RM);
    let inv = x.reciprocal(b, RM);
    let rhs_core = two.mul(&psi(&inv, 0, cfg)?.value, b, RM).add(&one, b, RM);
    let rhs = rhs_core.div(&hp::sqrt(x, p), b, RM);
    Ok(lhs.sub(&rhs, b, RM))
}

/// Residual of the vanishing combination `1/2 + psi(1) + 4 psi'(1)`.
///
/// This is the form that actually cancels (it follows from differentiating
/// the Jacobi transformation at x = 1). See [`r1_residual_quarter`] for the
/// non-vanishing 1/4-coefficient variant kept as a negative control.
pub fn r1_residual(cfg: &PrecisionConfig) -> Result<BigFloat> {
    r1_with_coefficient(4, 1, cfg)
}

/// The literal `1/2 + psi(1) + (1/4) psi'(1)` combination. It does not
/// vanish: it evaluates to about 0.50927.
pub fn r1_residual_quarter(cfg: &PrecisionConfig) -> Result<BigFloat> {
    r1_with_coefficient(1, 4, cfg)
}

fn r1_with_coefficient(num: i64, den: i64, cfg: &PrecisionConfig) -> Result<BigFloat> {
    let p = cfg.prec();
    let b = p.bits();
    let one = hp::one(p);
    let half = hp::ratio(1, 2, p);
    let psi0 = psi(&one, 0, cfg)?.value;
    let psi1 = psi(&one, 1, cfg)?.value;
    Ok(half.add(&psi0, b, RM).add(&hp::ratio(num, den, p).mul(&psi1, b, RM), b, RM))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::to_f64;

    fn cfg(digits: u32) -> PrecisionConfig {
        PrecisionConfig::new(digits).unwrap()
    }

    #[test]
    fn psi_at_one() {
        let c = cfg(30);
        let v = psi_f64(1.0, 0, &c).unwrap();
        assert!((to_f64(&v.value) - 0.043217405606654007).abs() < 1e-15);
        assert!(v.terms_used >= 2);
    }

    #[test]
    fn psi_derivative_at_one() {
        let c = cfg(30);
        let v = psi_f64(1.0, 1, &c).unwrap();
        assert!((to_f64(&v.value) - (-0.13580435140166350)).abs() < 1e-15);
    }

    #[test]
    fn psi_prime_identity_from_jacobi() {
        // psi'(1) = -(2 psi(1) + 1)/8, a consequence of the transformation law
        let c = cfg(50);
        let p = c.prec();
        let b = p.bits();
        let psi0 = psi_f64(1.0, 0, &c).unwrap().value;
        let psi1 = psi_f64(1.0, 1, &c).unwrap().value;
        let rhs = hp::from_u64(2, p)
            .mul(&psi0, b, RM)
            .add(&hp::one(p), b, RM)
            .div(&hp::from_i64(-8, p), b, RM);
        let diff = psi1.sub(&rhs, b, RM);
        assert!(hp::abs_le(&diff, &hp::pow10_neg(45, p)));
    }

    #[test]
    fn psi_at_two() {
        let c = cfg(30);
        let v = psi_f64(2.0, 0, &c).unwrap();
        assert!((to_f64(&v.value) - 0.0018674427438695455).abs() < 1e-15);
    }

    #[test]
    fn psi_decays_to_zero() {
        let c = cfg(25);
        for order in 0..4u8 {
            let a = to_f64(&psi_f64(30.0, order, &c).unwrap().value).abs();
            let b = to_f64(&psi_f64(40.0, order, &c).unwrap().value).abs();
            assert!(b < a && b < 1e-40, "order {order}: {a} -> {b}");
        }
    }

    #[test]
    fn psi_rejects_bad_arguments() {
        let c = cfg(25);
        assert!(matches!(psi_f64(0.0, 0, &c), Err(Error::Domain(_))));
        assert!(matches!(psi_f64(-1.0, 2, &c), Err(Error::Domain(_))));
        assert!(matches!(psi_f64(1.0, 4, &c), Err(Error::Domain(_))));
        assert!(matches!(psi_f64(1e-12, 0, &c), Err(Error::Resource(_))));
    }

    #[test]
    fn f_decay_values() {
        let c = cfg(30);
        let p = c.prec();
        let f1 = f_decay(&hp::one(p), &c).unwrap();
        assert!((to_f64(&f1) - 0.44669690046712344).abs() < 1e-14);
        // pinned high-precision regression value
        let f5 = f_decay(&hp::real(5.0, p), &c).unwrap();
        assert!((to_f64(&f5) / 6.7266670066739878e-5 - 1.0).abs() < 1e-12);
        assert!(matches!(f_decay(&hp::real(0.5, p), &c), Err(Error::Domain(_))));
    }

    #[test]
    fn jacobi_residual_tiny() {
        let c = cfg(50);
        let p = c.prec();
        let bound = hp::pow10_neg(45, p);
        for x in [0.25f64, 3.0] {
            let r = jacobi_residual(&hp::real(x, p), &c).unwrap();
            assert!(hp::abs_le(&r, &bound), "x = {x}: {:?}", to_f64(&r));
        }
        // x = 1 is a fixed point of the transformation
        let r1 = jacobi_residual(&hp::one(p), &c).unwrap();
        assert!(hp::abs_le(&r1, &bound));
    }

    #[test]
    fn r1_forms() {
        let c = cfg(50);
        let p = c.prec();
        let vanishing = r1_residual(&c).unwrap();
        assert!(hp::abs_le(&vanishing, &hp::pow10_neg(45, p)));
        let quarter = to_f64(&r1_residual_quarter(&c).unwrap());
        assert!((quarter - 0.50926631775623813).abs() < 1e-12);
    }

    #[test]
    fn r1_low_precision() {
        let c = cfg(20);
        let p = c.prec();
        let v = r1_residual(&c).unwrap();
        assert!(hp::abs_le(&v, &hp::pow10_neg(15, p)));
    }
}
