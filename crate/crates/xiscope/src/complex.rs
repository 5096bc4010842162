//! Rectangular complex arithmetic on extended-precision reals.

use astro_float::BigFloat;

use crate::hp::{self, Prec, RM};

/// A complex number with extended-precision components.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Complex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Complex { re, im }
    }

    pub fn from_f64(re: f64, im: f64, p: Prec) -> Self {
        Complex { re: hp::real(re, p), im: hp::real(im, p) }
    }

    pub fn zero(p: Prec) -> Self {
        Complex { re: hp::zero(p), im: hp::zero(p) }
    }

    pub fn real(x: BigFloat, p: Prec) -> Self {
        Complex { re: x, im: hp::zero(p) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn neg(&self) -> Self {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn add(&self, o: &Self, p: Prec) -> Self {
        Complex { re: self.re.add(&o.re, p.bits(), RM), im: self.im.add(&o.im, p.bits(), RM) }
    }

    pub fn sub(&self, o: &Self, p: Prec) -> Self {
        Complex { re: self.re.sub(&o.re, p.bits(), RM), im: self.im.sub(&o.im, p.bits(), RM) }
    }

    pub fn mul(&self, o: &Self, p: Prec) -> Self {
        let b = p.bits();
        let re = self.re.mul(&o.re, b, RM).sub(&self.im.mul(&o.im, b, RM), b, RM);
        let im = self.re.mul(&o.im, b, RM).add(&self.im.mul(&o.re, b, RM), b, RM);
        Complex { re, im }
    }

    pub fn scale(&self, k: &BigFloat, p: Prec) -> Self {
        Complex { re: self.re.mul(k, p.bits(), RM), im: self.im.mul(k, p.bits(), RM) }
    }

    pub fn div(&self, o: &Self, p: Prec) -> Self {
        let b = p.bits();
        let den = o.re.mul(&o.re, b, RM).add(&o.im.mul(&o.im, b, RM), b, RM);
        let re = self.re.mul(&o.re, b, RM).add(&self.im.mul(&o.im, b, RM), b, RM).div(&den, b, RM);
        let im = self.im.mul(&o.re, b, RM).sub(&self.re.mul(&o.im, b, RM), b, RM).div(&den, b, RM);
        Complex { re, im }
    }

    pub fn norm_sqr(&self, p: Prec) -> BigFloat {
        let b = p.bits();
        self.re.mul(&self.re, b, RM).add(&self.im.mul(&self.im, b, RM), b, RM)
    }

    pub fn abs(&self, p: Prec) -> BigFloat {
        hp::sqrt(&self.norm_sqr(p), p)
    }

    /// `e^self` via real exp and a rotation.
    pub fn exp(&self, p: Prec) -> Self {
        let r = hp::exp(&self.re, p);
        let c = hp::cos(&self.im, p);
        let s = hp::sin(&self.im, p);
        Complex { re: r.mul(&c, p.bits(), RM), im: r.mul(&s, p.bits(), RM) }
    }

    /// Principal branch logarithm.
    pub fn ln(&self, p: Prec) -> Self {
        let b = p.bits();
        let half = hp::ratio(1, 2, p);
        Complex {
            re: hp::ln(&self.norm_sqr(p), p).mul(&half, b, RM),
            im: hp::atan2(&self.im, &self.re, p),
        }
    }

    pub fn to_f64s(&self) -> (f64, f64) {
        (hp::to_f64(&self.re), hp::to_f64(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mul_div_roundtrip() {
        let p = Prec::from_digits(30);
        let a = Complex::from_f64(1.25, -0.75, p);
        let b = Complex::from_f64(-0.5, 2.0, p);
        let (re, im) = a.mul(&b, p).div(&b, p).to_f64s();
        assert!(close(re, 1.25, 1e-20) && close(im, -0.75, 1e-20));
    }

    #[test]
    fn exp_ln_roundtrip() {
        let p = Prec::from_digits(30);
        let z = Complex::from_f64(0.3, -1.9, p);
        let (re, im) = z.exp(p).ln(p).to_f64s();
        assert!(close(re, 0.3, 1e-20) && close(im, -1.9, 1e-20));
    }

    #[test]
    fn ln_principal_branch() {
        let p = Prec::from_digits(30);
        let z = Complex::from_f64(-1.0, 1e-30, p);
        let (_, im) = z.ln(p).to_f64s();
        assert!(close(im, std::f64::consts::PI, 1e-12));
    }
}
