//! Thin plumbing over `astro_float::BigFloat`.
//!
//! All extended-precision arithmetic in the crate goes through this module.
//! Values carry their own mantissa length; the [`Prec`] context fixes the
//! target precision of every operation. Rounding mode is `None` (truncation)
//! throughout: the precision schedule already carries 64 guard bits, so
//! correct rounding would only cost time.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

pub const RM: RoundingMode = RoundingMode::None;

const LOG2_10: f64 = 3.321928094887362;

/// Working precision, in bits, derived from a decimal digit request.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prec {
    bits: usize,
}

impl Prec {
    /// Precision for `digits` decimal digits plus 64 guard bits,
    /// rounded up to a whole number of 64-bit words.
    pub fn from_digits(digits: u32) -> Self {
        let raw = (digits as f64 * LOG2_10).ceil() as usize + 64;
        Prec { bits: raw.div_ceil(64) * 64 }
    }

    pub fn bits(self) -> usize {
        self.bits
    }
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

pub(crate) fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

pub fn real(x: f64, p: Prec) -> BigFloat {
    BigFloat::from_f64(x, p.bits)
}

pub fn from_u64(x: u64, p: Prec) -> BigFloat {
    BigFloat::from_u64(x, p.bits)
}

pub fn from_i64(x: i64, p: Prec) -> BigFloat {
    BigFloat::from_i64(x, p.bits)
}

/// Exact small rational `num/den` at precision `p`.
pub fn ratio(num: i64, den: i64, p: Prec) -> BigFloat {
    from_i64(num, p).div(&from_i64(den, p), p.bits, RM)
}

pub fn zero(p: Prec) -> BigFloat {
    BigFloat::new(p.bits)
}

pub fn one(p: Prec) -> BigFloat {
    from_u64(1, p)
}

pub fn pi(p: Prec) -> BigFloat {
    with_consts(|cc| cc.pi(p.bits, RM))
}

pub fn ln_2(p: Prec) -> BigFloat {
    with_consts(|cc| cc.ln_2(p.bits, RM))
}

pub fn ln_10(p: Prec) -> BigFloat {
    with_consts(|cc| cc.ln_10(p.bits, RM))
}

pub fn exp(x: &BigFloat, p: Prec) -> BigFloat {
    with_consts(|cc| x.exp(p.bits, RM, cc))
}

pub fn ln(x: &BigFloat, p: Prec) -> BigFloat {
    with_consts(|cc| x.ln(p.bits, RM, cc))
}

pub fn sin(x: &BigFloat, p: Prec) -> BigFloat {
    with_consts(|cc| x.sin(p.bits, RM, cc))
}

pub fn cos(x: &BigFloat, p: Prec) -> BigFloat {
    with_consts(|cc| x.cos(p.bits, RM, cc))
}

pub fn sinh(x: &BigFloat, p: Prec) -> BigFloat {
    with_consts(|cc| x.sinh(p.bits, RM, cc))
}

pub fn cosh(x: &BigFloat, p: Prec) -> BigFloat {
    with_consts(|cc| x.cosh(p.bits, RM, cc))
}

pub fn sqrt(x: &BigFloat, p: Prec) -> BigFloat {
    x.sqrt(p.bits, RM)
}

pub fn atan(x: &BigFloat, p: Prec) -> BigFloat {
    with_consts(|cc| x.atan(p.bits, RM, cc))
}

/// Principal-value atan2 built from `atan` and quadrant fixes.
pub fn atan2(y: &BigFloat, x: &BigFloat, p: Prec) -> BigFloat {
    let pb = p.bits;
    if x.is_zero() {
        if y.is_zero() {
            return zero(p);
        }
        let half_pi = pi(p).div(&from_u64(2, p), pb, RM);
        return if y.is_positive() { half_pi } else { half_pi.neg() };
    }
    let base = atan(&y.div(x, pb, RM), p);
    if x.is_positive() {
        base
    } else if y.is_negative() {
        base.sub(&pi(p), pb, RM)
    } else {
        base.add(&pi(p), pb, RM)
    }
}

/// `10^-k` as a positive power-of-ten, exact mantissa.
pub fn pow10_neg(k: u32, p: Prec) -> BigFloat {
    from_u64(10, p).powi(k as usize, p.bits, RM).reciprocal(p.bits, RM)
}

/// Lossy conversion to `f64` (round toward zero), with a wide exponent range.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf() {
        return if x.is_inf_pos() { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    let (words, _len, sign, e, _) = x.as_raw_parts().expect("finite value");
    let k = words.len();
    // words are little-endian; value = 0.mantissa * 2^e with the top bit set
    let hi = words[k - 1] as f64;
    let lo = if k >= 2 { words[k - 2] as f64 } else { 0.0 };
    let m = hi * 2f64.powi(-64) + lo * 2f64.powi(-128);
    // split the scaling so exponents beyond f64's single-step range survive
    let e = e as i32;
    let e1 = e / 2;
    let e2 = e - e1;
    let v = m * 2f64.powi(e1) * 2f64.powi(e2);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// `|a| <= |b|`?
///
/// Compares through explicit `abs()`: `BigFloat::abs_cmp` in astro-float
/// 0.9.6 performs a signed comparison and cannot be used for this.
pub fn abs_le(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.abs().cmp(&b.abs()), Some(c) if c <= 0)
}
