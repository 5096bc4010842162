//! Exact Bernoulli numbers `B_{2k}` as rationals, shared by the
//! Euler-Maclaurin tail and the Stirling series.

use std::sync::OnceLock;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::hp::{self, Prec, RM};

/// Largest index 2k provided by the table. Enough for ~150 working digits.
pub const BERN_MAX_2K: usize = 320;

static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();

/// `B_{2k}` (even indices only; `bern(0) = 1`).
pub fn bern(k: usize) -> &'static BigRational {
    let table = TABLE.get_or_init(build_table);
    &table[k]
}

pub fn max_k() -> usize {
    BERN_MAX_2K / 2
}

/// Recurrence sum_{j=0}^{m} C(m+1, j) B_j = 0 with B_1 = -1/2.
fn build_table() -> Vec<BigRational> {
    let m_max = BERN_MAX_2K;
    let mut all: Vec<BigRational> = Vec::with_capacity(m_max + 1);
    all.push(BigRational::one());
    for m in 1..=m_max {
        if m > 1 && m % 2 == 1 {
            all.push(BigRational::zero());
            continue;
        }
        // C(m+1, j) built incrementally
        let mut binom = BigInt::one(); // C(m+1, 0)
        let mut acc = BigRational::zero();
        for (j, bj) in all.iter().enumerate().take(m) {
            if !bj.is_zero() {
                acc += BigRational::from(binom.clone()) * bj;
            }
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        // binom is now C(m+1, m) = m+1
        all.push(-acc / BigRational::from(BigInt::from(m + 1)));
    }
    all.into_iter().step_by(2).collect()
}

/// Convert a non-negative BigInt to extended precision.
fn bigint_to_r(n: &BigInt, p: Prec) -> BigFloat {
    let b = p.bits();
    let (sign, digits) = n.to_u64_digits();
    let mut acc = hp::zero(p);
    let shift = {
        // 2^64 as a BigFloat
        let two = hp::from_u64(2, p);
        two.powi(64, b, RM)
    };
    for limb in digits.iter().rev() {
        acc = acc.mul(&shift, b, RM).add(&hp::from_u64(*limb, p), b, RM);
    }
    if sign == num_bigint::Sign::Minus {
        acc.neg()
    } else {
        acc
    }
}

/// Rational to extended precision.
pub fn rational_to_r(q: &BigRational, p: Prec) -> BigFloat {
    let num = bigint_to_r(q.numer(), p);
    let den = bigint_to_r(q.denom(), p);
    num.div(&den, p.bits(), RM)
}

#[allow(dead_code)]
fn is_negative(q: &BigRational) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        // B_2 = 1/6, B_4 = -1/30, B_12 = -691/2730
        assert_eq!(*bern(1), BigRational::new(BigInt::from(1), BigInt::from(6)));
        assert_eq!(*bern(2), BigRational::new(BigInt::from(-1), BigInt::from(30)));
        assert_eq!(*bern(6), BigRational::new(BigInt::from(-691), BigInt::from(2730)));
    }

    #[test]
    fn conversion_matches_f64() {
        let p = Prec::from_digits(30);
        let v = hp::to_f64(&rational_to_r(bern(1), p));
        assert!((v - 1.0 / 6.0).abs() < 1e-16);
        let big = hp::to_f64(&rational_to_r(bern(10), p)); // B_20 = -174611/330
        assert!((big - (-174611.0 / 330.0)).abs() < 1e-9);
    }
}
