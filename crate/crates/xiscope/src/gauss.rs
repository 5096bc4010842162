//! Gauss-Legendre nodes and weights on [-1, 1] at working precision.
//!
//! Nodes come from Newton iteration on `P_n` seeded with the Chebyshev-angle
//! approximation; f64 seeds are already ~1e-15 accurate, so a handful of
//! quadratically convergent steps reaches any practical precision.

use astro_float::BigFloat;

use crate::hp::{self, Prec, RM};

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<BigFloat>,
    pub weights: Vec<BigFloat>,
}

/// Evaluate `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_pair(n: u32, x: &BigFloat, p: Prec) -> (BigFloat, BigFloat) {
    let b = p.bits();
    let mut pk_minus = hp::one(p);
    let mut pk = x.clone();
    for k in 2..=n as u64 {
        let a = hp::from_u64(2 * k - 1, p).mul(x, b, RM).mul(&pk, b, RM);
        let c = hp::from_u64(k - 1, p).mul(&pk_minus, b, RM);
        let next = a.sub(&c, b, RM).div(&hp::from_u64(k, p), b, RM);
        pk_minus = pk;
        pk = next;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = x.mul(&pk, b, RM).sub(&pk_minus, b, RM).mul(&hp::from_u64(n as u64, p), b, RM);
    let den = x.mul(x, b, RM).sub(&hp::one(p), b, RM);
    (pk, num.div(&den, b, RM))
}

pub fn gauss_legendre(n: u32, p: Prec) -> GaussLegendre {
    assert!(n >= 2, "rule order must be at least 2");
    let b = p.bits();
    let mut nodes = vec![hp::zero(p); n as usize];
    let mut weights = vec![hp::zero(p); n as usize];
    let two = hp::from_u64(2, p);

    let half = (n as usize + 1) / 2;
    for i in 0..half {
        let seed = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = hp::real(seed, p);
        let stop = hp::pow10_neg(2, p).mul(&hp::real(2f64.powi(-(b as i32 - 16)), p), b, RM);
        for _ in 0..16 {
            let (pn, dp) = legendre_pair(n, &x, p);
            let dx = pn.div(&dp, b, RM);
            x = x.sub(&dx, b, RM);
            if hp::abs_le(&dx, &stop) {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, &x, p);
        let one_minus_x2 = hp::one(p).sub(&x.mul(&x, b, RM), b, RM);
        let w = two.div(&one_minus_x2.mul(&dp.mul(&dp, b, RM), b, RM), b, RM);
        // mirror: nodes are symmetric about 0
        let j = n as usize - 1 - i;
        nodes[j] = x.clone();
        weights[j] = w.clone();
        nodes[i] = x.neg();
        weights[i] = w;
    }
    if n % 2 == 1 {
        // the middle node is exactly 0
        let mid = half - 1;
        nodes[mid] = hp::zero(p);
        let (_, dp) = legendre_pair(n, &hp::zero(p), p);
        weights[mid] = two.div(&dp.mul(&dp, b, RM), b, RM);
    }
    GaussLegendre { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::to_f64;

    #[test]
    fn nodes_match_reference_16() {
        // largest three abscissae of the 16-point rule
        let rule = gauss_legendre(16, Prec::from_digits(40));
        let known = [0.9894009349916499, 0.9445750230732326, 0.8656312023878318];
        for (i, k) in known.iter().enumerate() {
            let x = to_f64(&rule.nodes[15 - i]);
            assert!((x - k).abs() < 1e-14, "node {i}: {x} vs {k}");
        }
        let w0 = to_f64(&rule.weights[15]);
        assert!((w0 - 0.027152459411754095).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [8u32, 13, 16, 24] {
            let p = Prec::from_digits(50);
            let rule = gauss_legendre(n, p);
            let mut s = hp::zero(p);
            for w in &rule.weights {
                s = s.add(w, p.bits(), RM);
            }
            let diff = s.sub(&hp::from_u64(2, p), p.bits(), RM);
            assert!(hp::abs_le(&diff, &hp::pow10_neg(45, p)), "n = {n}");
        }
    }

    #[test]
    fn integrates_monomials_exactly() {
        // degree <= 2n-1 must be exact: check x^14 with n = 8
        let p = Prec::from_digits(40);
        let rule = gauss_legendre(8, p);
        let b = p.bits();
        let mut s = hp::zero(p);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s = s.add(&x.powi(14, b, RM).mul(w, b, RM), b, RM);
        }
        // integral of x^14 over [-1,1] = 2/15
        let diff = s.sub(&hp::ratio(2, 15, p), b, RM);
        assert!(hp::abs_le(&diff, &hp::pow10_neg(36, p)));
    }
}
