//! Closed-form fixture: the analytic model `cosh(tau) - 1 + epsilon`,
//! whose strip components are
//!
//! ```text
//!   u(t, beta) = cosh(beta) cos(t) - 1 + epsilon
//!   v(t, beta) = sinh(beta) sin(t)
//! ```
//!
//! It satisfies the Cauchy-Riemann relations exactly, vanishes in `v` on the
//! critical line, and near `t = 2 pi` reproduces the close-zero geometry:
//! the positive hump of `u` rises by `d = cosh(beta) - 1` as beta grows, so
//! the root interval around `2 pi` widens and its norm floor is
//! `epsilon + d`. The `epsilon = 0` case is the admissible double root.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct SyntheticModel {
    pub epsilon: f64,
    /// Deliberate corruption for exit-code testing: flips the sign of the
    /// imaginary part (and its derivatives), which breaks the endpoint sign
    /// law and drives the positivity functional negative.
    pub flip_v: bool,
}

/// Which component of the model to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    U,
    V,
    Ut,
    Vt,
    UBeta,
    VBeta,
}

impl SyntheticModel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
        }
        Ok(SyntheticModel { epsilon, flip_v: false })
    }

    pub fn corrupted(epsilon: f64) -> Result<Self> {
        let mut m = Self::new(epsilon)?;
        m.flip_v = true;
        Ok(m)
    }

    fn v_sign(&self) -> f64 {
        if self.flip_v {
            -1.0
        } else {
            1.0
        }
    }

    pub fn u(&self, t: f64, beta: f64) -> f64 {
        beta.cosh() * t.cos() - 1.0 + self.epsilon
    }

    pub fn v(&self, t: f64, beta: f64) -> f64 {
        self.v_sign() * beta.sinh() * t.sin()
    }

    pub fn u_t(&self, t: f64, beta: f64) -> f64 {
        -beta.cosh() * t.sin()
    }

    pub fn v_t(&self, t: f64, beta: f64) -> f64 {
        self.v_sign() * beta.sinh() * t.cos()
    }

    pub fn u_beta(&self, t: f64, beta: f64) -> f64 {
        beta.sinh() * t.cos()
    }

    pub fn v_beta(&self, t: f64, beta: f64) -> f64 {
        self.v_sign() * beta.cosh() * t.sin()
    }
}

/// Closed-form evaluation of one model component.
pub fn synthetic_eval(model: &SyntheticModel, t: f64, beta: f64, what: Observable) -> f64 {
    match what {
        Observable::U => model.u(t, beta),
        Observable::V => model.v(t, beta),
        Observable::Ut => model.u_t(t, beta),
        Observable::Vt => model.v_t(t, beta),
        Observable::UBeta => model.u_beta(t, beta),
        Observable::VBeta => model.v_beta(t, beta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn beta_symmetry() {
        let m = SyntheticModel::new(0.01).unwrap();
        for t in [0.0, 1.0, 5.7, 2.0 * PI] {
            assert_eq!(m.v(t, 0.0), 0.0);
        }
    }

    #[test]
    fn cauchy_riemann_exact() {
        let m = SyntheticModel::new(0.01).unwrap();
        for (t, b) in [(6.0, 0.2), (7.1, 0.45), (2.0, 0.0)] {
            assert_eq!(m.u_beta(t, b), m.v_t(t, b));
            assert_eq!(m.u_t(t, b), -m.v_beta(t, b));
        }
    }

    #[test]
    fn parallel_shift_at_extremum() {
        // at t = 2 pi: u(2pi, beta) = epsilon + (cosh beta - 1)
        let m = SyntheticModel::new(0.01).unwrap();
        let d = 0.2f64.cosh() - 1.0;
        let u = m.u(2.0 * PI, 0.2);
        assert!((u - (0.01 + d)).abs() < 1e-15);
        assert!((u - 0.030066755619075846).abs() < 1e-15);
    }

    #[test]
    fn epsilon_validation() {
        assert!(SyntheticModel::new(-0.1).is_err());
        assert!(SyntheticModel::new(0.0).is_ok());
    }

    #[test]
    fn corruption_flips_v_only() {
        let good = SyntheticModel::new(0.01).unwrap();
        let bad = SyntheticModel::corrupted(0.01).unwrap();
        assert_eq!(bad.v(6.0, 0.2), -good.v(6.0, 0.2));
        assert_eq!(bad.u(6.0, 0.2), good.u(6.0, 0.2));
    }
}
