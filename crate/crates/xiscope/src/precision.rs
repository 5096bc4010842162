//! Working-precision configuration and the digit schedule.
//!
//! The kernel integral has magnitude comparable to the scale
//! `M(t) ~ e^{-t*pi/4}` while its integrand stays O(1), so evaluating at
//! height `t` burns about `t*pi/(4 ln 10) ~ 0.3413*t` decimal digits to
//! cancellation. The schedule adds 30 guard digits on top of that.

use crate::error::{Error, Result};
use crate::hp::Prec;

/// Decimal digits of cancellation per unit of `t`.
pub const DIGITS_PER_T: f64 = 0.3413;

/// Guard digits on top of the cancellation estimate.
pub const GUARD_DIGITS: u32 = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionConfig {
    /// Decimal working precision.
    pub digits: u32,
    /// Series are truncated when the next term drops below `10^-k` relative.
    pub series_eps_exponent: u32,
    /// Floor for the kernel-integral truncation point; the effective
    /// truncation is pushed further out until the tail bound is met.
    pub x_max: f64,
    /// Gauss-Legendre nodes per oscillation half-period.
    pub nodes_per_halfperiod: u32,
    /// Refinement of the zero-bracketing grid relative to mean zero spacing.
    pub grid_factor: f64,
}

impl PrecisionConfig {
    pub fn new(digits: u32) -> Result<Self> {
        let cfg = PrecisionConfig {
            digits,
            series_eps_exponent: digits + 5,
            x_max: 40.0,
            nodes_per_halfperiod: 16,
            grid_factor: 10.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Schedule precision for evaluations up to height `t_max`.
    pub fn auto_for_t(t_max: f64) -> Result<Self> {
        Self::new(required_digits(t_max))
    }

    pub fn validate(&self) -> Result<()> {
        if self.digits < 20 {
            return Err(Error::Config(format!("digits must be >= 20, got {}", self.digits)));
        }
        if !(self.x_max >= 2.0) {
            return Err(Error::Config(format!("x_max must be >= 2, got {}", self.x_max)));
        }
        if self.nodes_per_halfperiod < 8 {
            return Err(Error::Config(format!(
                "nodes_per_halfperiod must be >= 8, got {}",
                self.nodes_per_halfperiod
            )));
        }
        if !(self.grid_factor > 0.0) {
            return Err(Error::Config(format!("grid_factor must be positive, got {}", self.grid_factor)));
        }
        Ok(())
    }

    pub fn prec(&self) -> Prec {
        Prec::from_digits(self.digits)
    }

    /// Error if this configuration cannot resolve height `t`.
    pub fn check_height(&self, t: f64) -> Result<()> {
        let required = required_digits(t);
        if self.digits < required {
            return Err(Error::Precision { required, given: self.digits });
        }
        Ok(())
    }
}

/// Digits needed to evaluate the kernel integral at height `t`.
pub fn required_digits(t: f64) -> u32 {
    (DIGITS_PER_T * t.abs()).ceil() as u32 + GUARD_DIGITS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        assert_eq!(required_digits(0.0), 30);
        assert_eq!(required_digits(60.0), 21 + 30);
        assert_eq!(required_digits(110.0), 38 + 30);
    }

    #[test]
    fn invariants_enforced() {
        assert!(PrecisionConfig::new(19).is_err());
        let mut cfg = PrecisionConfig::new(30).unwrap();
        cfg.x_max = 1.0;
        assert!(cfg.validate().is_err());
        cfg.x_max = 2.0;
        cfg.nodes_per_halfperiod = 4;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn height_check() {
        let cfg = PrecisionConfig::new(40).unwrap();
        assert!(cfg.check_height(20.0).is_ok());
        match cfg.check_height(60.0) {
            Err(Error::Precision { required, given }) => {
                assert_eq!(required, 51);
                assert_eq!(given, 40);
            }
            other => panic!("expected precision error, got {other:?}"),
        }
    }
}
