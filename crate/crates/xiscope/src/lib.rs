//! High-precision toolkit around the completed zeta function `xi` on the
//! shifted critical strip `tau = beta + it`.
//!
//! Two independent evaluation routes are implemented and cross-validated:
//!
//! * [`kernel`] — the symmetric kernel transform of the theta decay
//!   function, `xi(tau) = int_1^inf (x^{tau/2}+x^{-tau/2}) x^{-3/4} f(x) dx`
//!   with `f = 2x^2 psi'' + 3x psi'`, evaluated by panel Gauss-Legendre
//!   quadrature at scheduled precision;
//! * [`oracle`] — the product formula
//!   `xi(s) = s(s-1)/2 pi^{-s/2} Gamma(s/2) zeta(s)` through Euler-Maclaurin
//!   zeta and Stirling log-gamma.
//!
//! On top of the evaluators, [`scanner`] detects root-intervals of
//! `Re xi(beta + it)` and verifies the local peak-valley structure: the
//! sign law of `Im xi` at interval endpoints, the single interior extremum,
//! and the positivity of the strip norm `|u| + |v|/beta`, together with
//! scan-wide checks (zero counts against the density main term, the
//! positivity functional `u v_t - v u_t`, and reconstruction of `v` from
//! `u_t`). A closed-form fixture model exercises the same machinery with
//! exactly known answers.

pub mod bernoulli;
pub mod complex;
pub mod error;
pub mod gauss;
pub mod hp;
pub mod kernel;
pub mod oracle;
pub mod parallel;
pub mod precision;
pub mod report;
pub mod scanner;
pub mod suites;
pub mod synthetic;
pub mod theta;

pub use complex::Complex;
pub use error::{Error, Result};
pub use kernel::{
    eval_kernel_transform, eval_xi, eval_xi_derivative, norm_xi, scale_m, t_gradient,
    DerivativeValue, KernelFunction, ScaledSample, StripPoint, XiEvaluator, XiValue,
};
pub use precision::{required_digits, PrecisionConfig};
pub use scanner::{
    build_root_intervals, find_u_zeros, lagarias_psi, lagarias_ratio, lemma1_residual, min_norm,
    scan_range, verify_peak_valley, zero_count_check, CheckOutcome, CheckSet, ExitClass, Failure,
    KernelSource, OracleSource, PvVerdict, RootInterval, ScanReport, StripSource, SyntheticSource,
    ZeroCountCheck, ZeroScan,
};
pub use suites::{run_suite, SuiteOptions, SuiteOutcome, SUITE_NAMES};
pub use synthetic::{synthetic_eval, Observable, SyntheticModel};
pub use theta::{f_decay, jacobi_residual, psi, psi_f64, r1_residual, r1_residual_quarter, ThetaValue};

#[cfg(test)]
mod send_sync {
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_shareable() {
        assert_send_sync::<astro_float::BigFloat>();
        assert_send_sync::<crate::XiEvaluator>();
        assert_send_sync::<crate::KernelFunction>();
    }
}
