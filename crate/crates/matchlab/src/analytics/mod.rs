//! Closed-form and numerical evaluation of the matching performance theory:
//! the expected-minimum function `h`, the greedy ODE, the fixed-point bound
//! on maximum matchings, ratio curves with their minimizer, the
//! perfect-matching limit, and the capped-Bernoulli-sum minimization check.

mod bermin;
mod bounds;
mod hfun;
mod ode;
mod ratio;
mod series;

pub use bermin::{
    check_equal_split_minimizes, min_ber_sum_expectation, poisson_binomial_pmf, BerMinQuery,
    EqualSplitReport,
};
pub use bounds::{
    bb_upper_bound, greedy_fraction_gnnp, opt_upper_rtpam, perfect_matching_limit,
    FixedPointResult,
};
pub use hfun::{h_closed, h_oracle};
pub use ode::{greedy_fraction_rtpam, greedy_fraction_trajectory};
pub use ratio::{
    analysis_curve, minimize_ratio, minimize_ratio_gnnp, ratio_lower_gnnp, ratio_lower_rtpam,
    AnalysisResult, CurvePoint, MinimizeResult,
};
pub use series::{bessel_i, marcum_q};

use crate::error::{Error, Result};

/// Tolerances and budgets for the numeric routines.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NumericConfig {
    /// Relative truncation tolerance for series.
    pub series_tol: f64,
    /// Hard cap on series terms before reporting non-convergence.
    pub series_max_terms: usize,
    /// Fixed step for the ODE integrator; must divide 1 within rounding.
    pub ode_step: f64,
    /// Residual tolerance of the fixed-point iteration.
    pub fixedpoint_tol: f64,
    /// Iteration cap of the fixed-point iteration.
    pub fixedpoint_max_iters: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            series_tol: 1e-14,
            series_max_terms: 500,
            ode_step: 1e-4,
            fixedpoint_tol: 1e-12,
            fixedpoint_max_iters: 1_000_000,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0) {
            return Err(Error::InvalidParameter("series_tol must be positive".into()));
        }
        if self.series_max_terms == 0 {
            return Err(Error::InvalidParameter("series_max_terms must be positive".into()));
        }
        if !(self.ode_step > 0.0 && self.ode_step <= 1.0) {
            return Err(Error::InvalidParameter("ode_step must be in (0, 1]".into()));
        }
        let steps = (1.0 / self.ode_step).round();
        if (steps * self.ode_step - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "ode_step {} does not divide 1",
                self.ode_step
            )));
        }
        if !(self.fixedpoint_tol > 0.0) {
            return Err(Error::InvalidParameter("fixedpoint_tol must be positive".into()));
        }
        if self.fixedpoint_max_iters == 0 {
            return Err(Error::InvalidParameter("fixedpoint_max_iters must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn ode_steps(&self) -> usize {
        (1.0 / self.ode_step).round() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        NumericConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_non_dividing_step() {
        let cfg = NumericConfig { ode_step: 0.3, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
