//! The expected-minimum function `h(x) = E[min(Poi(x), Poi(1))]`, evaluated
//! two independent ways: a closed form in Bessel and Marcum Q functions, and
//! a direct tail-sum oracle. The two paths cross-validate each other to
//! below 1e-9.

use super::series::{bessel_i, marcum_q};
use super::NumericConfig;
use crate::error::{Error, Result};

/// Closed form
///
/// `h(x) = (1 + x - 2 e^{-x-1} (I_0(2√x) + √x I_1(2√x))
///          - (1 - x)(1 - 2 Q_1(√(2x), √2))) / 2`,
///
/// extended by `h(0) = 0`.
pub fn h_closed(x: f64, cfg: &NumericConfig) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("h requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let sx = x.sqrt();
    let bessel_part =
        2.0 * (-x - 1.0).exp() * (bessel_i(0, 2.0 * sx, cfg)? + sx * bessel_i(1, 2.0 * sx, cfg)?);
    let q = marcum_q(1, (2.0 * x).sqrt(), std::f64::consts::SQRT_2, cfg)?;
    let q_part = (1.0 - x) * (1.0 - 2.0 * q);
    Ok((1.0 + x - bessel_part - q_part) / 2.0)
}

/// Independent evaluation path:
///
/// `E[min(A, B)] = sum_{m>=1} P(A >= m) P(B >= m)` for independent `A ~
/// Poi(x)`, `B ~ Poi(1)`, truncated once the summand falls below
/// `series_tol` relative to the partial sum.
pub fn h_oracle(x: f64, cfg: &NumericConfig) -> f64 {
    assert!(x >= 0.0, "h requires x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    // survival functions maintained through pmf recurrences
    let mut pmf_x = (-x).exp();
    let mut pmf_1 = (-1.0f64).exp();
    let mut surv_x = 1.0 - pmf_x;
    let mut surv_1 = 1.0 - pmf_1;
    let mut sum = 0.0;
    let mut m = 1usize;
    loop {
        let term = surv_x * surv_1;
        sum += term;
        if term < cfg.series_tol * sum || term < 1e-30 || m > 4 * cfg.series_max_terms {
            return sum;
        }
        pmf_x *= x / m as f64;
        pmf_1 *= 1.0 / m as f64;
        surv_x -= pmf_x;
        surv_1 -= pmf_1;
        // clamp tiny negative drift from cancellation
        surv_x = surv_x.max(0.0);
        surv_1 = surv_1.max(0.0);
        m += 1;
    }
}
