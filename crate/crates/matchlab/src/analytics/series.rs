//! Series evaluation of the modified Bessel functions of the first kind and
//! the generalized Marcum Q function.
//!
//! Both series have terms that grow before they decay, so the truncation
//! rule only fires in the decreasing phase: stop once a term is below
//! `series_tol` relative to the partial sum (with a 1e-30 absolute floor)
//! and smaller than its predecessor.

use super::NumericConfig;
use crate::error::{Error, Result};

const ABS_FLOOR: f64 = 1e-30;

/// `I_k(x) = sum_i (x/2)^{2i+k} / (i! (i+k)!)` for integer `k >= 0`,
/// `x >= 0`.
pub fn bessel_i(k: u32, x: f64, cfg: &NumericConfig) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("bessel_i requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let half = x / 2.0;
    // leading term (x/2)^k / k!, built as a product so it underflows
    // gracefully for large k
    let mut term = 1.0f64;
    for j in 1..=k as u64 {
        term *= half / j as f64;
    }
    let mut sum = term;
    let ratio_sq = half * half;
    for i in 0..cfg.series_max_terms {
        let next = term * ratio_sq / ((i as f64 + 1.0) * (i as f64 + 1.0 + k as f64));
        sum += next;
        let decreasing = next < term;
        term = next;
        if decreasing && (term < cfg.series_tol * sum.abs() || term < ABS_FLOOR) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesDivergence {
        what: "bessel_i",
        x,
        max_terms: cfg.series_max_terms,
    })
}

/// Generalized Marcum Q function for integer order `n >= 1`:
///
/// `Q_n(a, b) = exp(-(a^2+b^2)/2) * sum_{k=1-n}^inf (a/b)^k I_k(ab)`,
///
/// using the symmetry `I_{-k} = I_k` for the finitely many negative indices.
/// At `a = 0` the series collapses to the first `n` Poisson terms:
/// `Q_1(0, b) = exp(-b^2/2)`.
pub fn marcum_q(n: u32, a: f64, b: f64, cfg: &NumericConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("marcum_q requires n >= 1".into()));
    }
    if !(a >= 0.0) || !(b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "marcum_q requires a >= 0 and b > 0, got a = {a}, b = {b}"
        )));
    }
    if a == 0.0 {
        // only the k = 0, ..., 1-n terms survive as the Poisson tail
        let lambda = b * b / 2.0;
        let mut term = 1.0f64;
        let mut sum = term;
        for j in 1..n as u64 {
            term *= lambda / j as f64;
            sum += term;
        }
        return Ok((-lambda).exp() * sum);
    }

    let prefactor = (-(a * a + b * b) / 2.0).exp();
    let z = a * b;
    let t = a / b;

    // negative indices, k = 1-n ..= -1
    let mut sum = 0.0f64;
    for k in 1..n {
        sum += t.powi(-(k as i32)) * bessel_i(k, z, cfg)?;
    }

    // nonnegative indices with growth-then-decay truncation
    let mut prev = f64::INFINITY;
    let mut t_pow = 1.0f64;
    for k in 0..cfg.series_max_terms as u32 {
        let term = t_pow * bessel_i(k, z, cfg)?;
        sum += term;
        let decreasing = term < prev;
        if decreasing && (term < cfg.series_tol * sum.abs() || term < ABS_FLOOR) {
            return Ok(prefactor * sum);
        }
        prev = term;
        t_pow *= t;
    }
    Err(Error::SeriesDivergence {
        what: "marcum_q",
        x: z,
        max_terms: cfg.series_max_terms,
    })
}
