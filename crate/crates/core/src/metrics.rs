//! Image quality metrics.

use crate::vector::RealVector;
use crate::{Error, Result};

/// PSNR reported for identical images.
pub const PSNR_CAP_DB: f64 = 300.0;

/// Peak signal-to-noise ratio with peak 1: `10·log₁₀(1 / MSE)`, capped at
/// [`PSNR_CAP_DB`].
pub fn psnr(x: &RealVector, reference: &RealVector) -> Result<f64> {
    if x.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            found: x.len(),
        });
    }
    let sse: f64 = x
        .as_slice()
        .iter()
        .zip(reference.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let mse = sse / x.len() as f64;
    if mse.is_nan() {
        return Ok(f64::NAN);
    }
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((-10.0 * libm::log10(mse)).min(PSNR_CAP_DB))
}

/// Percentage PSNR improvement `(psnr_n − psnr_0) / psnr_0 · 100`.
pub fn pct_improvement(psnr_n: f64, psnr_0: f64) -> Result<f64> {
    if psnr_0.is_nan() || psnr_0 <= 0.0 {
        return Err(Error::UndefinedMetric("reference PSNR must be positive"));
    }
    Ok((psnr_n - psnr_0) / psnr_0 * 100.0)
}
