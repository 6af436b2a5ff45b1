//! The convolution kernel `I(η) = ∫ (1+ξ²)^{r-k} (1+(ξ-η)²)^{-j} dξ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_real_line, Tolerance};

use super::probes::check_negative_product_indices;

/// Growth allowed over the last decade of the scan.
pub const PLATEAU_TOLERANCE: f64 = 0.02;

/// Adaptive quadrature of `I(η)` with mapped algebraic tails. The absolute
/// tolerance is `1e-10`, tightened by the expected size `(1+η²)^{r-k}`.
pub fn kernel_integral(r: f64, j: f64, k: f64, eta: f64) -> Result<f64> {
    if j.is_nan() || j <= 0.5 {
        return Err(Error::Divergent(format!("kernel integral needs j > 1/2, got j = {j}")));
    }
    let decay = 2.0 * j + 2.0 * (k - r);
    if decay <= 1.0 {
        return Err(Error::Divergent(format!(
            "integrand decays like |ξ|^-{decay}, which is not integrable"
        )));
    }
    if !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("η must be finite, got {eta}")));
    }
    let scale = (1.0 + eta * eta).powf(r - k).min(1.0);
    let tol = Tolerance {
        abs: 1e-10 * scale,
        rel: 1e-12,
        max_intervals: 20_000,
    };
    let f = |xi: f64| (1.0 + xi * xi).powf(r - k) * (1.0 + (xi - eta).powi(2)).powf(-j);
    let breaks = [eta.min(0.0) - 1.0, 0.0, eta, eta.max(0.0) + 1.0];
    let est = integrate_real_line(f, &breaks, decay, tol)?;
    Ok(est.value)
}

/// `{0} ∪ logspace(-2, 4)` with `per_decade` points per decade.
pub fn eta_grid(per_decade: usize) -> Vec<f64> {
    let n = 6 * per_decade;
    std::iter::once(0.0)
        .chain((0..=n).map(|i| 10f64.powf(-2.0 + 6.0 * i as f64 / n as f64)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelScan {
    pub r: f64,
    pub j: f64,
    pub k: f64,
    pub sup: f64,
    pub argmax: f64,
    /// `sup over [10³, 10⁴] / sup over η ≤ 10³ − 1`.
    pub last_decade_growth: f64,
    pub plateau: bool,
    pub eta: Vec<f64>,
    pub ratio: Vec<f64>,
}

/// Scans `I(η) / (1+η²)^{r-k}` on `eta` (see [`eta_grid`]).
pub fn kernel_bound_scan(r: f64, j: f64, k: f64, eta: &[f64]) -> Result<KernelScan> {
    check_negative_product_indices(r, j, k)?;
    if eta.is_empty() {
        return Err(Error::InvalidParameter("empty η grid".into()));
    }
    let ratio = eta
        .iter()
        .map(|&e| Ok(kernel_integral(r, j, k, e)? / (1.0 + e * e).powf(r - k)))
        .collect::<Result<Vec<f64>>>()?;
    let (idx, sup) = super::ensemble::argmax(&ratio);
    let head = eta
        .iter()
        .zip(&ratio)
        .filter(|(e, _)| **e <= 1e3)
        .fold(0.0f64, |m, (_, &v)| m.max(v));
    let tail = eta
        .iter()
        .zip(&ratio)
        .filter(|(e, _)| **e >= 1e3)
        .fold(0.0f64, |m, (_, &v)| m.max(v));
    let growth = if head > 0.0 { tail / head - 1.0 } else { f64::INFINITY };
    Ok(KernelScan {
        r,
        j,
        k,
        sup,
        argmax: eta[idx],
        last_decade_growth: growth,
        plateau: sup.is_finite() && growth <= PLATEAU_TOLERANCE,
        eta: eta.to_vec(),
        ratio,
    })
}
