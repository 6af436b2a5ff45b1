use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Lipschitz,
    InterpolationLow,
    InterpolationHigh,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderCase {
    pub s: f64,
    pub r: f64,
    pub rho_trivial: bool,
    pub beta: f64,
    pub regime: Regime,
}

/// Largest disagreement tolerated where two branches of the law overlap.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Branches of the exponent law that apply at `(s, r)`.
fn branches(s: f64, r: f64, rho_trivial: bool) -> Vec<(Regime, f64)> {
    let r_min = if rho_trivial { 0.0 } else { 1.0 };
    let s_max_low = if rho_trivial { 5.0 } else { 4.0 };
    let mut out = Vec::new();
    if r >= r_min && r <= s - 1.0 && s + r >= 5.0 {
        out.push((Regime::Lipschitz, 1.0));
    }
    if r >= r_min && s > 3.5 && s < s_max_low && r <= 5.0 - s {
        out.push((Regime::InterpolationLow, (2.0 * s - 5.0) / (s - r)));
    }
    if r >= r_min && r > s - 1.0 && r < s {
        out.push((Regime::InterpolationHigh, s - r));
    }
    out
}

/// Hölder exponent of the data-to-solution map from `H^s × H^{s-2}` data
/// into `C([0,T]; H^r × H^{r-2})`. With `rho_trivial` the admissible range
/// widens to `0 ≤ r < s` and the middle branch to `7/2 < s < 5`.
pub fn holder_exponent(s: f64, r: f64, rho_trivial: bool) -> Result<HolderCase> {
    if !(s.is_finite() && r.is_finite()) || s <= 3.5 {
        return Err(Error::OutOfRange { s, r });
    }
    let found = branches(s, r, rho_trivial);
    let (regime, beta) = *found.first().ok_or(Error::OutOfRange { s, r })?;
    if let Some((_, other)) = found.iter().find(|(_, b)| (b - beta).abs() > BOUNDARY_TOLERANCE) {
        return Err(Error::Hypothesis(format!(
            "exponent branches disagree at s = {s}, r = {r}: {beta} vs {other}"
        )));
    }
    Ok(HolderCase {
        s,
        r,
        rho_trivial,
        beta,
        regime,
    })
}
