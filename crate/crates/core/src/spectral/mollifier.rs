//! Friedrichs mollifier `J_ε f = j_ε * f` as a Fourier multiplier.
//!
//! The bump is `j(x) = Z⁻¹ exp(1/(x²-1))` on `(-1, 1)`. Its transform
//! `ĵ(ω) = ∫ j(x) cos(ωx) dx` is tabulated by adaptive quadrature at
//! `ω = ε ξ_k` for `k = 0..=N`, which covers both the grid and its
//! refinement (where alias-free commutators are evaluated).

use std::sync::OnceLock;

use super::field::Field;
use super::grid::Grid;
use super::ops::{dx, product_exact};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

fn bump(x: f64) -> f64 {
    let d = x * x - 1.0;
    if d >= 0.0 {
        0.0
    } else {
        (1.0 / d).exp()
    }
}

const QUAD_TOL: Tolerance = Tolerance {
    abs: 1e-12,
    rel: 0.0,
    max_intervals: 20_000,
};

/// `∫_0^1 exp(1/(x²-1)) cos(ωx) dx`, the unnormalized half transform.
fn half_transform(omega: f64) -> Result<f64> {
    let panels = ((omega / std::f64::consts::PI).ceil() as usize).clamp(1, 4096);
    let breaks: Vec<f64> = (1..panels).map(|i| i as f64 / panels as f64).collect();
    Ok(integrate(|x| bump(x) * (omega * x).cos(), 0.0, 1.0, &breaks, QUAD_TOL)?.value)
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| half_transform(0.0).expect("bump mass quadrature converges"))
}

/// Normalized transform `ĵ(ω)`, clamped to `[-1, 1]`.
pub fn bump_transform(omega: f64) -> Result<f64> {
    if omega == 0.0 {
        return Ok(1.0);
    }
    Ok((half_transform(omega.abs())? / bump_mass()).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug)]
pub struct MollifierTable {
    grid: Grid,
    epsilon: f64,
    samples: Vec<f64>,
}

impl MollifierTable {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `ĵ(ε ξ_k)` for `k = 0..=N` (the refined grid's half spectrum).
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn accepts(&self, grid: &Grid) -> bool {
        *grid == self.grid || *grid == self.grid.refined()
    }
}

/// Tabulates `ĵ(εξ_k)`. Requires `0 < ε ≤ 1` and `ε < L/2`.
pub fn build_mollifier(grid: &Grid, epsilon: f64) -> Result<MollifierTable> {
    if !(epsilon > 0.0 && epsilon <= 1.0 && epsilon < grid.length() / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "mollifier scale must satisfy 0 < ε ≤ 1 and ε < L/2, got {epsilon}"
        )));
    }
    let samples = (0..=grid.points())
        .map(|k| bump_transform(epsilon * grid.wavenumber(k as i64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MollifierTable {
        grid: grid.clone(),
        epsilon,
        samples,
    })
}

/// `J_ε f`. Accepts fields on the table's grid or on its refinement.
pub fn mollify(f: &Field, table: &MollifierTable) -> Result<Field> {
    if !table.accepts(f.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(f.map_modes(|k, c| c * table.samples[k]))
}

/// `[J_ε, f] ∂ₓg = J_ε(f ∂ₓg) - f J_ε(∂ₓg)`, alias-free on the refined grid.
pub fn commutator_mollifier(table: &MollifierTable, f: &Field, g: &Field) -> Result<Field> {
    f.same_grid(g)?;
    if *f.grid() != table.grid {
        return Err(Error::GridMismatch);
    }
    let gx = dx(g, 1);
    let inner = product_exact(f, &gx)?;
    let outer = product_exact(f, &mollify(&gx, table)?)?;
    Ok(&mollify(&inner, table)? - &outer)
}
