use serde::Serialize;

use crate::error::{Error, Result};

use super::integrate::{solve, SolveOptions, Trajectory};
use super::params::{State, SystemParams};

/// `T₀ = ln(1 + 1/y₀) / (2c_s)` with `y₀ = ‖u₀‖_{H^s} + ‖ρ₀‖_{H^{s-2}}`;
/// `+∞` for zero data.
pub fn t0_lower_bound(initial: &State, s: f64, params: &SystemParams) -> Result<f64> {
    t0_from_norm(initial.pair_norm(s), params.c_s)
}

pub fn t0_from_norm(y0: f64, c_s: f64) -> Result<f64> {
    if !(c_s > 0.0 && c_s.is_finite()) {
        return Err(Error::InvalidParameter(format!("c_s must be positive, got {c_s}")));
    }
    if !(y0 >= 0.0 && y0.is_finite()) {
        return Err(Error::NonFinite("initial norm"));
    }
    if y0 == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 / y0).ln_1p() / (2.0 * c_s))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeBoundReport {
    pub c_s: f64,
    pub t0: f64,
    pub y0: f64,
    /// `2 e^{c_s T₀} y₀`.
    pub bound: f64,
    /// `max y(t) / bound` over the checked window.
    pub max_ratio: f64,
    pub first_violation: Option<f64>,
    pub checked_entries: usize,
    pub passed: bool,
}

/// Checks `y(t) ≤ 2 e^{c_s T₀} y(0)` on every ledger entry with `t ≤ T₀`.
/// With zero data (`T₀ = ∞`) the whole ledger is checked.
pub fn size_bound_check(traj: &Trajectory, initial_y: f64, params: &SystemParams) -> Result<SizeBoundReport> {
    let t0 = t0_from_norm(initial_y, params.c_s)?;
    let t_start = traj.ledger[0].t;
    if t0.is_finite() && traj.end_time() - t_start < t0 * (1.0 - 1e-12) {
        return Err(Error::Trajectory(format!(
            "trajectory ends at {} but T0 = {t0}",
            traj.end_time()
        )));
    }
    let bound = if t0.is_finite() {
        2.0 * (params.c_s * t0).exp() * initial_y
    } else {
        0.0
    };
    let mut max_ratio = 0.0f64;
    let mut first_violation = None;
    let mut checked = 0;
    for e in traj.ledger.iter().filter(|e| e.t - t_start <= t0 * (1.0 + 1e-12)) {
        checked += 1;
        let ratio = if e.y == 0.0 { 0.0 } else { e.y / bound };
        max_ratio = max_ratio.max(ratio);
        if ratio > 1.0 && first_violation.is_none() {
            first_violation = Some(e.t);
        }
    }
    Ok(SizeBoundReport {
        c_s: params.c_s,
        t0,
        y0: initial_y,
        bound,
        max_ratio,
        first_violation,
        checked_entries: checked,
        passed: first_violation.is_none(),
    })
}

/// Smallest `c ≥ 0` with `ẏ ≤ c (y² + y)` at every interior ledger point,
/// `ẏ` by centered differences.
pub fn fit_min_cs(traj: &Trajectory) -> Result<f64> {
    let ledger = &traj.ledger;
    if ledger.len() < 10 {
        return Err(Error::Trajectory(format!(
            "need at least 10 ledger entries to fit c_s, got {}",
            ledger.len()
        )));
    }
    let mut c = 0.0f64;
    for w in ledger.windows(3) {
        let (a, m, b) = (&w[0], &w[1], &w[2]);
        if m.y == 0.0 {
            continue;
        }
        let ydot = (b.y - a.y) / (b.t - a.t);
        let ratio = ydot / (m.y * m.y + m.y);
        if !ratio.is_finite() {
            return Err(Error::Trajectory("non-finite ledger entry".into()));
        }
        c = c.max(ratio);
    }
    Ok(c)
}

/// Outcome of a self-consistent existence-time probe.
#[derive(Clone, Debug)]
pub struct ExistenceProbe {
    pub y0: f64,
    /// `T₀` with the supplied `c_s`.
    pub t0_input: f64,
    pub c_fit: f64,
    /// `T₀` with the fitted constant.
    pub t0_fit: f64,
    pub trajectory: Trajectory,
    /// `None` when the trajectory could not reach the fitted `T₀`.
    pub size_bound: Option<SizeBoundReport>,
}

impl ExistenceProbe {
    /// Solves to the `T₀` implied by `params.c_s`, fits the minimal constant,
    /// and extends the horizon until it covers the fitted `T₀` (at most
    /// `max_horizon`).
    pub fn run(
        initial: &State,
        params: &SystemParams,
        s: f64,
        max_horizon: f64,
        options: &SolveOptions,
    ) -> Result<Self> {
        const MAX_ROUNDS: usize = 8;
        const MIN_STEPS: usize = 64;
        let y0 = initial.pair_norm(s);
        let t0_input = t0_lower_bound(initial, s, params)?;
        let mut horizon = if t0_input.is_finite() {
            t0_input.min(max_horizon)
        } else {
            max_horizon
        };
        let options = SolveOptions {
            min_steps: options.min_steps.max(MIN_STEPS),
            ..options.clone()
        };
        let mut round = 0;
        loop {
            round += 1;
            let trajectory = solve(initial, params, s, initial.t + horizon, &options)?;
            let c_fit = fit_min_cs(&trajectory)?;
            let t0_fit = if c_fit > 0.0 {
                t0_from_norm(y0, c_fit)?
            } else {
                f64::INFINITY
            };
            let covered = trajectory.is_complete() && (!t0_fit.is_finite() || t0_fit <= horizon);
            let at_cap = horizon >= max_horizon || !trajectory.is_complete();
            if covered || at_cap || round == MAX_ROUNDS {
                let size_bound = if covered && c_fit > 0.0 {
                    Some(size_bound_check(&trajectory, y0, &params.with_c_s(c_fit))?)
                } else if covered {
                    Some(size_bound_check(&trajectory, y0, params)?)
                } else {
                    None
                };
                return Ok(Self {
                    y0,
                    t0_input,
                    c_fit,
                    t0_fit,
                    trajectory,
                    size_bound,
                });
            }
            horizon = (1.05 * t0_fit).min(max_horizon);
        }
    }
}
