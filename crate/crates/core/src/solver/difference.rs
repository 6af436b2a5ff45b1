use crate::error::{Error, Result};
use crate::spectral::Field;

use super::integrate::Trajectory;
use super::params::{DifferenceState, SystemParams};
use super::rhs::{diff_rhs_unchecked, rhs_unchecked};

/// Difference-system solution alongside its subtraction cross-check.
#[derive(Clone, Debug)]
pub struct DifferenceRun {
    pub states: Vec<DifferenceState>,
    /// `max_t ‖w − (u−v)‖_{H^r} + ‖η − (ρ−θ)‖_{H^{r-2}}`.
    pub defect: f64,
    /// `max_t ‖u−v‖_{H^r} + ‖ρ−θ‖_{H^{r-2}}`.
    pub max_difference: f64,
}

/// Integrates the difference system driven by two stride-1 trajectories on
/// a common time grid. Drivers at the RK4 half stage come from cubic Hermite
/// interpolation of the neighbouring stored states and their time
/// derivatives.
pub fn diff_solve(
    u_traj: &Trajectory,
    v_traj: &Trajectory,
    params: &SystemParams,
    r: f64,
) -> Result<DifferenceRun> {
    params.validate()?;
    let n = u_traj.states.len();
    if u_traj.ledger.len() != n || v_traj.ledger.len() != v_traj.states.len() {
        return Err(Error::Trajectory("difference solve needs every state (stride 1)".into()));
    }
    if v_traj.states.len() != n {
        return Err(Error::Trajectory(format!(
            "trajectories have {n} and {} states",
            v_traj.states.len()
        )));
    }
    if u_traj.grid() != v_traj.grid() {
        return Err(Error::GridMismatch);
    }
    for (a, b) in u_traj.states.iter().zip(&v_traj.states) {
        if (a.t - b.t).abs() > 1e-12 * a.t.abs().max(1.0) {
            return Err(Error::Trajectory(format!("time grids differ at t = {}", a.t)));
        }
    }

    let mut state = DifferenceState::between(&u_traj.states[0], &v_traj.states[0])?;
    let mut states = Vec::with_capacity(n);
    states.push(state.clone());
    let mut defect = 0.0f64;
    let mut max_difference = state.pair_norm(r);

    let slope = |i: usize| {
        (
            rhs_unchecked(&u_traj.states[i].u, &u_traj.states[i].rho, params),
            rhs_unchecked(&v_traj.states[i].u, &v_traj.states[i].rho, params),
        )
    };
    let mut d0 = slope(0);
    for i in 0..n - 1 {
        let (u0, u1) = (&u_traj.states[i], &u_traj.states[i + 1]);
        let (v0, v1) = (&v_traj.states[i], &v_traj.states[i + 1]);
        let dt = u1.t - u0.t;
        let d1 = slope(i + 1);
        // p(1/2) = (a + b)/2 + dt (a' − b')/8
        let mid = |a: &Field, b: &Field, da: &Field, db: &Field| {
            a.axpy(1.0, b)
                .and_then(|m| m.axpy(0.25 * dt, da))
                .and_then(|m| m.axpy(-0.25 * dt, db))
                .expect("same grid")
                .scale(0.5)
        };
        let um = mid(&u0.u, &u1.u, &d0.0 .0, &d1.0 .0);
        let rm = mid(&u0.rho, &u1.rho, &d0.0 .1, &d1.0 .1);
        let vm = mid(&v0.u, &v1.u, &d0.1 .0, &d1.1 .0);
        let tm = mid(&v0.rho, &v1.rho, &d0.1 .1, &d1.1 .1);
        d0 = d1;

        let f0 = |w: &Field, e: &Field| diff_rhs_unchecked(w, e, &u0.u, &v0.u, &u0.rho, &v0.rho, params);
        let fm = |w: &Field, e: &Field| diff_rhs_unchecked(w, e, &um, &vm, &rm, &tm, params);
        let f1 = |w: &Field, e: &Field| diff_rhs_unchecked(w, e, &u1.u, &v1.u, &u1.rho, &v1.rho, params);
        let shift = |h: f64, kw: &Field, ke: &Field| {
            (
                state.w.axpy(h, kw).expect("same grid"),
                state.eta.axpy(h, ke).expect("same grid"),
            )
        };

        let (k1w, k1e) = f0(&state.w, &state.eta);
        let (w2, e2) = shift(0.5 * dt, &k1w, &k1e);
        let (k2w, k2e) = fm(&w2, &e2);
        let (w3, e3) = shift(0.5 * dt, &k2w, &k2e);
        let (k3w, k3e) = fm(&w3, &e3);
        let (w4, e4) = shift(dt, &k3w, &k3e);
        let (k4w, k4e) = f1(&w4, &e4);
        let combine = |y: &Field, a: &Field, b: &Field, c: &Field, d: &Field| {
            y.axpy(dt / 6.0, a)
                .and_then(|y| y.axpy(dt / 3.0, b))
                .and_then(|y| y.axpy(dt / 3.0, c))
                .and_then(|y| y.axpy(dt / 6.0, d))
                .expect("same grid")
        };
        state = DifferenceState {
            w: combine(&state.w, &k1w, &k2w, &k3w, &k4w),
            eta: combine(&state.eta, &k1e, &k2e, &k3e, &k4e),
            t: u1.t,
        };
        if !state.w.is_finite() || !state.eta.is_finite() {
            return Err(Error::NonFinite("difference system"));
        }

        let exact = DifferenceState::between(u1, v1)?;
        let gap = DifferenceState {
            w: &state.w - &exact.w,
            eta: &state.eta - &exact.eta,
            t: u1.t,
        };
        defect = defect.max(gap.pair_norm(r));
        max_difference = max_difference.max(exact.pair_norm(r));
        states.push(state.clone());
    }

    Ok(DifferenceRun {
        states,
        defect,
        max_difference,
    })
}
