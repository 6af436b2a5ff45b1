//! Right-hand sides of the evolution system and of its difference system.
//!
//! Quadratic terms are formed pointwise from 2/3-truncated factors and the
//! result is truncated again; with that rule every retained mode is alias
//! free, so the algebraic identities between the two systems hold to
//! round-off.

use crate::error::{Error, Result};
use crate::spectral::{dx, helmholtz_inverse_dx, Field};

use super::params::{DifferenceState, State, SystemParams};

fn from_values_like(like: &Field, values: &[f64]) -> Field {
    Field::from_values(like.grid(), values).expect("length matches grid")
}

/// `(u_t, ρ_t)` for
/// `u_t = -u u_x - ∂ₓΛ⁻⁴[b/2 u² + (3-b)u_x² - (b+5)/2 u_xx² + (b-5)u_x u_xxx + κ/2 ρ² - αu]`,
/// `ρ_t = -u ρ_x - (b-1) u_x ρ`.
pub fn rhs(state: &State, params: &SystemParams) -> Result<(Field, Field)> {
    state.u.same_grid(&state.rho)?;
    if !state.u.is_finite() || !state.rho.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    Ok(rhs_unchecked(&state.u, &state.rho, params))
}

pub(crate) fn rhs_unchecked(u_full: &Field, rho_full: &Field, params: &SystemParams) -> (Field, Field) {
    let SystemParams { b, kappa, alpha, .. } = *params;
    let u_t = u_full.dealiased();
    let rho_t = rho_full.dealiased();

    let u = u_t.values();
    let ux = dx(&u_t, 1).values();
    let uxx = dx(&u_t, 2).values();
    let uxxx = dx(&u_t, 3).values();
    let rho = rho_t.values();
    let rhox = dx(&rho_t, 1).values();

    let n = u.len();
    let mut nonlocal = vec![0.0; n];
    let mut advection = vec![0.0; n];
    let mut transport = vec![0.0; n];
    for j in 0..n {
        nonlocal[j] = 0.5 * b * u[j] * u[j] + (3.0 - b) * ux[j] * ux[j]
            - 0.5 * (b + 5.0) * uxx[j] * uxx[j]
            + (b - 5.0) * ux[j] * uxxx[j]
            + 0.5 * kappa * rho[j] * rho[j];
        advection[j] = u[j] * ux[j];
        transport[j] = -u[j] * rhox[j] - (b - 1.0) * ux[j] * rho[j];
    }

    let source = from_values_like(u_full, &nonlocal)
        .dealiased()
        .axpy(-alpha, u_full)
        .expect("same grid");
    let du = from_values_like(u_full, &advection)
        .dealiased()
        .axpy(1.0, &helmholtz_inverse_dx(&source))
        .expect("same grid")
        .scale(-1.0);
    let drho = from_values_like(rho_full, &transport).dealiased();
    (du, drho)
}

/// `(w_t, η_t)` of the difference system driven by `(u, ρ)` and `(v, θ)`.
pub fn diff_rhs(
    dstate: &DifferenceState,
    u: &Field,
    v: &Field,
    rho: &Field,
    theta: &Field,
    params: &SystemParams,
) -> Result<(Field, Field)> {
    for f in [&dstate.eta, u, v, rho, theta] {
        dstate.w.same_grid(f)?;
    }
    Ok(diff_rhs_unchecked(&dstate.w, &dstate.eta, u, v, rho, theta, params))
}

pub(crate) fn diff_rhs_unchecked(
    w_full: &Field,
    eta_full: &Field,
    u: &Field,
    v: &Field,
    rho: &Field,
    theta: &Field,
    params: &SystemParams,
) -> (Field, Field) {
    let SystemParams { b, kappa, alpha, .. } = *params;
    let (wt, et) = (w_full.dealiased(), eta_full.dealiased());
    let (ut, vt) = (u.dealiased(), v.dealiased());
    let (rt, tt) = (rho.dealiased(), theta.dealiased());

    let w = wt.values();
    let wx = dx(&wt, 1).values();
    let wxx = dx(&wt, 2).values();
    let wxxx = dx(&wt, 3).values();
    let eta = et.values();
    let etax = dx(&et, 1).values();
    let uv = ut.values();
    let ux = dx(&ut, 1).values();
    let uxx = dx(&ut, 2).values();
    let uxxx = dx(&ut, 3).values();
    let vv = vt.values();
    let vx = dx(&vt, 1).values();
    let vxx = dx(&vt, 2).values();
    let rv = rt.values();
    let thv = tt.values();
    let thx = dx(&tt, 1).values();

    let n = w.len();
    let mut flux = vec![0.0; n];
    let mut nonlocal = vec![0.0; n];
    let mut transport = vec![0.0; n];
    for j in 0..n {
        let sum = uv[j] + vv[j];
        flux[j] = 0.5 * w[j] * sum;
        nonlocal[j] = 0.5 * b * w[j] * sum + (3.0 - b) * wx[j] * (ux[j] + vx[j])
            - 0.5 * (b + 5.0) * wxx[j] * (uxx[j] + vxx[j])
            + (b - 5.0) * wx[j] * uxxx[j]
            + (b - 5.0) * vx[j] * wxxx[j]
            + 0.5 * kappa * eta[j] * (rv[j] + thv[j]);
        transport[j] = -uv[j] * etax[j] - w[j] * thx[j] - (b - 1.0) * (wx[j] * rv[j] + vx[j] * eta[j]);
    }

    let source = from_values_like(w_full, &nonlocal)
        .dealiased()
        .axpy(-alpha, w_full)
        .expect("same grid");
    let dw = dx(&from_values_like(w_full, &flux).dealiased(), 1)
        .axpy(1.0, &helmholtz_inverse_dx(&source))
        .expect("same grid")
        .scale(-1.0);
    let deta = from_values_like(eta_full, &transport).dealiased();
    (dw, deta)
}
