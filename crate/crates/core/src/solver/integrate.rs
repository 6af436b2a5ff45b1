use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

use super::params::{State, SystemParams};
use super::rhs::rhs_unchecked;

/// `y(t)` above this value is treated as blow-up.
pub const BLOW_UP_THRESHOLD: f64 = 1e6;
/// Fraction of `‖u‖²_{H^s}` allowed in the top third of the spectrum.
pub const SPECTRAL_TAIL_LIMIT: f64 = 0.01;
/// Initial data must stay below this in the edge zones.
pub const SEAM_TOLERANCE: f64 = 1e-10;
/// Width of each edge zone as a fraction of the domain.
pub const SEAM_ZONE: f64 = 0.1;

#[derive(Clone, Debug)]
pub enum DtPolicy {
    /// `dt = courant·Δx / max(1, sup|u|)`, recomputed every
    /// `recompute_every` steps and shrunk so the end time is hit exactly.
    Cfl { courant: f64, recompute_every: usize },
    /// Constant step, shrunk so the end time is hit exactly.
    Fixed(f64),
    /// Step through the given times (typically another trajectory's ledger).
    Times(Arc<[f64]>),
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Cfl {
            courant: 0.3,
            recompute_every: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SeamPolicy {
    #[default]
    Warn,
    Error,
    Ignore,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub dt_policy: DtPolicy,
    /// Keep every `stride`-th state (the final state is always kept).
    pub stride: usize,
    pub seam: SeamPolicy,
    /// Lower bound on the number of steps to `t_end` (CFL and fixed policies).
    pub min_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            dt_policy: DtPolicy::default(),
            stride: 1,
            seam: SeamPolicy::Warn,
            min_steps: 0,
        }
    }
}

impl SolveOptions {
    pub fn with_dt(dt_policy: DtPolicy) -> Self {
        Self {
            dt_policy,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Completed,
    BlowUpDetected,
    ResolutionExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub t: f64,
    pub norm_u: f64,
    pub norm_rho: f64,
    pub y: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub s: f64,
    pub params: SystemParams,
    pub stride: usize,
    pub states: Vec<State>,
    pub ledger: Vec<LedgerEntry>,
    pub status: Status,
}

impl Trajectory {
    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }

    pub fn times(&self) -> Vec<f64> {
        self.ledger.iter().map(|e| e.t).collect()
    }

    pub fn initial(&self) -> &State {
        &self.states[0]
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn end_time(&self) -> f64 {
        self.ledger.last().map_or(0.0, |e| e.t)
    }

    pub fn is_complete(&self) -> bool {
        self.status == Status::Completed
    }
}

/// Precomputed `(1+ξ²)^s` weights for the ledger norms.
pub(crate) struct NormWeights {
    u: Vec<f64>,
    rho: Vec<f64>,
    cutoff: usize,
    length: f64,
}

impl NormWeights {
    pub(crate) fn new(grid: &Grid, s: f64) -> Self {
        let xi = grid.wavenumbers();
        Self {
            u: xi.iter().map(|x| (1.0 + x * x).powf(s)).collect(),
            rho: xi.iter().map(|x| (1.0 + x * x).powf(s - 2.0)).collect(),
            cutoff: grid.dealias_cutoff(),
            length: grid.length(),
        }
    }

    fn energy(&self, f: &Field, w: &[f64], from: usize) -> f64 {
        let nyq = f.grid().nyquist();
        f.coefficients()
            .iter()
            .enumerate()
            .skip(from)
            .map(|(k, c)| {
                let mult = if k == 0 || k == nyq { 1.0 } else { 2.0 };
                mult * w[k] * c.norm_sqr()
            })
            .sum()
    }

    pub(crate) fn entry(&self, state: &State) -> LedgerEntry {
        let norm_u = (self.length * self.energy(&state.u, &self.u, 0)).sqrt();
        let norm_rho = (self.length * self.energy(&state.rho, &self.rho, 0)).sqrt();
        LedgerEntry {
            t: state.t,
            norm_u,
            norm_rho,
            y: norm_u + norm_rho,
        }
    }

    /// Share of `‖u‖²_{H^s}` carried by modes above `N/3`.
    pub(crate) fn tail_fraction(&self, u: &Field) -> f64 {
        let total = self.energy(u, &self.u, 0);
        if total == 0.0 {
            return 0.0;
        }
        self.energy(u, &self.u, self.cutoff + 1) / total
    }
}

fn rk4(state: &State, params: &SystemParams, dt: f64) -> State {
    let (k1u, k1r) = rhs_unchecked(&state.u, &state.rho, params);
    let stage = |ku: &Field, kr: &Field, h: f64| {
        (
            state.u.axpy(h, ku).expect("same grid"),
            state.rho.axpy(h, kr).expect("same grid"),
        )
    };
    let (u2, r2) = stage(&k1u, &k1r, 0.5 * dt);
    let (k2u, k2r) = rhs_unchecked(&u2, &r2, params);
    let (u3, r3) = stage(&k2u, &k2r, 0.5 * dt);
    let (k3u, k3r) = rhs_unchecked(&u3, &r3, params);
    let (u4, r4) = stage(&k3u, &k3r, dt);
    let (k4u, k4r) = rhs_unchecked(&u4, &r4, params);
    let combine = |y: &Field, a: &Field, b: &Field, c: &Field, d: &Field| {
        y.axpy(dt / 6.0, a)
            .and_then(|y| y.axpy(dt / 3.0, b))
            .and_then(|y| y.axpy(dt / 3.0, c))
            .and_then(|y| y.axpy(dt / 6.0, d))
            .expect("same grid")
    };
    State {
        u: combine(&state.u, &k1u, &k2u, &k3u, &k4u),
        rho: combine(&state.rho, &k1r, &k2r, &k3r, &k4r),
        t: state.t + dt,
    }
}

/// One classical Runge–Kutta step.
pub fn step_rk4(state: &State, params: &SystemParams, dt: f64) -> Result<State> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    state.u.same_grid(&state.rho)?;
    let next = rk4(state, params, dt);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFinite("RK4 step"))
    }
}

/// Largest value of `|u|` or `|ρ|` inside the edge zones.
pub fn seam_excess(state: &State) -> f64 {
    let grid = state.grid();
    let nodes = grid.nodes();
    let (lo, hi) = (SEAM_ZONE * grid.length(), (1.0 - SEAM_ZONE) * grid.length());
    let u = state.u.values();
    let rho = state.rho.values();
    nodes
        .iter()
        .enumerate()
        .filter(|(_, &x)| x < lo || x > hi)
        .map(|(j, _)| u[j].abs().max(rho[j].abs()))
        .fold(0.0, f64::max)
}

/// Produces step sizes for the integration loop.
struct Stepper {
    policy: DtPolicy,
    t_end: f64,
    dx: f64,
    max_dt: f64,
    current: f64,
    remaining_in_chunk: usize,
    cursor: usize,
}

impl Stepper {
    fn new(policy: &DtPolicy, t0: f64, t_end: f64, grid: &Grid, min_steps: usize) -> Result<Self> {
        match policy {
            DtPolicy::Cfl {
                courant,
                recompute_every,
            } => {
                if !(*courant > 0.0 && courant.is_finite()) || *recompute_every == 0 {
                    return Err(Error::InvalidParameter(
                        "CFL policy needs a positive Courant number and recompute interval".into(),
                    ));
                }
            }
            DtPolicy::Fixed(dt) => {
                if !(*dt > 0.0 && dt.is_finite()) {
                    return Err(Error::InvalidParameter(format!("fixed dt must be positive, got {dt}")));
                }
            }
            DtPolicy::Times(times) => {
                if times.is_empty() || (times[0] - t0).abs() > 1e-12 * t0.abs().max(1.0) {
                    return Err(Error::InvalidParameter(
                        "time list must start at the initial time".into(),
                    ));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidParameter("time list must be increasing".into()));
                }
            }
        }
        Ok(Self {
            policy: policy.clone(),
            t_end,
            dx: grid.spacing(),
            max_dt: if min_steps > 0 {
                (t_end - t0) / min_steps as f64
            } else {
                f64::INFINITY
            },
            current: 0.0,
            remaining_in_chunk: 0,
            cursor: 0,
        })
    }

    /// Next step size from the current state, or `None` when finished.
    fn next(&mut self, state: &State) -> Option<f64> {
        let remaining = self.t_end - state.t;
        match &self.policy {
            DtPolicy::Times(times) => {
                self.cursor += 1;
                let next = *times.get(self.cursor)?;
                if next > self.t_end * (1.0 + 1e-14) + 1e-300 {
                    return None;
                }
                Some(next - times[self.cursor - 1])
            }
            _ if remaining <= 1e-14 * self.t_end.abs().max(1.0) => None,
            DtPolicy::Fixed(dt) => {
                if self.remaining_in_chunk == 0 {
                    let n = (remaining / dt.min(self.max_dt) - 1e-9).ceil().max(1.0);
                    self.current = remaining / n;
                    self.remaining_in_chunk = n as usize;
                }
                self.remaining_in_chunk -= 1;
                Some(self.current)
            }
            DtPolicy::Cfl {
                courant,
                recompute_every,
            } => {
                if self.remaining_in_chunk == 0 {
                    let sup = state.u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    let raw = (courant * self.dx / sup.max(1.0)).min(self.max_dt);
                    let n = (remaining / raw).ceil().max(1.0);
                    self.current = remaining / n;
                    self.remaining_in_chunk = (n as usize).min(*recompute_every);
                }
                self.remaining_in_chunk -= 1;
                Some(self.current)
            }
        }
    }

    fn is_last(&self, state: &State, dt: f64) -> bool {
        match &self.policy {
            DtPolicy::Times(times) => self.cursor + 1 == times.len(),
            _ => (self.t_end - (state.t + dt)).abs() <= 1e-9 * dt,
        }
    }
}

/// Integrates from `initial` to `t_end`, recording the norm ledger
/// `(t, ‖u‖_{H^s}, ‖ρ‖_{H^{s-2}}, y)` at every step.
pub fn solve(
    initial: &State,
    params: &SystemParams,
    s: f64,
    t_end: f64,
    options: &SolveOptions,
) -> Result<Trajectory> {
    params.validate()?;
    initial.u.same_grid(&initial.rho)?;
    if t_end.is_nan() || t_end <= initial.t {
        return Err(Error::InvalidParameter(format!(
            "end time {t_end} must exceed the initial time {}",
            initial.t
        )));
    }
    if options.stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1".into()));
    }
    if !initial.is_finite() {
        return Err(Error::NonFinite("initial data"));
    }
    match options.seam {
        SeamPolicy::Ignore => {}
        policy => {
            let excess = seam_excess(initial);
            if excess > SEAM_TOLERANCE {
                if policy == SeamPolicy::Error {
                    return Err(Error::Seam { value: excess });
                }
                log::warn!("initial data reaches {excess:e} near the periodic seam");
            }
        }
    }

    let grid = initial.grid().clone();
    let weights = NormWeights::new(&grid, s);
    let mut stepper = Stepper::new(&options.dt_policy, initial.t, t_end, &grid, options.min_steps)?;
    let mut state = initial.clone();
    let mut states = vec![state.clone()];
    let mut ledger = vec![weights.entry(&state)];
    let mut status = Status::Completed;
    let mut step = 0usize;

    while let Some(dt) = stepper.next(&state) {
        let last = stepper.is_last(&state, dt);
        let mut next = rk4(&state, params, dt);
        if last && !matches!(options.dt_policy, DtPolicy::Times(_)) {
            next.t = t_end;
        }
        step += 1;
        let entry = weights.entry(&next);
        ledger.push(entry);
        let finite = next.is_finite() && entry.y.is_finite();
        if !finite || entry.y > BLOW_UP_THRESHOLD {
            status = Status::BlowUpDetected;
        } else if weights.tail_fraction(&next.u) > SPECTRAL_TAIL_LIMIT {
            status = Status::ResolutionExhausted;
        }
        state = next;
        if status != Status::Completed || step.is_multiple_of(options.stride) || last {
            states.push(state.clone());
        }
        if status != Status::Completed || last {
            break;
        }
    }
    if states.last().map(|st| st.t) != Some(state.t) {
        states.push(state);
    }

    Ok(Trajectory {
        s,
        params: *params,
        stride: options.stride,
        states,
        ledger,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sup_norm;

    #[test]
    fn zero_state_stays_zero() {
        let grid = Grid::new(64.0, 64).unwrap();
        let params = SystemParams::new(2.0, 1.0, 5.0, 1.0).unwrap();
        let next = step_rk4(&State::zeros(&grid), &params, 0.1).unwrap();
        assert_eq!(sup_norm(&next.u), 0.0);
        let traj = solve(&State::zeros(&grid), &params, 4.0, 1.0, &SolveOptions::default()).unwrap();
        assert!(traj.ledger.iter().all(|e| e.y == 0.0));
        assert_eq!(traj.end_time(), 1.0);
        assert!(traj.is_complete());
    }

    #[test]
    fn bad_arguments() {
        let grid = Grid::new(64.0, 64).unwrap();
        let st = State::zeros(&grid);
        let p = SystemParams::default();
        assert!(step_rk4(&st, &p, 0.0).is_err());
        assert!(solve(&st, &p, 4.0, 0.0, &SolveOptions::default()).is_err());
        let bad = SolveOptions::with_dt(DtPolicy::Fixed(-1.0));
        assert!(solve(&st, &p, 4.0, 1.0, &bad).is_err());
    }

    #[test]
    fn times_are_strictly_increasing_and_end_exactly() {
        let grid = Grid::new(64.0, 128).unwrap();
        let u = Field::from_fn(&grid, |x| 0.8 * (-(x - 32.0).powi(2) / 4.0).exp());
        let st = State::new(u, Field::zeros(&grid), 0.0).unwrap();
        let traj = solve(&st, &SystemParams::default(), 4.0, 0.77, &SolveOptions::default()).unwrap();
        let t = traj.times();
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*t.last().unwrap(), 0.77);
        assert_eq!(traj.states.len(), traj.ledger.len());
    }

    #[test]
    fn seam_policy_error() {
        let grid = Grid::new(64.0, 64).unwrap();
        let u = Field::constant(&grid, 1e-3);
        let st = State::new(u, Field::zeros(&grid), 0.0).unwrap();
        let opts = SolveOptions {
            seam: SeamPolicy::Error,
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve(&st, &SystemParams::default(), 4.0, 0.1, &opts),
            Err(Error::Seam { .. })
        ));
    }

    #[test]
    fn rough_data_exhausts_resolution() {
        let grid = Grid::new(64.0, 64).unwrap();
        let mut values = vec![0.0; 64];
        values[32] = 0.01;
        let u = Field::from_values(&grid, &values).unwrap();
        let st = State::new(u, Field::zeros(&grid), 0.0).unwrap();
        let traj = solve(&st, &SystemParams::default(), 4.0, 1.0, &SolveOptions::default()).unwrap();
        assert_eq!(traj.status, Status::ResolutionExhausted);
    }
}
