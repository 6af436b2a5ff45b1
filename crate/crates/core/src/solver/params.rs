use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, Field, Grid};

/// Physical parameters `b, κ, α` and the existence-time constant `c_s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub b: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub c_s: f64,
}

impl SystemParams {
    pub fn new(b: f64, kappa: f64, alpha: f64, c_s: f64) -> Result<Self> {
        let params = Self {
            b,
            kappa,
            alpha,
            c_s,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.b, self.kappa, self.alpha, self.c_s].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if self.b == 1.0 {
            return Err(Error::InvalidParameter(
                "b = 1 is excluded: the system requires b ∈ ℝ∖{1}".into(),
            ));
        }
        if self.c_s <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "c_s must be positive, got {}",
                self.c_s
            )));
        }
        Ok(())
    }

    pub fn with_c_s(self, c_s: f64) -> Self {
        Self { c_s, ..self }
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            b: 2.0,
            kappa: 1.0,
            alpha: 0.0,
            c_s: 1.0,
        }
    }
}

/// The unknowns `(u, ρ)` at time `t`.
#[derive(Clone, Debug)]
pub struct State {
    pub u: Field,
    pub rho: Field,
    pub t: f64,
}

impl State {
    pub fn new(u: Field, rho: Field, t: f64) -> Result<Self> {
        u.same_grid(&rho)?;
        Ok(Self { u, rho, t })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            u: Field::zeros(grid),
            rho: Field::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.rho.is_finite() && self.t.is_finite()
    }

    /// `‖u‖_{H^s} + ‖ρ‖_{H^{s-2}}`.
    pub fn pair_norm(&self, s: f64) -> f64 {
        sobolev_norm(&self.u, s) + sobolev_norm(&self.rho, s - 2.0)
    }
}

/// The differences `w = u - v`, `η = ρ - θ` at time `t`.
#[derive(Clone, Debug)]
pub struct DifferenceState {
    pub w: Field,
    pub eta: Field,
    pub t: f64,
}

impl DifferenceState {
    pub fn between(a: &State, b: &State) -> Result<Self> {
        Ok(Self {
            w: a.u.axpy(-1.0, &b.u)?,
            eta: a.rho.axpy(-1.0, &b.rho)?,
            t: a.t,
        })
    }

    /// `‖w‖_{H^r} + ‖η‖_{H^{r-2}}`.
    pub fn pair_norm(&self, r: f64) -> f64 {
        sobolev_norm(&self.w, r) + sobolev_norm(&self.eta, r - 2.0)
    }
}
