use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{profile, ProfileKind, State};
use crate::spectral::{Field, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionKind {
    /// Gaussian-enveloped wave packet at mode `⌊N/6⌋` (half of 2/3 Nyquist).
    HighMode,
    RandomDecay,
    Zero,
}

impl FromStr for DirectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "high-mode" => Ok(Self::HighMode),
            "random-decay" => Ok(Self::RandomDecay),
            "zero" => Ok(Self::Zero),
            other => Err(Error::InvalidParameter(format!(
                "unknown direction '{other}' (expected high-mode, random-decay or zero)"
            ))),
        }
    }
}

impl fmt::Display for DirectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HighMode => "high-mode",
            Self::RandomDecay => "random-decay",
            Self::Zero => "zero",
        })
    }
}

/// Recipe for a perturbation family.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub grid: Grid,
    pub s: f64,
    pub h: f64,
    pub base: ProfileKind,
    pub direction: DirectionKind,
    pub amplitude: f64,
    pub width: f64,
    pub deltas: Vec<f64>,
    pub seed: u64,
    pub rho_trivial: bool,
}

impl FamilySpec {
    pub fn new(grid: Grid, s: f64) -> Self {
        Self {
            grid,
            s,
            h: 2.0,
            base: ProfileKind::Gaussian,
            direction: DirectionKind::HighMode,
            amplitude: 0.4,
            width: 4.0,
            deltas: default_ladder(),
            seed: 0,
            rho_trivial: false,
        }
    }
}

pub fn default_ladder() -> Vec<f64> {
    vec![1e-6, 1e-7, 1e-8, 1e-9]
}

/// Base datum and a unit direction (in `H^s × H^{s-2}`) scaled along a
/// decreasing ladder.
#[derive(Clone, Debug)]
pub struct PerturbationFamily {
    pub s: f64,
    pub h: f64,
    pub rho_trivial: bool,
    pub base: State,
    pub direction: State,
    pub deltas: Vec<f64>,
}

impl PerturbationFamily {
    pub fn member(&self, delta: f64) -> State {
        State {
            u: self.base.u.axpy(delta, &self.direction.u).expect("same grid"),
            rho: self.base.rho.axpy(delta, &self.direction.rho).expect("same grid"),
            t: self.base.t,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.direction.pair_norm(self.s) == 0.0
    }
}

fn check_ladder(deltas: &[f64]) -> Result<()> {
    if deltas.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "δ ladder needs at least 4 points, got {}",
            deltas.len()
        )));
    }
    if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("δ ladder must be positive and strictly decreasing".into()));
    }
    let span = (deltas[0] / deltas[deltas.len() - 1]).log10();
    if span < 2.0 - 1e-12 {
        return Err(Error::InvalidParameter(format!("δ ladder spans {span:.2} decades; need at least 2")));
    }
    Ok(())
}

fn direction_field(grid: &Grid, kind: DirectionKind, width: f64, seed: u64) -> Result<Field> {
    match kind {
        DirectionKind::Zero => Ok(Field::zeros(grid)),
        DirectionKind::RandomDecay => profile(grid, ProfileKind::RandomDecay, 1.0, width, seed),
        DirectionKind::HighMode => {
            let xi = grid.wavenumber((grid.points() / 6) as i64);
            let centre = 0.5 * grid.length();
            Ok(Field::from_fn(grid, |x| {
                let z = (x - centre) / width;
                (-z * z).exp() * (xi * (x - centre)).cos()
            }))
        }
    }
}

/// Builds the family and verifies every member lies in `B(0, h)`; the base
/// is shrunk if the largest member would leave the ball.
pub fn make_family(spec: &FamilySpec) -> Result<PerturbationFamily> {
    check_ladder(&spec.deltas)?;
    if !(spec.h > 0.0 && spec.h.is_finite()) {
        return Err(Error::InvalidParameter(format!("ball radius must be positive, got {}", spec.h)));
    }
    let s = spec.s;
    let delta_max = spec.deltas[0];
    if delta_max >= spec.h {
        return Err(Error::BallViolation { h: spec.h });
    }

    let grid = &spec.grid;
    let u = profile(grid, spec.base, spec.amplitude, spec.width, spec.seed)?;
    let rho = if spec.rho_trivial {
        Field::zeros(grid)
    } else {
        profile(grid, spec.base, 0.5 * spec.amplitude, spec.width, spec.seed.wrapping_add(1))?
    };
    let mut base = State::new(u, rho, 0.0)?;

    let du = direction_field(grid, spec.direction, spec.width, spec.seed.wrapping_add(2))?;
    let drho = if spec.rho_trivial {
        Field::zeros(grid)
    } else {
        direction_field(grid, spec.direction, spec.width, spec.seed.wrapping_add(3))?.scale(0.5)
    };
    let mut direction = State::new(du, drho, 0.0)?;
    let dn = direction.pair_norm(s);
    if dn > 0.0 {
        direction = State::new(direction.u.scale(1.0 / dn), direction.rho.scale(1.0 / dn), 0.0)?;
    }

    let room = spec.h - delta_max;
    let yb = base.pair_norm(s);
    if yb > room {
        let k = 0.99 * room / yb;
        log::info!("shrinking base by {k:.4} to fit B(0, {})", spec.h);
        base = State::new(base.u.scale(k), base.rho.scale(k), 0.0)?;
    }

    let family = PerturbationFamily {
        s,
        h: spec.h,
        rho_trivial: spec.rho_trivial,
        base,
        direction,
        deltas: spec.deltas.clone(),
    };
    for &d in std::iter::once(&0.0).chain(&family.deltas) {
        if family.member(d).pair_norm(s) > spec.h {
            return Err(Error::BallViolation { h: spec.h });
        }
    }
    Ok(family)
}
