//! Localized initial profiles centred in the domain.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

use super::params::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Zero,
    Gaussian,
    Sech2,
    /// A Gaussian-windowed random trigonometric polynomial.
    RandomDecay,
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Self::Zero),
            "gaussian" => Ok(Self::Gaussian),
            "sech2" => Ok(Self::Sech2),
            "random-decay" => Ok(Self::RandomDecay),
            other => Err(Error::InvalidParameter(format!(
                "unknown profile '{other}' (expected zero, gaussian, sech2 or random-decay)"
            ))),
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zero => "zero",
            Self::Gaussian => "gaussian",
            Self::Sech2 => "sech2",
            Self::RandomDecay => "random-decay",
        })
    }
}

const RANDOM_MODES: usize = 6;

/// Profile of peak height `amplitude` and width `width` centred at `L/2`.
pub fn profile(grid: &Grid, kind: ProfileKind, amplitude: f64, width: f64, seed: u64) -> Result<Field> {
    if !(width > 0.0 && width.is_finite() && amplitude.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "profile needs a positive width and finite amplitude, got width {width}, amplitude {amplitude}"
        )));
    }
    let centre = 0.5 * grid.length();
    let field = match kind {
        ProfileKind::Zero => Field::zeros(grid),
        ProfileKind::Gaussian => Field::from_fn(grid, |x| amplitude * (-((x - centre) / width).powi(2)).exp()),
        ProfileKind::Sech2 => Field::from_fn(grid, |x| amplitude / ((x - centre) / width).cosh().powi(2)),
        ProfileKind::RandomDecay => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut coeffs = [(0.0, 0.0); RANDOM_MODES];
            for (m, c) in coeffs.iter_mut().enumerate() {
                let decay = (-0.5 * m as f64).exp();
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                *c = (decay * a, decay * b);
            }
            let raw = Field::from_fn(grid, |x| {
                let z = (x - centre) / width;
                let series: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, (a, b))| a * (m as f64 * z).cos() + b * (m as f64 * z).sin())
                    .sum();
                series * (-z * z).exp()
            });
            let peak = raw.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak == 0.0 {
                raw
            } else {
                raw.scale(amplitude / peak)
            }
        }
    };
    Ok(field)
}

/// Rescales both components so that `‖u‖_{H^s} + ‖ρ‖_{H^{s-2}} = target`.
pub fn scale_to_norm(state: &State, s: f64, target: f64) -> Result<State> {
    let y = state.pair_norm(s);
    if y == 0.0 {
        return Err(Error::InvalidParameter("cannot rescale zero data".into()));
    }
    let k = target / y;
    State::new(state.u.scale(k), state.rho.scale(k), state.t)
}
