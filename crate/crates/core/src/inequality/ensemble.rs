use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

/// Ensemble settings shared by all probes.
#[derive(Clone, Debug)]
pub struct ProbeConfig {
    pub grid: Grid,
    pub ensemble: usize,
    /// Extra spectral decay beyond the target smoothness; must exceed 1/2.
    pub gamma: f64,
    pub amplitude: f64,
    pub seed: u64,
}

impl ProbeConfig {
    pub fn new(grid: Grid, ensemble: usize, seed: u64) -> Self {
        Self {
            grid,
            ensemble,
            gamma: 0.6,
            amplitude: 1.0,
            seed,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.ensemble == 0 {
            return Err(Error::InvalidParameter("ensemble size must be positive".into()));
        }
        check_gamma(self.gamma)?;
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }

    pub(crate) fn member_rng(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.member_seed(index))
    }

    pub fn member_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.5 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("decay exponent γ must exceed 1/2, got {gamma}")))
    }
}

/// Draws `c_k = amplitude (1+ξ_k²)^{-(smoothness+γ)/2} g_k` with `g_k`
/// standard complex Gaussian (real at `k = 0` and Nyquist).
pub(crate) fn sample_field(
    rng: &mut ChaCha8Rng,
    grid: &Grid,
    smoothness: f64,
    gamma: f64,
    amplitude: f64,
) -> Field {
    let half = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid deviation");
    let nyq = grid.nyquist();
    let coeffs: Vec<Complex64> = (0..grid.modes())
        .map(|k| {
            let xi = grid.wavenumber(k as i64);
            let scale = amplitude * (1.0 + xi * xi).powf(-0.5 * (smoothness + gamma));
            let g = if k == 0 || k == nyq {
                Complex64::new(StandardNormal.sample(rng), 0.0)
            } else {
                Complex64::new(half.sample(rng), half.sample(rng))
            };
            g * scale
        })
        .collect();
    Field::from_coefficients(grid, coeffs).expect("length matches grid")
}

/// Random field with `‖f‖_{H^{smoothness}}` finite, deterministic in `seed`.
pub fn random_field(grid: &Grid, smoothness: f64, gamma: f64, amplitude: f64, seed: u64) -> Result<Field> {
    check_gamma(gamma)?;
    if !smoothness.is_finite() || !amplitude.is_finite() {
        return Err(Error::InvalidParameter("smoothness and amplitude must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_field(&mut rng, grid, smoothness, gamma, amplitude))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    pub points: usize,
    pub length: f64,
}

impl From<&Grid> for GridInfo {
    fn from(g: &Grid) -> Self {
        Self {
            points: g.points(),
            length: g.length(),
        }
    }
}

/// Empirical constant of one inequality over an ensemble.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub lemma: String,
    pub params: BTreeMap<String, f64>,
    /// Max over samples of LHS / RHS-without-constant.
    pub constant: f64,
    pub worst_seed: u64,
    pub worst_index: usize,
    pub violations: usize,
    pub ensemble: usize,
    pub grid: GridInfo,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
    #[serde(skip)]
    pub ratios: Vec<f64>,
}

impl ProbeReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    /// Per-sample ratios as `index,seed,ratio`.
    pub fn write_ratios_csv<W: Write>(&self, mut out: W, seed: u64) -> Result<()> {
        writeln!(out, "index,seed,ratio")?;
        for (i, r) in self.ratios.iter().enumerate() {
            writeln!(out, "{i},{},{r:e}", seed.wrapping_add(i as u64))?;
        }
        Ok(())
    }
}

/// Index of the first maximum.
pub(crate) fn argmax(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
}

/// Evaluates `eval` for every ensemble member in parallel, in member order.
pub(crate) fn run_members<T, F>(cfg: &ProbeConfig, eval: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..cfg.ensemble)
        .into_par_iter()
        .map(|i| eval(&mut cfg.member_rng(i)))
        .collect()
}

pub(crate) fn report_from_ratios(
    lemma: &str,
    params: &[(&str, f64)],
    cfg: &ProbeConfig,
    ratios: Vec<f64>,
    violations: usize,
) -> Result<ProbeReport> {
    if let Some(bad) = ratios.iter().position(|r| !r.is_finite()) {
        return Err(Error::Hypothesis(format!(
            "{lemma}: non-finite ratio for member {bad} (seed {})",
            cfg.member_seed(bad)
        )));
    }
    let (worst_index, constant) = argmax(&ratios);
    Ok(ProbeReport {
        lemma: lemma.to_string(),
        params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        constant: constant.max(0.0),
        worst_seed: cfg.member_seed(worst_index),
        worst_index,
        violations,
        ensemble: cfg.ensemble,
        grid: GridInfo::from(&cfg.grid),
        details: BTreeMap::new(),
        ratios,
    })
}

/// `lhs / rhs`, with `0/0 = 0`.
pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}
