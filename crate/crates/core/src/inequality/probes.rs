//! Ratio probes for the product and commutator estimates.

use serde_json::json;

use crate::error::{Error, Result};
use crate::regression::fit_log_log;
use crate::spectral::{
    build_mollifier, c1_norm, commutator_lambda, commutator_lambda_dx, commutator_mollifier, dx, lambda_pow,
    product_exact, sobolev_norm, sup_norm, Field,
};

use super::ensemble::{argmax, ratio, report_from_ratios, run_members, sample_field, ProbeConfig, ProbeReport};

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Hypothesis(msg()))
    }
}

fn draw_pair(cfg: &ProbeConfig, rng: &mut rand_chacha::ChaCha8Rng, sf: f64, sg: f64) -> (Field, Field) {
    let f = sample_field(rng, &cfg.grid, sf, cfg.gamma, cfg.amplitude);
    let g = sample_field(rng, &cfg.grid, sg, cfg.gamma, cfg.amplitude);
    (f, g)
}

/// `‖fg‖_{H^r} / (‖f‖_∞‖g‖_{H^r} + ‖f‖_{H^r}‖g‖_∞)`, `r > 0`.
pub fn algebra_ratio(r: f64, f: &Field, g: &Field) -> Result<f64> {
    let lhs = sobolev_norm(&product_exact(f, g)?, r);
    let rhs = sup_norm(f) * sobolev_norm(g, r) + sobolev_norm(f, r) * sup_norm(g);
    Ok(ratio(lhs, rhs))
}

pub fn probe_algebra(cfg: &ProbeConfig, r: f64) -> Result<ProbeReport> {
    cfg.validate()?;
    require(r > 0.0, || format!("algebra estimate needs r > 0, got {r}"))?;
    let ratios = run_members(cfg, |rng| {
        let (f, g) = draw_pair(cfg, rng, r, r);
        algebra_ratio(r, &f, &g)
    })?;
    report_from_ratios("algebra", &[("r", r)], cfg, ratios, 0)
}

/// `‖[Λ^r, f]g‖_{L²} / (‖f_x‖_∞‖Λ^{r-1}g‖_{L²} + ‖Λ^r f‖_{L²}‖g‖_∞)`.
pub fn kato_ponce_ratio(r: f64, f: &Field, g: &Field) -> Result<f64> {
    let lhs = sobolev_norm(&commutator_lambda(r, f, g)?, 0.0);
    let rhs = sup_norm(&dx(f, 1)) * sobolev_norm(&lambda_pow(g, r - 1.0), 0.0)
        + sobolev_norm(&lambda_pow(f, r), 0.0) * sup_norm(g);
    Ok(ratio(lhs, rhs))
}

pub fn probe_kato_ponce(cfg: &ProbeConfig, r: f64) -> Result<ProbeReport> {
    cfg.validate()?;
    require(r >= 0.0, || format!("commutator estimate needs r ≥ 0, got {r}"))?;
    let ratios = run_members(cfg, |rng| {
        let (f, g) = draw_pair(cfg, rng, r.max(1.5), (r - 1.0).max(0.5));
        kato_ponce_ratio(r, &f, &g)
    })?;
    report_from_ratios("kato-ponce", &[("r", r)], cfg, ratios, 0)
}

/// Dyadic ladder `1, 1/2, …, 1/2^steps`.
pub fn epsilon_ladder(steps: u32) -> Vec<f64> {
    (0..=steps).map(|i| 0.5f64.powi(i as i32)).collect()
}

/// Band profile `φ(t) = t e^{-t²/2}` placing the driver near `|ξ| ~ 1/ε`.
fn band(t: f64) -> f64 {
    t * (-0.5 * t * t).exp()
}

/// `max_ε ‖[J_ε, f]∂ₓg_ε‖_{L²} / (‖f‖_{C¹}‖g_ε‖_{L²})`. Each member draws one
/// white-noise driver and reshapes it to `ĝ_ε(ξ) = φ(εξ) ĝ(ξ)`, so every
/// scale of the ladder sees a driver concentrated where its commutator acts.
pub fn probe_mollifier_commutator(cfg: &ProbeConfig, ladder: &[f64]) -> Result<ProbeReport> {
    cfg.validate()?;
    require(!ladder.is_empty(), || "empty mollifier ladder".into())?;
    let tables = ladder
        .iter()
        .map(|&e| build_mollifier(&cfg.grid, e))
        .collect::<Result<Vec<_>>>()?;
    let grid = &cfg.grid;
    let per_member = run_members(cfg, |rng| {
        let (f, noise) = draw_pair(cfg, rng, 1.5, -cfg.gamma);
        let c1 = c1_norm(&f);
        tables
            .iter()
            .map(|t| {
                let eps = t.epsilon();
                let g = noise.map_modes(|k, c| c * band(eps * grid.wavenumber(k as i64)));
                let lhs = sobolev_norm(&commutator_mollifier(t, &f, &g)?, 0.0);
                Ok(ratio(lhs, c1 * sobolev_norm(&g, 0.0)))
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let per_eps: Vec<f64> = (0..ladder.len())
        .map(|i| per_member.iter().map(|m| m[i]).fold(0.0, f64::max))
        .collect();
    let ratios: Vec<f64> = per_member.iter().map(|m| m.iter().copied().fold(0.0, f64::max)).collect();
    let (lo, hi) = per_eps
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &c| (lo.min(c), hi.max(c)));
    let mut report = report_from_ratios(
        "mollifier-commutator",
        &[("epsilon_max", ladder.iter().copied().fold(0.0, f64::max)), ("epsilon_min", ladder.iter().copied().fold(f64::INFINITY, f64::min))],
        cfg,
        ratios,
        0,
    )?;
    report.details.insert("epsilon".into(), json!(ladder));
    report.details.insert("epsilon_constants".into(), json!(per_eps));
    report.details.insert("ladder_spread".into(), json!(if lo > 0.0 { hi / lo } else { f64::INFINITY }));
    Ok(report)
}

/// `‖[Λ^σ∂ₓ, f]v‖_{L²} / (‖f‖_{H^s}‖v‖_{H^σ})`.
pub fn calderon_ratio(s: f64, sigma: f64, f: &Field, v: &Field) -> Result<f64> {
    let lhs = sobolev_norm(&commutator_lambda_dx(sigma, f, v)?, 0.0);
    Ok(ratio(lhs, sobolev_norm(f, s) * sobolev_norm(v, sigma)))
}

pub fn probe_calderon(cfg: &ProbeConfig, s: f64, sigma: f64) -> Result<ProbeReport> {
    cfg.validate()?;
    require(s > 1.5, || format!("commutator estimate needs s > 3/2, got {s}"))?;
    require(sigma + 1.0 >= 0.0 && sigma + 1.0 <= s, || {
        format!("commutator estimate needs 0 ≤ σ+1 ≤ s, got σ = {sigma}, s = {s}")
    })?;
    let ratios = run_members(cfg, |rng| {
        let (f, v) = draw_pair(cfg, rng, s, sigma);
        calderon_ratio(s, sigma, &f, &v)
    })?;
    report_from_ratios("calderon", &[("s", s), ("sigma", sigma)], cfg, ratios, 0)
}

/// `‖fg‖_{H^{r-1}} / (‖f‖_{H^r}‖g‖_{H^{r-1}})`.
pub fn product_low_ratio(r: f64, f: &Field, g: &Field) -> Result<f64> {
    let lhs = sobolev_norm(&product_exact(f, g)?, r - 1.0);
    Ok(ratio(lhs, sobolev_norm(f, r) * sobolev_norm(g, r - 1.0)))
}

pub fn probe_product_low(cfg: &ProbeConfig, r: f64) -> Result<ProbeReport> {
    cfg.validate()?;
    require(r > 0.5, || format!("product estimate needs r > 1/2, got {r}"))?;
    let ratios = run_members(cfg, |rng| {
        let (f, g) = draw_pair(cfg, rng, r, r - 1.0);
        product_low_ratio(r, &f, &g)
    })?;
    report_from_ratios("product-low", &[("r", r)], cfg, ratios, 0)
}

/// Checks `0 ≤ r ≤ k`, `j > 1/2`, `j ≥ k − r`, `k` a positive integer.
pub fn check_negative_product_indices(r: f64, j: f64, k: f64) -> Result<()> {
    require(k >= 1.0 && k.fract() == 0.0, || format!("k must be a positive integer, got {k}"))?;
    require((0.0..=k).contains(&r), || format!("need 0 ≤ r ≤ k, got r = {r}, k = {k}"))?;
    require(j > 0.5, || format!("need j > 1/2, got {j}"))?;
    require(j >= k - r, || format!("need j ≥ k − r, got j = {j}, k − r = {}", k - r))
}

/// `‖fg‖_{H^{r-k}} / (‖f‖_{H^j}‖g‖_{H^{r-k}})`.
pub fn product_negative_ratio(r: f64, j: f64, k: f64, f: &Field, g: &Field) -> Result<f64> {
    let lhs = sobolev_norm(&product_exact(f, g)?, r - k);
    Ok(ratio(lhs, sobolev_norm(f, j) * sobolev_norm(g, r - k)))
}

pub fn probe_product_negative(cfg: &ProbeConfig, r: f64, j: f64, k: f64) -> Result<ProbeReport> {
    cfg.validate()?;
    check_negative_product_indices(r, j, k)?;
    let ratios = run_members(cfg, |rng| {
        let (f, g) = draw_pair(cfg, rng, j, r - k);
        product_negative_ratio(r, j, k, &f, &g)
    })?;
    report_from_ratios("product-negative", &[("r", r), ("j", j), ("k", k)], cfg, ratios, 0)
}

/// Modes swept by [`probe_product_negative_sweep`]: log-spaced from `N/16`
/// to `N/2 − 1`.
pub fn sweep_modes(points: usize, count: usize) -> Vec<usize> {
    let (lo, hi) = ((points / 16).max(1) as f64, (points / 2 - 1) as f64);
    let mut modes: Vec<usize> = (0..count)
        .map(|i| {
            let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            (lo * (hi / lo).powf(t)).round() as usize
        })
        .collect();
    modes.dedup();
    modes
}

/// Same ratio with `g = cos(ξ_{k₀}x)` swept over high modes and `f` a
/// smooth random field. Reports the log-log slope of the per-mode maximum
/// against `k₀` in the `slope` detail.
pub fn probe_product_negative_sweep(cfg: &ProbeConfig, r: f64, j: f64, k: f64, modes: &[usize]) -> Result<ProbeReport> {
    cfg.validate()?;
    check_negative_product_indices(r, j, k)?;
    require(modes.len() >= 2, || "frequency sweep needs at least two modes".into())?;
    require(modes.iter().all(|&m| m > 0 && m < cfg.grid.nyquist()), || {
        format!("sweep modes must lie in 1..{}", cfg.grid.nyquist())
    })?;
    let drivers: Vec<Field> = modes
        .iter()
        .map(|&m| {
            let xi = cfg.grid.wavenumber(m as i64);
            Field::from_fn(&cfg.grid, move |x| (xi * x).cos())
        })
        .collect();
    let per_member = run_members(cfg, |rng| {
        let f = sample_field(rng, &cfg.grid, j + 2.0, cfg.gamma, cfg.amplitude);
        drivers
            .iter()
            .map(|g| product_negative_ratio(r, j, k, &f, g))
            .collect::<Result<Vec<f64>>>()
    })?;
    let per_mode: Vec<f64> = (0..modes.len())
        .map(|i| per_member.iter().map(|m| m[i]).fold(0.0, f64::max))
        .collect();
    let x: Vec<f64> = modes.iter().map(|&m| m as f64).collect();
    let slope = fit_log_log(&x, &per_mode)?.slope;
    let ratios: Vec<f64> = per_member.iter().map(|m| m.iter().copied().fold(0.0, f64::max)).collect();
    let mut report = report_from_ratios("product-negative-sweep", &[("r", r), ("j", j), ("k", k)], cfg, ratios, 0)?;
    report.details.insert("modes".into(), json!(modes));
    report.details.insert("mode_constants".into(), json!(per_mode));
    report.details.insert("slope".into(), json!(slope));
    Ok(report)
}

/// Checks `‖f‖_{H^{θs₁+(1-θ)s₂}} ≤ ‖f‖^θ_{H^{s₁}} ‖f‖^{1-θ}_{H^{s₂}}` for
/// every sample and `θ`; a violation is a relative excess above `1e-12`.
pub fn probe_interpolation(cfg: &ProbeConfig, s1: f64, s2: f64, thetas: &[f64]) -> Result<ProbeReport> {
    cfg.validate()?;
    require(s1 < s2, || format!("interpolation needs s₁ < s₂, got {s1}, {s2}"))?;
    require(thetas.iter().all(|t| (0.0..=1.0).contains(t)), || "θ must lie in [0, 1]".into())?;
    let per_member = run_members(cfg, |rng| {
        let f = sample_field(rng, &cfg.grid, s2, cfg.gamma, cfg.amplitude);
        let (a, b) = (sobolev_norm(&f, s1), sobolev_norm(&f, s2));
        Ok(thetas
            .iter()
            .map(|&t| {
                let lhs = sobolev_norm(&f, t * s1 + (1.0 - t) * s2);
                let rhs = a.powf(t) * b.powf(1.0 - t);
                (ratio(lhs, rhs), lhs > rhs * (1.0 + 1e-12))
            })
            .collect::<Vec<_>>())
    })?;
    let violations = per_member.iter().flatten().filter(|(_, v)| *v).count();
    let ratios: Vec<f64> = per_member
        .iter()
        .map(|m| m.iter().map(|(r, _)| *r).fold(0.0, f64::max))
        .collect();
    let mut report = report_from_ratios("interpolation", &[("s1", s1), ("s2", s2)], cfg, ratios, violations)?;
    report.details.insert("theta".into(), json!(thetas));
    Ok(report)
}

/// Largest per-sample ratio with its index, for callers that post-process
/// [`ProbeReport::ratios`].
pub fn worst_sample(report: &ProbeReport) -> (usize, f64) {
    argmax(&report.ratios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    fn cfg(n: usize) -> ProbeConfig {
        ProbeConfig::new(Grid::new(2.0 * PI, 64).unwrap(), n, 5)
    }

    #[test]
    fn constant_f_gives_zero_commutators() {
        let c = cfg(4);
        let f = Field::constant(&c.grid, 2.0);
        let g = Field::from_fn(&c.grid, |x| (x.sin()).exp());
        assert!(kato_ponce_ratio(1.5, &f, &g).unwrap() < 1e-12);
        assert!(calderon_ratio(2.0, 0.5, &f, &g).unwrap() < 1e-12);
    }

    #[test]
    fn algebra_with_unit_f() {
        let c = cfg(1);
        let one = Field::constant(&c.grid, 1.0);
        let g = Field::from_fn(&c.grid, |x| (2.0 * x).sin() + 0.5 * x.cos());
        let got = algebra_ratio(1.0, &one, &g).unwrap();
        let hg = sobolev_norm(&g, 1.0);
        assert!((got - hg / (hg + sup_norm(&g) * sobolev_norm(&one, 1.0))).abs() < 1e-12);
        assert!(got < 1.0);
    }

    #[test]
    fn algebra_two_mode_product() {
        // cos²x = (1 + cos 2x)/2; on [0, 2π): ‖cos²‖²_{H¹} = 2π/4 + (π/4)·5.
        let c = cfg(1);
        let cs = Field::from_fn(&c.grid, f64::cos);
        let lhs = (2.0 * PI / 4.0 + PI / 4.0 * 5.0).sqrt();
        let rhs = 2.0 * (2.0 * PI).sqrt();
        assert!((algebra_ratio(1.0, &cs, &cs).unwrap() - lhs / rhs).abs() < 1e-12);
    }

    #[test]
    fn unit_f_products_give_inverse_root_length() {
        let c = cfg(1);
        let one = Field::constant(&c.grid, 1.0);
        let g = Field::from_fn(&c.grid, |x| (3.0 * x).cos() + 0.2);
        let expect = 1.0 / (2.0 * PI).sqrt();
        assert!((product_low_ratio(1.2, &one, &g).unwrap() - expect).abs() < 1e-12);
        assert!((product_negative_ratio(0.5, 1.5, 2.0, &one, &g).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let c = cfg(2);
        assert!(probe_algebra(&c, 0.0).is_err());
        assert!(probe_kato_ponce(&c, -0.1).is_err());
        assert!(probe_calderon(&c, 1.5, 0.0).is_err());
        assert!(probe_calderon(&c, 2.0, 1.0).is_ok());
        assert!(probe_calderon(&c, 2.0, 1.1).is_err());
        assert!(probe_product_low(&c, 0.5).is_err());
        assert!(check_negative_product_indices(0.5, 1.0, 2.0).is_err());
        assert!(check_negative_product_indices(0.5, 1.5, 2.0).is_ok());
        assert!(check_negative_product_indices(0.0, 1.0, 1.0).is_ok());
        assert!(check_negative_product_indices(0.0, 1.0, 1.5).is_err());
        assert!(check_negative_product_indices(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn kato_ponce_at_zero_order_vanishes() {
        let report = probe_kato_ponce(&cfg(8), 0.0).unwrap();
        assert!(report.constant < 1e-12);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = probe_product_low(&cfg(16), 1.0).unwrap();
        let b = probe_product_low(&cfg(16), 1.0).unwrap();
        assert_eq!(a.ratios, b.ratios);
        assert_eq!(a.worst_seed, b.worst_seed);
        assert_eq!(worst_sample(&a), (a.worst_index, a.constant));
    }

    #[test]
    fn interpolation_has_no_violations() {
        let report = probe_interpolation(&cfg(50), -1.0, 3.0, &[0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.constant <= 1.0 + 1e-12);
        let single = Field::from_fn(&cfg(1).grid, |x| (4.0 * x).sin());
        let lhs = sobolev_norm(&single, 1.0);
        let rhs = sobolev_norm(&single, -1.0).powf(0.5) * sobolev_norm(&single, 3.0).powf(0.5);
        assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_modes_are_increasing() {
        let m = sweep_modes(256, 8);
        assert_eq!(m.first(), Some(&16));
        assert_eq!(m.last(), Some(&127));
        assert!(m.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn json_has_interface_fields() {
        let report = probe_algebra(&cfg(3), 1.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        for key in ["lemma", "params", "constant", "worst_seed", "violations", "ensemble", "grid"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
