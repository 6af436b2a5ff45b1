//! Fourier multipliers, Sobolev norms, products and commutators.
//!
//! Every operator here is a pure function of its inputs. Even symbols are
//! evaluated at `|ξ|`; odd symbols vanish at the Nyquist index, where the
//! sign of the wavenumber is ambiguous.

use num_complex::Complex64;

use super::field::Field;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Forward transform; alias of [`Field::from_values`].
pub fn to_coefficients(values: &[f64], grid: &Grid) -> Result<Field> {
    Field::from_values(grid, values)
}

/// Applies a real, even symbol: `c_k ↦ m(|ξ_k|) c_k`.
pub fn multiplier_apply(f: &Field, m: impl Fn(f64) -> f64) -> Result<Field> {
    let grid = f.grid();
    let symbol: Vec<f64> = grid.wavenumbers().into_iter().map(&m).collect();
    if let Some((k, &value)) = symbol.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteMultiplier {
            xi: grid.wavenumber(k as i64),
            value,
        });
    }
    Ok(f.map_modes(|k, c| c * symbol[k]))
}

fn apply_even(f: &Field, m: impl Fn(f64) -> f64) -> Field {
    let grid = f.grid().clone();
    f.map_modes(|k, c| c * m(grid.wavenumber(k as i64)))
}

/// Applies the odd imaginary symbol `i·m(ξ)` with `m` odd.
fn apply_odd(f: &Field, m: impl Fn(f64) -> f64) -> Field {
    let grid = f.grid().clone();
    let nyq = grid.nyquist();
    f.map_modes(|k, c| {
        if k == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            c * Complex64::new(0.0, m(grid.wavenumber(k as i64)))
        }
    })
}

/// `∂ₓ^order f`, i.e. the symbol `(iξ)^order`.
pub fn dx(f: &Field, order: u32) -> Field {
    let sign = if (order / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let n = order as i32;
    if order.is_multiple_of(2) {
        apply_even(f, |xi| sign * xi.powi(n))
    } else {
        apply_odd(f, |xi| sign * xi.powi(n))
    }
}

/// `Λ^σ f` with `Λ = (1 - ∂ₓ²)^{1/2}`.
pub fn lambda_pow(f: &Field, sigma: f64) -> Field {
    apply_even(f, |xi| (1.0 + xi * xi).powf(0.5 * sigma))
}

/// `∂ₓ Λ⁻⁴ f`, the smoothing operator of the nonlocal term.
pub fn helmholtz_inverse_dx(f: &Field) -> Field {
    apply_odd(f, |xi| {
        let w = 1.0 + xi * xi;
        xi / (w * w)
    })
}

/// `Λ^σ ∂ₓ f`.
pub fn lambda_dx(f: &Field, sigma: f64) -> Field {
    apply_odd(f, |xi| xi * (1.0 + xi * xi).powf(0.5 * sigma))
}

/// Sum of `weight(|ξ_k|)·|c_k|²` over the full (two-sided) spectrum.
pub(crate) fn weighted_energy(f: &Field, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = f.grid();
    let nyq = grid.nyquist();
    f.coefficients()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mult = if k == 0 || k == nyq { 1.0 } else { 2.0 };
            mult * weight(grid.wavenumber(k as i64)) * c.norm_sqr()
        })
        .sum()
}

/// `‖f‖_{H^s} = (L Σ_k (1+ξ_k²)^s |c_k|²)^{1/2}`.
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    let energy = if s == 0.0 {
        weighted_energy(f, |_| 1.0)
    } else {
        weighted_energy(f, |xi| (1.0 + xi * xi).powf(s))
    };
    (f.grid().length() * energy).sqrt()
}

/// `L²` inner product `∫ f g dx`.
pub fn inner_product(f: &Field, g: &Field) -> Result<f64> {
    f.same_grid(g)?;
    let nyq = f.grid().nyquist();
    let sum: f64 = f
        .coefficients()
        .iter()
        .zip(g.coefficients())
        .enumerate()
        .map(|(k, (a, b))| {
            let mult = if k == 0 || k == nyq { 1.0 } else { 2.0 };
            mult * (a * b.conj()).re
        })
        .sum();
    Ok(f.grid().length() * sum)
}

pub fn sup_norm(f: &Field) -> f64 {
    f.values().into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `‖f‖_∞ + ‖∂ₓf‖_∞`.
pub fn c1_norm(f: &Field) -> f64 {
    sup_norm(f) + sup_norm(&dx(f, 1))
}

fn pointwise_product(f: &Field, g: &Field) -> Field {
    let a = f.values();
    let b = g.values();
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Field::from_values(f.grid(), &prod).expect("same grid")
}

/// Pointwise product on the common grid. With `dealias` both factors and
/// the result are truncated by the 2/3 rule.
pub fn product(f: &Field, g: &Field, dealias: bool) -> Result<Field> {
    f.same_grid(g)?;
    if dealias {
        Ok(pointwise_product(&f.dealiased(), &g.dealiased()).dealiased())
    } else {
        Ok(pointwise_product(f, g))
    }
}

/// Alias-free product: both factors are interpolated onto the refined grid,
/// where every mode of `f·g` is representable. The result lives there.
pub fn product_exact(f: &Field, g: &Field) -> Result<Field> {
    f.same_grid(g)?;
    let fine = f.grid().refined();
    Ok(pointwise_product(&f.resample(&fine)?, &g.resample(&fine)?))
}

/// `[Λ^r, f] g = Λ^r(fg) - f Λ^r g`, evaluated alias-free on the refined grid.
pub fn commutator_lambda(r: f64, f: &Field, g: &Field) -> Result<Field> {
    let fg = product_exact(f, g)?;
    let f_lg = product_exact(f, &lambda_pow(g, r))?;
    Ok(&lambda_pow(&fg, r) - &f_lg)
}

/// `[Λ^σ ∂ₓ, f] v = Λ^σ∂ₓ(fv) - f Λ^σ∂ₓ v`, evaluated alias-free on the
/// refined grid.
pub fn commutator_lambda_dx(sigma: f64, f: &Field, v: &Field) -> Result<Field> {
    let fv = product_exact(f, v)?;
    let f_lv = product_exact(f, &lambda_dx(v, sigma))?;
    Ok(&lambda_dx(&fv, sigma) - &f_lv)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn max_abs_diff(a: &Field, b: &Field) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    fn torus(n: usize) -> Grid {
        Grid::new(2.0 * PI, n).unwrap()
    }

    #[test]
    fn derivative_of_sine_and_constant() {
        let grid = torus(64);
        let s = Field::from_fn(&grid, f64::sin);
        assert!(max_abs_diff(&dx(&s, 1), &Field::from_fn(&grid, f64::cos)) < 1e-12);
        assert!(max_abs_diff(&dx(&s, 2), &(&s * -1.0)) < 1e-12);
        // round-off in the top modes is amplified by |ξ|^order
        assert!(max_abs_diff(&dx(&s, 3), &Field::from_fn(&grid, |x| -x.cos())) < 1e-10);
        assert!(max_abs_diff(&dx(&s, 4), &s) < 1e-8);
        let c = Field::constant(&grid, 2.5);
        assert!(sup_norm(&dx(&c, 1)) == 0.0);
    }

    #[test]
    fn helmholtz_inverse_dx_of_cosine() {
        let grid = torus(64);
        let c = Field::from_fn(&grid, f64::cos);
        let out = helmholtz_inverse_dx(&c);
        let expect = Field::from_fn(&grid, |x| -x.sin() / 4.0);
        assert!(max_abs_diff(&out, &expect) < 1e-12);
        assert_eq!(helmholtz_inverse_dx(&Field::constant(&grid, 3.0)).mean(), 0.0);
    }

    #[test]
    fn lambda_two_scales_first_mode_by_two() {
        let grid = torus(32);
        let c = Field::from_fn(&grid, f64::cos);
        assert!(max_abs_diff(&lambda_pow(&c, 2.0), &(&c * 2.0)) < 1e-12);
        assert!(max_abs_diff(&lambda_pow(&c, 0.0), &c) < 1e-15);
    }

    #[test]
    fn sobolev_norm_of_sine() {
        let grid = torus(64);
        let s = Field::from_fn(&grid, f64::sin);
        for &idx in &[-2.0, 0.0, 0.5, 1.0, 3.6] {
            let expect = PI.sqrt() * 2f64.powf(idx / 2.0);
            assert!((sobolev_norm(&s, idx) - expect).abs() < 1e-12 * expect.max(1.0));
        }
        assert_eq!(sobolev_norm(&Field::zeros(&grid), 2.0), 0.0);
    }

    #[test]
    fn multiplier_rejects_non_finite() {
        let grid = torus(16);
        let f = Field::from_fn(&grid, f64::cos);
        let err = multiplier_apply(&f, |xi| 1.0 / xi).unwrap_err();
        assert!(matches!(err, Error::NonFiniteMultiplier { .. }));
    }

    #[test]
    fn multiplier_inverse_pair_and_semigroup() {
        let grid = Grid::new(10.0, 64).unwrap();
        let f = Field::from_fn(&grid, |x| (-(x - 5.0).powi(2)).exp());
        let down = multiplier_apply(&f, |xi| (1.0 + xi * xi).powi(-2)).unwrap();
        let up = multiplier_apply(&down, |xi| (1.0 + xi * xi).powi(2)).unwrap();
        assert!(max_abs_diff(&up, &f) < 1e-10);
        let half = multiplier_apply(&f, |xi| (1.0 + xi * xi).sqrt()).unwrap();
        let twice = multiplier_apply(&half, |xi| (1.0 + xi * xi).sqrt()).unwrap();
        let once = multiplier_apply(&f, |xi| 1.0 + xi * xi).unwrap();
        assert!(max_abs_diff(&twice, &once) < 1e-12);
        assert!(max_abs_diff(&multiplier_apply(&f, |_| 1.0).unwrap(), &f) < 1e-15);
    }

    #[test]
    fn product_of_cosines() {
        let grid = torus(64);
        let c = Field::from_fn(&grid, f64::cos);
        let expect = Field::from_fn(&grid, |x| 0.5 * (1.0 + (2.0 * x).cos()));
        assert!(max_abs_diff(&product(&c, &c, false).unwrap(), &expect) < 1e-12);
        assert!(max_abs_diff(&product(&c, &c, true).unwrap(), &expect) < 1e-12);
        let one = Field::constant(&grid, 1.0);
        assert!(max_abs_diff(&product(&one, &c, true).unwrap(), &c) < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = Field::zeros(&torus(16));
        let b = Field::zeros(&torus(32));
        assert!(matches!(product(&a, &b, true), Err(Error::GridMismatch)));
        assert!(commutator_lambda(1.0, &a, &b).is_err());
    }

    #[test]
    fn commutators_vanish_for_constant_f() {
        let grid = torus(32);
        let f = Field::constant(&grid, 1.7);
        let g = Field::from_fn(&grid, |x| (x.sin() * 2.0).exp());
        assert!(sup_norm(&commutator_lambda(1.3, &f, &g).unwrap()) < 1e-11);
        assert!(sup_norm(&commutator_lambda_dx(-0.5, &f, &g).unwrap()) < 1e-11);
        let h = Field::from_fn(&grid, |x| x.cos());
        assert!(sup_norm(&commutator_lambda(0.0, &h, &g).unwrap()) < 1e-13);
    }

    #[test]
    fn commutator_lambda_dx_sigma_zero_is_leibniz() {
        let grid = torus(32);
        let f = Field::from_fn(&grid, |x| (x.cos()).exp());
        let v = Field::from_fn(&grid, |x| (2.0 * x).sin() + 0.3);
        let lhs = commutator_lambda_dx(0.0, &f, &v).unwrap();
        let rhs = product_exact(&dx(&f, 1), &v).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn sup_and_c1_norms() {
        let grid = torus(64);
        assert!((sup_norm(&Field::from_fn(&grid, f64::sin)) - 1.0).abs() < (2.0 * PI / 64.0).powi(2));
        let three = Field::constant(&grid, 3.0);
        assert_eq!(sup_norm(&three), 3.0);
        assert_eq!(c1_norm(&three), 3.0);
        let c = c1_norm(&Field::from_fn(&grid, f64::cos));
        assert!((1.99..=2.01).contains(&c));
    }
}
