use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// A real periodic function held by its Fourier coefficients.
///
/// `c_k` approximates `(1/L) ∫₀ᴸ f(x) e^{-iξ_k x} dx`. Only `k = 0..=N/2` is
/// stored, so conjugate symmetry (and therefore realness) holds by
/// construction. The point values are a derived view.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.modes()],
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut field = Self::zeros(grid);
        field.coeffs[0] = Complex64::new(value, 0.0);
        field
    }

    /// Forward transform of point values sampled at `x_j = jL/N`.
    pub fn from_values(grid: &Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::LengthMismatch {
                expected: grid.points(),
                actual: values.len(),
            });
        }
        let mut input = values.to_vec();
        let mut coeffs = grid.forward_plan().make_output_vec();
        grid.forward_plan()
            .process(&mut input, &mut coeffs)
            .expect("buffer sizes come from the plan");
        let scale = 1.0 / grid.points() as f64;
        for c in &mut coeffs {
            *c *= scale;
        }
        let mut field = Self {
            grid: grid.clone(),
            coeffs,
        };
        field.clean_real_modes();
        Ok(field)
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        Self::from_values(grid, &values).expect("length matches grid")
    }

    /// Builds a field from the half spectrum `k = 0..=N/2`. The imaginary
    /// parts of the mean and Nyquist coefficients are discarded.
    pub fn from_coefficients(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.modes() {
            return Err(Error::LengthMismatch {
                expected: grid.modes(),
                actual: coeffs.len(),
            });
        }
        let mut field = Self {
            grid: grid.clone(),
            coeffs,
        };
        field.clean_real_modes();
        Ok(field)
    }

    fn clean_real_modes(&mut self) {
        let nyq = self.grid.nyquist();
        self.coeffs[0].im = 0.0;
        self.coeffs[nyq].im = 0.0;
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient for any signed index with `|k| <= N/2`; zero outside.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        if idx >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        if k < 0 {
            self.coeffs[idx].conj()
        } else {
            self.coeffs[idx]
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let mut spectrum = self.coeffs.clone();
        let mut out = self.grid.inverse_plan().make_output_vec();
        self.grid
            .inverse_plan()
            .process(&mut spectrum, &mut out)
            .expect("mean and Nyquist modes are real");
        out
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Applies `op(k, c_k)` to every stored coefficient.
    pub(crate) fn map_modes(&self, op: impl Fn(usize, Complex64) -> Complex64) -> Field {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| op(k, c))
            .collect();
        let mut field = Field {
            grid: self.grid.clone(),
            coeffs,
        };
        field.clean_real_modes();
        field
    }

    /// 2/3-rule truncation: modes with `k > N/3` are zeroed.
    pub fn dealiased(&self) -> Field {
        let cut = self.grid.dealias_cutoff();
        self.map_modes(|k, c| if k > cut { Complex64::new(0.0, 0.0) } else { c })
    }

    /// Spectral interpolation onto a grid with the same length.
    ///
    /// Refinement zero-pads (the old Nyquist coefficient is split between
    /// `±N/2`); coarsening drops modes above the new Nyquist and folds the
    /// `±M/2` pair into it, so refine-then-coarsen is the identity.
    pub fn resample(&self, target: &Grid) -> Result<Field> {
        if target.length() != self.grid.length() {
            return Err(Error::GridMismatch);
        }
        let n_src = self.grid.nyquist();
        let n_dst = target.nyquist();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); target.modes()];
        if n_dst >= n_src {
            coeffs[..n_src].copy_from_slice(&self.coeffs[..n_src]);
            let nyq = self.coeffs[n_src];
            coeffs[n_src] = if n_dst == n_src { nyq } else { nyq * 0.5 };
        } else {
            coeffs[..n_dst].copy_from_slice(&self.coeffs[..n_dst]);
            coeffs[n_dst] = Complex64::new(2.0 * self.coeffs[n_dst].re, 0.0);
        }
        Field::from_coefficients(target, coeffs)
    }

    pub fn scale(&self, factor: f64) -> Field {
        self.map_modes(|_, c| c * factor)
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        Ok(self.map_modes(|k, c| c + other.coeffs[k] * factor))
    }
}

impl Add for &Field {
    type Output = Field;

    /// Panics if the grids differ; use [`Field::axpy`] for a fallible sum.
    fn add(self, rhs: &Field) -> Field {
        self.axpy(1.0, rhs).expect("adding fields on different grids")
    }
}

impl Sub for &Field {
    type Output = Field;

    fn sub(self, rhs: &Field) -> Field {
        self.axpy(-1.0, rhs).expect("subtracting fields on different grids")
    }
}

impl Mul<f64> for &Field {
    type Output = Field;

    fn mul(self, rhs: f64) -> Field {
        self.scale(rhs)
    }
}

impl Neg for &Field {
    type Output = Field;

    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}
