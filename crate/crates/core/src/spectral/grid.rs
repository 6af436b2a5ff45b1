use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, L)` with `N` points.
///
/// Coefficients are stored as the non-negative half of the spectrum,
/// `k = 0..=N/2`; negative indices follow from conjugate symmetry.
/// Cloning is cheap, the FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    length: f64,
    points: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

impl Grid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= 8, got {points}"
            )));
        }
        let mut planner = RealFftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        Ok(Self {
            inner: Arc::new(GridInner {
                length,
                points,
                forward,
                inverse,
            }),
        })
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    pub fn points(&self) -> usize {
        self.inner.points
    }

    pub fn spacing(&self) -> f64 {
        self.inner.length / self.inner.points as f64
    }

    /// Number of stored coefficients, `N/2 + 1`.
    pub fn modes(&self) -> usize {
        self.inner.points / 2 + 1
    }

    pub fn nyquist(&self) -> usize {
        self.inner.points / 2
    }

    /// `ξ_k = 2πk/L` for any signed index `k`.
    pub fn wavenumber(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.inner.length
    }

    /// Wavenumbers of the stored half spectrum.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.modes()).map(|k| self.wavenumber(k as i64)).collect()
    }

    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.points()).map(|j| j as f64 * dx).collect()
    }

    /// Largest index kept by the 2/3 dealiasing rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.inner.points / 3
    }

    /// Same domain with twice the points; products of two fields on `self`
    /// are represented exactly there.
    pub fn refined(&self) -> Grid {
        Grid::new(self.inner.length, 2 * self.inner.points).expect("doubling a valid grid")
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn RealToComplex<f64>> {
        &self.inner.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn ComplexToReal<f64>> {
        &self.inner.inverse
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.points == other.inner.points && self.inner.length == other.inner.length
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("length", &self.inner.length)
            .field("points", &self.inner.points)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(1.0, 4).is_err());
        assert!(Grid::new(1.0, 48).is_err());
        assert!(Grid::new(0.0, 64).is_err());
        assert!(Grid::new(f64::NAN, 64).is_err());
        assert!(Grid::new(2.0 * PI, 8).is_ok());
    }

    #[test]
    fn wavenumbers_are_antisymmetric() {
        let grid = Grid::new(64.0, 256).unwrap();
        for k in 0..=128i64 {
            assert_eq!(grid.wavenumber(-k), -grid.wavenumber(k));
        }
        assert_eq!(grid.modes(), 129);
        assert_eq!(grid.dealias_cutoff(), 85);
    }

    #[test]
    fn refined_keeps_length() {
        let grid = Grid::new(3.0, 64).unwrap();
        let fine = grid.refined();
        assert_eq!(fine.points(), 128);
        assert_eq!(fine.length(), 3.0);
        assert_eq!(fine.wavenumber(7), grid.wavenumber(7));
    }
}
