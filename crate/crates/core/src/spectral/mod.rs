//! Periodic-domain Fourier toolkit.

mod field;
mod grid;
mod mollifier;
mod ops;

pub use field::Field;
pub use grid::Grid;
pub use mollifier::{build_mollifier, bump_transform, commutator_mollifier, mollify, MollifierTable};
pub use ops::{
    c1_norm, commutator_lambda, commutator_lambda_dx, dx, helmholtz_inverse_dx, inner_product,
    lambda_dx, lambda_pow, multiplier_apply, product, product_exact, sobolev_norm, sup_norm,
    to_coefficients,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Sobolev regularity index; any finite real.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() {
            Ok(Self(s))
        } else {
            Err(Error::InvalidParameter(format!("Sobolev index must be finite, got {s}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
