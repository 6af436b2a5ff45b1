//! Pseudo-spectral laboratory for the two-component higher-order
//! Camassa–Holm system in nonlocal form on a periodic domain.
//!
//! * [`spectral`]: grids, fields, multipliers, Sobolev norms, commutators.
//! * [`solver`]: time integration of the system and of its difference
//!   system, norm ledgers, existence-time probes.
//! * [`inequality`]: empirical constants for the product and commutator
//!   estimates, and the convolution kernel integral.
//! * [`holder`]: Hölder exponents of the data-to-solution map.

pub mod error;
pub mod holder;
pub mod inequality;
pub mod quadrature;
pub mod regression;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Field, Grid, SobolevIndex};
