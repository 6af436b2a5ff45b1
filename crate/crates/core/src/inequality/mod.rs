//! Empirical constants for product and commutator estimates.

mod ensemble;
mod kernel;
mod probes;

pub use ensemble::{random_field, GridInfo, ProbeConfig, ProbeReport};
pub use kernel::{eta_grid, kernel_bound_scan, kernel_integral, KernelScan, PLATEAU_TOLERANCE};
pub use probes::{
    algebra_ratio, calderon_ratio, check_negative_product_indices, epsilon_ladder, kato_ponce_ratio,
    probe_algebra, probe_calderon, probe_interpolation, probe_kato_ponce, probe_mollifier_commutator,
    probe_product_low, probe_product_negative, probe_product_negative_sweep, product_low_ratio,
    product_negative_ratio, sweep_modes, worst_sample,
};
