//! Hölder exponents of the data-to-solution map.

mod experiment;
mod exponent;
mod family;

pub use experiment::{
    run_holder, sweep, write_table_csv, HolderReport, Verdict, HORIZON_CAP, NOISE_FLOOR_FACTOR, RESIDUAL_TOLERANCE,
    SLOPE_TOLERANCE, TABLE_HEADER,
};
pub use exponent::{holder_exponent, HolderCase, Regime, BOUNDARY_TOLERANCE};
pub use family::{default_ladder, make_family, DirectionKind, FamilySpec, PerturbationFamily};
