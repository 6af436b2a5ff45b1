//! Time integration of the system and of its difference system.

mod difference;
mod existence;
mod initial;
mod integrate;
mod io;
mod params;
mod rhs;

pub use difference::{diff_solve, DifferenceRun};
pub use existence::{fit_min_cs, size_bound_check, t0_from_norm, t0_lower_bound, ExistenceProbe, SizeBoundReport};
pub use initial::{profile, scale_to_norm, ProfileKind};
pub use integrate::{
    seam_excess, solve, step_rk4, DtPolicy, LedgerEntry, SeamPolicy, SolveOptions, Status, Trajectory,
    BLOW_UP_THRESHOLD, SEAM_TOLERANCE, SEAM_ZONE, SPECTRAL_TAIL_LIMIT,
};
pub use io::{read_snapshot, write_ledger_csv, write_snapshot, LEDGER_HEADER, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use params::{DifferenceState, State, SystemParams};
pub use rhs::{diff_rhs, rhs};
