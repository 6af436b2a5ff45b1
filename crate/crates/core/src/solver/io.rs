//! Ledger CSV and binary snapshots.
//!
//! Snapshot layout, all little-endian: `b"CHS2"`, version `u32`, `N u32`,
//! `L f64`, `t f64`, then `N` values of `u` followed by `N` values of `ρ`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};

use super::integrate::LedgerEntry;
use super::params::State;

pub const LEDGER_HEADER: &str = "t,norm_u_Hs,norm_rho_Hs-2,y";
pub const SNAPSHOT_MAGIC: &[u8; 4] = b"CHS2";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn write_ledger_csv<W: Write>(mut out: W, ledger: &[LedgerEntry]) -> Result<()> {
    writeln!(out, "{LEDGER_HEADER}")?;
    for e in ledger {
        writeln!(out, "{:e},{:e},{:e},{:e}", e.t, e.norm_u, e.norm_rho, e.y)?;
    }
    Ok(())
}

pub fn write_snapshot<W: Write>(mut out: W, state: &State) -> Result<()> {
    let grid = state.grid();
    let n = u32::try_from(grid.points()).map_err(|_| Error::Snapshot("grid too large".into()))?;
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    out.write_all(&n.to_le_bytes())?;
    out.write_all(&grid.length().to_le_bytes())?;
    out.write_all(&state.t.to_le_bytes())?;
    for v in state.u.values().into_iter().chain(state.rho.values()) {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<State> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot(format!("bad magic {magic:?}")));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    input.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    let mut read_f64 = || -> Result<f64> {
        let mut b = [0u8; 8];
        input.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    };
    let length = read_f64()?;
    let t = read_f64()?;
    let grid = Grid::new(length, n)?;
    let values = (0..2 * n).map(|_| read_f64()).collect::<Result<Vec<_>>>()?;
    let u = Field::from_values(&grid, &values[..n])?;
    let rho = Field::from_values(&grid, &values[n..])?;
    State::new(u, rho, t)
}
