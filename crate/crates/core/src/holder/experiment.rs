use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regression::{fit_log_log, LineFit};
use crate::solver::{solve, DifferenceState, DtPolicy, ExistenceProbe, SolveOptions, Status, SystemParams, Trajectory};

use super::exponent::{holder_exponent, HolderCase};
use super::family::{make_family, FamilySpec, PerturbationFamily};

/// Slope slack below the theoretical exponent.
pub const SLOPE_TOLERANCE: f64 = 0.1;
/// Largest RMS residual of the log-log fit for a verdict.
pub const RESIDUAL_TOLERANCE: f64 = 0.05;
/// Upper cap on the default horizon.
pub const HORIZON_CAP: f64 = 4.0;
/// Separations below this multiple of the round-off estimate are not fitted.
pub const NOISE_FLOOR_FACTOR: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Zero direction: every separation vanishes.
    Degenerate,
    /// `r < 1` with nontrivial `ρ`; outside the proven range.
    Exploratory,
    /// A member left the admissible regime before the horizon.
    BlowUp,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Degenerate => "degenerate",
            Self::Exploratory => "exploratory",
            Self::BlowUp => "blow-up",
        }
    }

    pub fn is_failure(self) -> bool {
        self == Self::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderReport {
    pub case: HolderCase,
    pub horizon: f64,
    pub deltas: Vec<f64>,
    /// `‖(u₀,ρ₀) − (v₀,θ₀)‖_{H^r × H^{r-2}}` per member.
    pub data_distances: Vec<f64>,
    /// `max_{t≤T} ‖w‖_{H^r} + ‖η‖_{H^{r-2}}` per member.
    pub distances: Vec<f64>,
    /// Members used by the fit (above the round-off floor).
    pub fitted: Vec<bool>,
    pub fit: Option<LineFit>,
    pub monotone: bool,
    pub verdict: Verdict,
}

impl HolderReport {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    /// `delta,data_distance,distance` rows.
    pub fn write_curve_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "delta,data_distance,distance")?;
        for ((d, dd), dist) in self.deltas.iter().zip(&self.data_distances).zip(&self.distances) {
            writeln!(out, "{d:e},{dd:e},{dist:e}")?;
        }
        Ok(())
    }
}

/// Exponent for `(s, r)`; `r < 1` with nontrivial `ρ` falls back to the
/// extended law and is flagged.
fn case_for(s: f64, r: f64, rho_trivial: bool) -> Result<(HolderCase, bool)> {
    match holder_exponent(s, r, rho_trivial) {
        Ok(c) => Ok((c, false)),
        Err(Error::OutOfRange { .. }) if !rho_trivial && (0.0..1.0).contains(&r) => {
            let mut c = holder_exponent(s, r, true)?;
            c.rho_trivial = false;
            Ok((c, true))
        }
        Err(e) => Err(e),
    }
}

fn horizon_for(family: &PerturbationFamily, params: &SystemParams) -> Result<f64> {
    let probe = ExistenceProbe::run(&family.base, params, family.s, HORIZON_CAP, &SolveOptions::default())?;
    Ok(probe.t0_fit.min(HORIZON_CAP).min(probe.trajectory.end_time()))
}

fn max_separation(a: &Trajectory, b: &Trajectory, r: f64) -> Result<f64> {
    let mut d = 0.0f64;
    for (x, y) in a.states.iter().zip(&b.states) {
        d = d.max(DifferenceState::between(x, y)?.pair_norm(r));
    }
    Ok(d)
}

/// Solves the base and every member on one time grid and fits
/// `ln d(δ)` against `ln δ`. `horizon = None` uses the fitted existence
/// time, capped at [`HORIZON_CAP`].
pub fn run_holder(
    family: &PerturbationFamily,
    params: &SystemParams,
    r: f64,
    horizon: Option<f64>,
) -> Result<HolderReport> {
    params.validate()?;
    let s = family.s;
    let (case, exploratory) = case_for(s, r, family.rho_trivial)?;
    let horizon = match horizon {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Error::InvalidParameter(format!("horizon must be positive, got {t}"))),
        None => horizon_for(family, params)?,
    };

    let base = solve(&family.base, params, s, horizon, &SolveOptions::default())?;
    let times: Arc<[f64]> = base.times().into();
    let member_opts = SolveOptions::with_dt(DtPolicy::Times(times));
    let members = family
        .deltas
        .par_iter()
        .map(|&d| solve(&family.member(d), params, s, horizon, &member_opts))
        .collect::<Result<Vec<_>>>()?;

    let data_distances: Vec<f64> = family
        .deltas
        .iter()
        .map(|&d| d * family.direction.pair_norm(r))
        .collect();
    let blown = base.status != Status::Completed || members.iter().any(|m| m.status != Status::Completed);
    let distances = members
        .iter()
        .map(|m| max_separation(m, &base, r))
        .collect::<Result<Vec<f64>>>()?;
    let monotone = distances.windows(2).all(|w| w[0] > w[1]);

    let y_max = base.ledger.iter().fold(0.0f64, |m, e| m.max(e.y));
    let floor = NOISE_FLOOR_FACTOR * f64::EPSILON * y_max.max(1.0) * (base.ledger.len() as f64).sqrt();
    let fitted: Vec<bool> = distances.iter().map(|&d| d > floor).collect();

    let mut report = HolderReport {
        case,
        horizon,
        deltas: family.deltas.clone(),
        data_distances,
        distances,
        fitted,
        fit: None,
        monotone,
        verdict: Verdict::Degenerate,
    };
    if blown {
        report.verdict = Verdict::BlowUp;
        return Ok(report);
    }
    if family.is_degenerate() || report.distances.iter().all(|&d| d == 0.0) {
        return Ok(report);
    }
    let (x, y): (Vec<f64>, Vec<f64>) = report
        .deltas
        .iter()
        .zip(&report.distances)
        .zip(&report.fitted)
        .filter(|(_, &keep)| keep)
        .map(|((&d, &dist), _)| (d, dist))
        .unzip();
    if x.len() < 2 {
        return Ok(report);
    }
    let fit = fit_log_log(&x, &y)?;
    report.fit = Some(fit);
    report.verdict = if exploratory {
        Verdict::Exploratory
    } else if fit.slope >= case.beta - SLOPE_TOLERANCE && fit.residual <= RESIDUAL_TOLERANCE {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(report)
}

/// Runs every `(s, r)` case independently with a family built from
/// `spec` (its `s` replaced per case). Results keep input order; a failing
/// case does not abort the others.
pub fn sweep(cases: &[(f64, f64)], spec: &FamilySpec, params: &SystemParams, horizon: Option<f64>) -> Vec<Result<HolderReport>> {
    cases
        .par_iter()
        .map(|&(s, r)| {
            let family = make_family(&FamilySpec { s, ..spec.clone() })?;
            run_holder(&family, params, r, horizon)
        })
        .collect()
}

pub const TABLE_HEADER: &str = "case,s,r,beta_theory,slope,residual,verdict";

/// One row per case; failed cases carry `error` in the verdict column.
pub fn write_table_csv<W: Write>(mut out: W, cases: &[(f64, f64)], rows: &[Result<HolderReport>]) -> Result<()> {
    writeln!(out, "{TABLE_HEADER}")?;
    for (i, ((s, r), row)) in cases.iter().zip(rows).enumerate() {
        match row {
            Ok(rep) => {
                let (slope, res) = rep
                    .fit
                    .map_or((String::new(), String::new()), |f| (format!("{:e}", f.slope), format!("{:e}", f.residual)));
                writeln!(out, "{i},{s},{r},{:e},{slope},{res},{}", rep.case.beta, rep.verdict.as_str())?;
            }
            Err(_) => writeln!(out, "{i},{s},{r},,,,error")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holder::DirectionKind;
    use crate::spectral::Grid;

    fn spec(s: f64) -> FamilySpec {
        FamilySpec::new(Grid::new(64.0, 64).unwrap(), s)
    }

    #[test]
    fn zero_direction_is_degenerate() {
        let mut sp = spec(4.0);
        sp.direction = DirectionKind::Zero;
        let fam = make_family(&sp).unwrap();
        let rep = run_holder(&fam, &SystemParams::default(), 2.0, Some(0.5)).unwrap();
        assert_eq!(rep.verdict, Verdict::Degenerate);
        assert!(rep.distances.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn linear_regime_slope_is_one() {
        let fam = make_family(&spec(4.0)).unwrap();
        let rep = run_holder(&fam, &SystemParams::default(), 2.0, Some(0.5)).unwrap();
        let slope = rep.slope().unwrap();
        assert!((slope - 1.0).abs() < 0.05, "{slope}");
        assert!(rep.monotone);
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn low_r_with_density_is_exploratory() {
        let fam = make_family(&spec(4.0)).unwrap();
        let rep = run_holder(&fam, &SystemParams::default(), 0.5, Some(0.25)).unwrap();
        assert_eq!(rep.verdict, Verdict::Exploratory);
    }

    #[test]
    fn sweep_keeps_order_and_collects_errors() {
        let cases = [(4.0, 2.0), (3.0, 1.0), (4.0, 2.0)];
        let rows = sweep(&cases, &spec(4.0), &SystemParams::default(), Some(0.25));
        assert!(rows[1].is_err());
        let (a, b) = (rows[0].as_ref().unwrap(), rows[2].as_ref().unwrap());
        assert_eq!(a.distances, b.distances);
        assert!(sweep(&[], &spec(4.0), &SystemParams::default(), None).is_empty());
        let mut out = Vec::new();
        write_table_csv(&mut out, &cases, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(TABLE_HEADER));
        assert!(text.lines().nth(2).unwrap().ends_with("error"));
    }
}
