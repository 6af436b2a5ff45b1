use std::fs;
use std::path::Path;
use std::time::Instant;

use chslab_core::holder::{sweep, write_table_csv, FamilySpec, HolderReport, Verdict};
use chslab_core::inequality::{
    epsilon_ladder, eta_grid, kernel_bound_scan, kernel_integral, probe_algebra, probe_calderon,
    probe_interpolation, probe_kato_ponce, probe_mollifier_commutator, probe_product_low, probe_product_negative,
    probe_product_negative_sweep, sweep_modes, ProbeConfig, ProbeReport,
};
use chslab_core::solver::{
    profile, scale_to_norm, size_bound_check, solve, write_ledger_csv, write_snapshot, ExistenceProbe, SolveOptions,
    State, Status,
};
use chslab_core::Error as CoreError;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Command, Lemma, RunConfig};
use crate::manifest::{self, Artifact};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Largest ladder spread accepted for the mollifier probe.
pub const MAX_LADDER_SPREAD: f64 = 2.0;
/// Largest log-slope accepted for the frequency sweep.
pub const MAX_SWEEP_SLOPE: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Result of one [`execute`] call.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub results: Vec<(String, String)>,
    pub artifacts: Vec<Artifact>,
    pub error: Option<String>,
}

impl Outcome {
    pub fn content_hash(&self) -> String {
        manifest::content_hash(&self.artifacts)
    }
}

/// Collects artifacts and result lines while a command runs.
struct Sink<'a> {
    dir: &'a Path,
    results: Vec<(String, String)>,
    artifacts: Vec<Artifact>,
}

impl Sink<'_> {
    fn write(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, &bytes).map_err(|source| RunError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.artifacts.push(Artifact {
            name: name.to_string(),
            hash: manifest::blob_hash(&bytes),
        });
        Ok(())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<(), RunError> {
        let mut text = serde_json::to_string_pretty(value).expect("serialisable");
        text.push('\n');
        self.write(name, text.into_bytes())
    }

    fn result(&mut self, key: impl Into<String>, value: impl ToString) {
        self.results.push((key.into(), value.to_string()));
    }
}

/// Worker count: `threads` (0 = all cores) capped by `CHSLAB_THREADS`.
pub fn effective_threads(requested: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let base = if requested == 0 { available } else { requested };
    match std::env::var("CHSLAB_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => base.min(cap),
        _ => base,
    }
}

/// Runs `cfg`, writes its artifacts and `manifest.txt` into `cfg.out`.
pub fn execute(cfg: &RunConfig) -> Outcome {
    let start = Instant::now();
    let mut sink = Sink {
        dir: &cfg.out,
        results: Vec::new(),
        artifacts: Vec::new(),
    };
    let run = fs::create_dir_all(&cfg.out)
        .map_err(|source| RunError::Io {
            path: cfg.out.display().to_string(),
            source,
        })
        .and_then(|()| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(effective_threads(cfg.threads))
                .build()?;
            pool.install(|| dispatch(cfg, &mut sink))
        });
    let (code, error) = match run {
        Ok(code) => (code, None),
        Err(e) => {
            log::error!("{e}");
            (EXIT_ERROR, Some(e.to_string()))
        }
    };
    let text = manifest::render(
        &cfg.echo(),
        &sink.results,
        &sink.artifacts,
        error.as_deref(),
        code,
        start.elapsed(),
    );
    let (code, error) = match fs::write(cfg.out.join("manifest.txt"), text) {
        Ok(()) => (code, error),
        Err(e) => (EXIT_ERROR, Some(format!("manifest.txt: {e}"))),
    };
    Outcome {
        code,
        results: sink.results,
        artifacts: sink.artifacts,
        error,
    }
}

fn dispatch(cfg: &RunConfig, sink: &mut Sink) -> Result<i32, RunError> {
    match cfg.command {
        Command::Solve => run_solve(cfg, sink),
        Command::T0Probe => run_t0probe(cfg, sink),
        Command::Holder => run_holder(cfg, sink),
        Command::Ineq => run_ineq(cfg, sink),
        Command::Kernel => run_kernel(cfg, sink),
    }
}

fn initial_state(cfg: &RunConfig) -> Result<State, CoreError> {
    let init = &cfg.initial;
    let u = profile(&cfg.grid, init.kind, init.amplitude, init.width, cfg.seed)?;
    let rho = profile(&cfg.grid, init.kind, init.rho_amplitude, init.width, cfg.seed.wrapping_add(1))?;
    let state = State::new(u, rho, 0.0)?;
    match init.norm {
        Some(target) => scale_to_norm(&state, cfg.s, target),
        None => Ok(state),
    }
}

fn ledger_bytes(ledger: &[chslab_core::solver::LedgerEntry]) -> Result<Vec<u8>, RunError> {
    let mut buf = Vec::new();
    write_ledger_csv(&mut buf, ledger)?;
    Ok(buf)
}

fn status_str(status: Status) -> &'static str {
    match status {
        Status::Completed => "completed",
        Status::BlowUpDetected => "blow-up-detected",
        Status::ResolutionExhausted => "resolution-exhausted",
    }
}

fn run_solve(cfg: &RunConfig, sink: &mut Sink) -> Result<i32, RunError> {
    let initial = initial_state(cfg)?;
    let opts = SolveOptions {
        stride: cfg.stride,
        ..SolveOptions::default()
    };
    let traj = solve(&initial, &cfg.params, cfg.s, cfg.t_end, &opts)?;
    sink.write("trajectory.csv", ledger_bytes(&traj.ledger)?)?;
    if cfg.snapshot {
        let mut buf = Vec::new();
        write_snapshot(&mut buf, traj.last())?;
        sink.write("final.chs2", buf)?;
    }
    let y_max = traj.ledger.iter().fold(0.0f64, |m, e| m.max(e.y));
    sink.result("status", status_str(traj.status));
    sink.result("t_final", traj.end_time());
    sink.result("y0", traj.ledger[0].y);
    sink.result("y_max", y_max);
    Ok(if traj.is_complete() { EXIT_PASS } else { EXIT_FAIL })
}

fn run_t0probe(cfg: &RunConfig, sink: &mut Sink) -> Result<i32, RunError> {
    let initial = initial_state(cfg)?;
    let probe = ExistenceProbe::run(&initial, &cfg.params, cfg.s, cfg.max_horizon, &SolveOptions::default())?;
    let traj = &probe.trajectory;
    // Fall back to the supplied constant when the fitted time lies past the horizon.
    let bound = match &probe.size_bound {
        Some(b) => Some(b.clone()),
        None if traj.is_complete() && probe.t0_input <= traj.end_time() - traj.ledger[0].t => {
            Some(size_bound_check(traj, probe.y0, &cfg.params)?)
        }
        None => None,
    };
    sink.write("trajectory.csv", ledger_bytes(&traj.ledger)?)?;
    sink.json(
        "t0probe.json",
        &json!({
            "y0": probe.y0,
            "c_s": cfg.params.c_s,
            "T0": probe.t0_input,
            "c_fit": probe.c_fit,
            "T0_fit": probe.t0_fit,
            "horizon": traj.end_time(),
            "status": status_str(traj.status),
            "size_bound": bound,
        }),
    )?;
    sink.result("y0", probe.y0);
    sink.result("T0", probe.t0_input);
    sink.result("c_fit", probe.c_fit);
    sink.result("T0_fit", probe.t0_fit);
    sink.result("status", status_str(traj.status));
    let code = match &bound {
        Some(b) => {
            sink.result("size_bound_c_s", b.c_s);
            sink.result("size_bound_max_ratio", b.max_ratio);
            sink.result("size_bound", if b.passed { "pass" } else { "fail" });
            if b.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        None if traj.is_complete() => {
            sink.result("size_bound", "not-checked");
            EXIT_PASS
        }
        None => {
            sink.result("size_bound", "fail");
            EXIT_FAIL
        }
    };
    Ok(code)
}

fn family_spec(cfg: &RunConfig) -> FamilySpec {
    let h = &cfg.holder;
    FamilySpec {
        h: h.h,
        base: h.base,
        direction: h.direction,
        amplitude: h.amplitude,
        width: h.width,
        deltas: h.deltas.clone(),
        seed: cfg.seed,
        rho_trivial: h.rho_trivial,
        ..FamilySpec::new(cfg.grid.clone(), cfg.s)
    }
}

fn run_holder(cfg: &RunConfig, sink: &mut Sink) -> Result<i32, RunError> {
    let cases = &cfg.holder.cases;
    let rows = sweep(cases, &family_spec(cfg), &cfg.params, cfg.holder.horizon);
    let mut table = Vec::new();
    write_table_csv(&mut table, cases, &rows)?;
    sink.write("holder_table.csv", table)?;

    let mut code = EXIT_PASS;
    let mut entries = Vec::new();
    for (i, ((s, r), row)) in cases.iter().zip(&rows).enumerate() {
        match row {
            Ok(rep) => {
                let mut curve = Vec::new();
                rep.write_curve_csv(&mut curve)?;
                sink.write(&format!("holder_case{i}.csv"), curve)?;
                sink.result(format!("case{i}.verdict"), rep.verdict.as_str());
                if let Some(slope) = rep.slope() {
                    sink.result(format!("case{i}.slope"), slope);
                }
                if rep.verdict.is_failure() || rep.verdict == Verdict::BlowUp {
                    code = code.max(EXIT_FAIL);
                }
                entries.push(json!({"case": i, "s": s, "r": r, "report": report_json(rep)}));
            }
            Err(e) => {
                sink.result(format!("case{i}.verdict"), "error");
                code = EXIT_ERROR;
                entries.push(json!({"case": i, "s": s, "r": r, "error": e.to_string()}));
            }
        }
    }
    sink.json("holder_report.json", &serde_json::Value::Array(entries))?;
    Ok(code)
}

fn report_json(rep: &HolderReport) -> serde_json::Value {
    serde_json::to_value(rep).expect("serialisable")
}

fn run_ineq(cfg: &RunConfig, sink: &mut Sink) -> Result<i32, RunError> {
    let q = &cfg.ineq;
    let base = ProbeConfig {
        gamma: q.gamma,
        amplitude: q.amplitude,
        ..ProbeConfig::new(cfg.grid.clone(), q.ensemble, cfg.seed)
    };
    let wanted = |l: Lemma| q.lemma == Lemma::All || q.lemma == l;
    let mut jobs: Vec<(&str, Lemma)> = Vec::new();
    for (name, lemma) in [
        ("algebra", Lemma::Algebra),
        ("kato-ponce", Lemma::KatoPonce),
        ("mollifier", Lemma::Mollifier),
        ("calderon", Lemma::Calderon),
        ("product-low", Lemma::ProductLow),
        ("product-negative", Lemma::ProductNegative),
        ("sweep", Lemma::Sweep),
        ("interpolation", Lemma::Interpolation),
    ] {
        if wanted(lemma) {
            jobs.push((name, lemma));
        }
    }

    let run_one = |lemma: Lemma| -> Result<ProbeReport, CoreError> {
        match lemma {
            Lemma::Algebra => probe_algebra(&base, cfg.r),
            Lemma::KatoPonce => probe_kato_ponce(&base, cfg.r),
            Lemma::Mollifier => {
                let grid = q.mollifier_grid.clone().expect("validated");
                let mcfg = ProbeConfig { grid, ..base.clone() };
                probe_mollifier_commutator(&mcfg, &epsilon_ladder(q.ladder_steps))
            }
            Lemma::Calderon => probe_calderon(&base, cfg.s, cfg.sigma),
            Lemma::ProductLow => probe_product_low(&base, cfg.r),
            Lemma::ProductNegative => probe_product_negative(&base, cfg.r, cfg.j, cfg.k),
            Lemma::Sweep => {
                let modes = sweep_modes(cfg.grid.points(), q.sweep_modes);
                probe_product_negative_sweep(&base, cfg.r, cfg.j, cfg.k, &modes)
            }
            Lemma::Interpolation => probe_interpolation(&base, q.s1, q.s2, &q.thetas),
            Lemma::All => unreachable!("expanded above"),
        }
    };

    let mut code = EXIT_PASS;
    let mut summary = String::from("probe,constant,violations,worst_seed,ensemble\n");
    for (name, lemma) in jobs {
        let rep = run_one(lemma)?;
        let mut text = rep.to_json()?;
        text.push('\n');
        sink.write(&format!("probe_{name}.json"), text.into_bytes())?;
        if q.samples_csv {
            let mut buf = Vec::new();
            rep.write_ratios_csv(&mut buf, rep.worst_seed)?;
            sink.write(&format!("probe_{name}_samples.csv"), buf)?;
        }
        summary.push_str(&format!(
            "{name},{:e},{},{},{}\n",
            rep.constant, rep.violations, rep.worst_seed, rep.ensemble
        ));
        sink.result(format!("{name}.constant"), rep.constant);
        let detail = |key: &str| rep.details.get(key).and_then(|v| v.as_f64());
        let mut failed = !rep.constant.is_finite() || rep.violations > 0;
        if let Some(spread) = detail("ladder_spread") {
            sink.result(format!("{name}.ladder_spread"), spread);
            failed |= spread > MAX_LADDER_SPREAD;
        }
        if let Some(slope) = detail("slope") {
            sink.result(format!("{name}.slope"), slope);
            failed |= slope > MAX_SWEEP_SLOPE;
        }
        if rep.violations > 0 {
            sink.result(format!("{name}.violations"), rep.violations);
        }
        if failed {
            code = EXIT_FAIL;
        }
    }
    sink.write("probe_summary.csv", summary.into_bytes())?;
    Ok(code)
}

fn run_kernel(cfg: &RunConfig, sink: &mut Sink) -> Result<i32, RunError> {
    let (r, j, k) = (cfg.r, cfg.j, cfg.k);
    let eta = eta_grid(cfg.per_decade);
    match kernel_integral(r, j, k, 0.0) {
        Err(CoreError::Divergent(msg)) => {
            sink.json(
                "kernel.json",
                &json!({"r": r, "j": j, "k": k, "divergent": true, "message": msg}),
            )?;
            sink.result("divergent", true);
            return Ok(EXIT_FAIL);
        }
        Err(e) => return Err(e.into()),
        Ok(_) => {}
    }
    let scan = kernel_bound_scan(r, j, k, &eta)?;
    let mut csv = String::from("eta,ratio\n");
    for (e, v) in scan.eta.iter().zip(&scan.ratio) {
        csv.push_str(&format!("{e:e},{v:e}\n"));
    }
    sink.write("kernel_scan.csv", csv.into_bytes())?;
    sink.json(
        "kernel.json",
        &json!({
            "r": r, "j": j, "k": k,
            "divergent": false,
            "sup": scan.sup,
            "argmax": scan.argmax,
            "last_decade_growth": scan.last_decade_growth,
            "plateau": scan.plateau,
        }),
    )?;
    sink.result("divergent", false);
    sink.result("sup", scan.sup);
    sink.result("last_decade_growth", scan.last_decade_growth);
    sink.result("plateau", scan.plateau);
    Ok(if scan.plateau { EXIT_PASS } else { EXIT_FAIL })
}

/// Outcome of [`sweep_execute`].
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub outcomes: Vec<Outcome>,
}

impl SweepOutcome {
    /// Largest member exit code.
    pub fn code(&self) -> i32 {
        self.outcomes.iter().map(|o| o.code).max().unwrap_or(EXIT_PASS)
    }

    /// `index,command,exit_code,content_hash` plus every result line, in
    /// input order.
    pub fn aggregate_csv(&self, configs: &[RunConfig]) -> String {
        let mut out = String::from("index,command,exit_code,content_hash,key,value\n");
        for (i, (cfg, o)) in configs.iter().zip(&self.outcomes).enumerate() {
            let head = format!("{i},{},{},{}", cfg.command, o.code, o.content_hash());
            if o.results.is_empty() {
                out.push_str(&format!("{head},,\n"));
            }
            for (k, v) in &o.results {
                out.push_str(&format!("{head},{k},{v}\n"));
            }
        }
        out
    }
}

/// Runs independent configs on at most `parallelism` workers; outcomes keep
/// input order.
pub fn sweep_execute(configs: &[RunConfig], parallelism: usize) -> Result<SweepOutcome, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()?;
    let outcomes = pool.install(|| configs.par_iter().map(execute).collect());
    Ok(SweepOutcome { outcomes })
}
