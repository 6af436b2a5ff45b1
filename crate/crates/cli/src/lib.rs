//! Command-line front end for the chslab experiments.

pub mod config;
pub mod execute;
pub mod manifest;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{build, parse_config, Command, RawConfig, RunConfig, SCHEMA};
pub use execute::{execute, sweep_execute, Outcome, SweepOutcome, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

/// Layers defaults, each config file and the flag overrides. One file (or
/// none) gives one run in `out`; several give one run per file in
/// `out/run<i>`.
pub fn prepare(
    command: Command,
    files: &[PathBuf],
    overrides: &[(String, String)],
    out: &Path,
) -> Result<Vec<RunConfig>, Vec<String>> {
    let texts: Vec<(Option<&PathBuf>, String)> = if files.is_empty() {
        vec![(None, String::new())]
    } else {
        files
            .iter()
            .map(|p| (Some(p), fs::read_to_string(p).unwrap_or_else(|_| String::from("\u{0}"))))
            .collect()
    };
    let many = texts.len() > 1;
    let mut configs = Vec::new();
    let mut errors = Vec::new();
    for (i, (path, text)) in texts.iter().enumerate() {
        let label = path.map_or_else(String::new, |p| format!("{}: ", p.display()));
        if text == "\u{0}" {
            errors.push(format!("{label}cannot read config file"));
            continue;
        }
        let mut raw = RawConfig::defaults();
        let mut local = Vec::new();
        raw.merge_text(text, &mut local);
        for (k, v) in overrides {
            raw.set(k, v, &mut local);
        }
        let dir = if many { out.join(format!("run{i}")) } else { out.to_path_buf() };
        match build(command, raw, dir) {
            Ok(cfg) if local.is_empty() => configs.push(cfg),
            Ok(_) => {}
            Err(more) => local.extend(more),
        }
        errors.extend(local.into_iter().map(|e| format!("{label}{e}")));
    }
    if errors.is_empty() {
        Ok(configs)
    } else {
        Err(errors)
    }
}

/// Runs prepared configs; with several, writes `sweep.csv` into `out`.
pub fn run(configs: &[RunConfig], out: &Path) -> i32 {
    match configs {
        [single] => execute(single).code,
        many => {
            let threads = execute::effective_threads(many.iter().map(|c| c.threads).max().unwrap_or(0));
            match sweep_execute(many, threads) {
                Ok(outcome) => {
                    let csv = outcome.aggregate_csv(many);
                    match fs::create_dir_all(out).and_then(|()| fs::write(out.join("sweep.csv"), csv)) {
                        Ok(()) => outcome.code(),
                        Err(e) => {
                            log::error!("sweep.csv: {e}");
                            EXIT_ERROR
                        }
                    }
                }
                Err(e) => {
                    log::error!("{e}");
                    EXIT_ERROR
                }
            }
        }
    }
}
