use std::path::PathBuf;
use std::process::ExitCode;

use chslab::config::{Command, SCHEMA};
use chslab::{prepare, run, EXIT_ERROR};
use clap::{Arg, ArgAction};

fn cli() -> clap::Command {
    let mut cmd = clap::Command::new("chslab")
        .about("Numerical experiments for a two-component Camassa–Holm system")
        .arg(
            Arg::new("command")
                .required(true)
                .value_parser(Command::ALL.map(|c| c.name()))
                .help("experiment to run"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .action(ArgAction::Append)
                .value_parser(clap::value_parser!(PathBuf))
                .help("config file; repeat to run a sweep"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .required(true)
                .value_parser(clap::value_parser!(PathBuf))
                .help("output directory"),
        );
    for key in SCHEMA {
        cmd = cmd.arg(
            Arg::new(key.name)
                .long(key.name)
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .help(format!("{} [default: {}]", key.help, key.default))
                .help_heading(key.section),
        );
    }
    cmd
}

/// Pulls `--key value` pairs with unrecognised keys out of `args` so they
/// are reported alongside every other configuration problem.
fn split_unknown(args: Vec<String>) -> (Vec<String>, Vec<(String, String)>) {
    let known = |name: &str| matches!(name, "config" | "out" | "help") || SCHEMA.iter().any(|k| k.name == name);
    let mut kept = Vec::with_capacity(args.len());
    let mut unknown = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        match arg.strip_prefix("--") {
            Some(body) if !body.is_empty() => {
                let (name, inline) = match body.split_once('=') {
                    Some((n, v)) => (n.to_string(), Some(v.to_string())),
                    None => (body.to_string(), None),
                };
                if known(&name) {
                    kept.push(arg);
                } else {
                    let value = inline.or_else(|| it.next()).unwrap_or_default();
                    unknown.push((name, value));
                }
            }
            _ => kept.push(arg),
        }
    }
    (kept, unknown)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (args, unknown) = split_unknown(std::env::args().collect());
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let command: Command = matches
        .get_one::<String>("command")
        .expect("required")
        .parse()
        .expect("checked by clap");
    let out = matches.get_one::<PathBuf>("out").expect("required").clone();
    let files: Vec<PathBuf> = matches
        .get_many::<PathBuf>("config")
        .map(|v| v.cloned().collect())
        .unwrap_or_default();
    let mut overrides: Vec<(String, String)> = SCHEMA
        .iter()
        .filter_map(|k| matches.get_one::<String>(k.name).map(|v| (k.name.to_string(), v.clone())))
        .collect();
    overrides.extend(unknown);

    let configs = match prepare(command, &files, &overrides, &out) {
        Ok(c) => c,
        Err(errors) => {
            eprintln!("invalid configuration ({} problem{}):", errors.len(), if errors.len() == 1 { "" } else { "s" });
            for e in &errors {
                eprintln!("  {e}");
            }
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    ExitCode::from(run(&configs, &out) as u8)
}

#[cfg(test)]
mod tests {
    #[test]
    fn clap_definition_is_consistent() {
        super::cli().debug_assert();
    }

    #[test]
    fn unknown_flags_are_set_aside() {
        let args = ["chslab", "solve", "--foo", "1", "--N=64", "--bar=x", "--out", "d"].map(String::from).to_vec();
        let (kept, unknown) = super::split_unknown(args);
        assert_eq!(kept, ["chslab", "solve", "--N=64", "--out", "d"]);
        assert_eq!(unknown, [("foo".to_string(), "1".to_string()), ("bar".to_string(), "x".to_string())]);
    }
}
