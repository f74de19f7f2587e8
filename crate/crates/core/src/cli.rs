//! Command-line front end: `cmsim [run] <scenario> [flags]`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::error::Error;
use crate::qstate::LogBase;
use crate::scenarios::output::{rows, to_csv, to_json};
use crate::scenarios::{run_scenario, Overrides, RunOptions, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_INTEGRITY: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Base {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

#[derive(Debug, Parser)]
#[command(name = "cmsim", version, about = "Collision-model simulator")]
struct Args {
    /// One of: thermalization, nonmarkov_sweep, battery, two_qubit_local_global, landauer, continuous_limit
    scenario: String,
    /// JSON file of parameter overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    emit: Emit,
    #[arg(long = "log-base", value_enum, default_value = "2")]
    log_base: Base,
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Integrity { .. } | Error::Ledger { .. } => EXIT_INTEGRITY,
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_CONFIG,
    }
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Runs the CLI and returns the process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if argv.get(1).is_some_and(|a| a == "run") {
        argv.remove(1);
    }
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let scenario: Scenario = match args.scenario.parse() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cmsim: {e}");
            return EXIT_USAGE;
        }
    };
    let overrides = match &args.config {
        None => Overrides::default(),
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match Overrides::from_json(&text) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("cmsim: {}: {e}", path.display());
                    return EXIT_CONFIG;
                }
            },
            Err(e) => {
                eprintln!("cmsim: cannot read {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        },
    };
    let opts = RunOptions {
        seed: args.seed,
        log_base: match args.log_base {
            Base::Two => LogBase::Two,
            Base::E => LogBase::E,
        },
    };

    let result = run_scenario(scenario, &overrides, opts)
        .and_then(|run| rows(&run.primary.trajectory, &run.primary.config).map(|r| (run, r)));
    let (run, rows) = match result {
        Ok(x) => x,
        Err(e) => {
            eprintln!("cmsim: {scenario}: {e}");
            return exit_code(&e);
        }
    };

    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("cmsim: cannot create {}: {e}", args.out.display());
        return EXIT_IO;
    }
    let stem = args.out.join(format!("{scenario}_{}", args.seed));
    let mut written = Vec::new();
    if matches!(args.emit, Emit::Csv | Emit::Both) {
        let path = stem.with_extension("csv");
        if let Err(e) = write(&path, &to_csv(&rows)) {
            eprintln!("cmsim: {e}");
            return EXIT_IO;
        }
        written.push(path);
    }
    if matches!(args.emit, Emit::Json | Emit::Both) {
        let path = stem.with_extension("json");
        let text = match to_json(&run, &rows) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("cmsim: {e}");
                return EXIT_IO;
            }
        };
        if let Err(e) = write(&path, &text) {
            eprintln!("cmsim: {e}");
            return EXIT_IO;
        }
        written.push(path);
    }

    let line = serde_json::json!({
        "scenario": scenario.name(),
        "seed": args.seed,
        "steps": rows.len(),
        "outputs": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "summary": run.summary,
    });
    println!("{line}");
    EXIT_OK
}
