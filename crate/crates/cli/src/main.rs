//! `flowlab`: run scenarios and the acceptance battery from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use flowlab::config::{RunConfig, Scenario};
use flowlab::parabolic::worker_count;
use flowlab::run::{run, RunContext, RunOutput};
use flowlab::verify::{verify_with, Suite};
use flowlab::Error;
use serde_json::json;

const AFTER_HELP: &str = "\
Scenarios: taylor-green, mild-solve, harnack-probe, axisym-run, blowup-analyze, kernel-table.
Parameters are given as key=value or --key value and override the --config file.
Each scenario can also be used directly as a subcommand, e.g.
  flowlab kernel-table --kind Kijk --n 3 --scales 1:100:20
Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 solver failure.";

#[derive(Parser, Debug)]
#[command(name = "flowlab", version, about = "Numerical laboratory for incompressible Navier-Stokes", after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct Global {
    /// Key-value configuration file (`key = value`, `#` comments).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated outputs: *.json for the report, *.csv for the table
    /// (or the fields, when the name contains "field"), dir/ for field files.
    #[arg(long, global = true)]
    emit: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Workers for independent sweep members.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Suppress progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario.
    Run {
        scenario: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Run an acceptance suite: kernels, mild, maxprinciple, axisym, blowup or all.
    Verify { suite: String },
    #[command(external_subcommand)]
    Alias(Vec<String>),
}

/// Pull the global flags out of a scenario parameter list.
fn split_flags(params: &[String], global: &mut Global) -> Result<Vec<String>, Error> {
    let mut rest = Vec::new();
    let mut i = 0;
    while i < params.len() {
        let a = &params[i];
        let (name, inline) = match a.strip_prefix("--") {
            Some(body) => match body.split_once('=') {
                Some((k, v)) => (k, Some(v.to_string())),
                None => (body, None),
            },
            None => {
                rest.push(a.clone());
                i += 1;
                continue;
            }
        };
        if name == "quiet" {
            global.quiet = true;
            i += 1;
            continue;
        }
        if !["config", "emit", "seed", "jobs"].contains(&name) {
            rest.push(a.clone());
            i += 1;
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => {
                i += 1;
                params.get(i).cloned().ok_or_else(|| Error::config(name, "flag is missing its value"))?
            }
        };
        let number = |v: &str| v.parse::<u64>().map_err(|_| Error::config(name, format!("'{v}' is not a non-negative integer")));
        match name {
            "config" => global.config = Some(PathBuf::from(value)),
            "emit" => global.emit = Some(value),
            "seed" => global.seed = Some(number(&value)?),
            _ => global.jobs = Some(number(&value)? as usize),
        }
        i += 1;
    }
    Ok(rest)
}

#[derive(Debug, Clone, PartialEq)]
enum Target {
    Report(PathBuf),
    Table(PathBuf),
    FieldFile(PathBuf),
    FieldDir(PathBuf),
}

fn targets(emit: &str) -> Result<Vec<Target>, Error> {
    emit.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let p = PathBuf::from(s);
            let name = p.file_name().map(|n| n.to_string_lossy().to_lowercase()).unwrap_or_default();
            if s.ends_with('/') || s.ends_with(std::path::MAIN_SEPARATOR) {
                Ok(Target::FieldDir(p))
            } else if name.ends_with(".json") {
                Ok(Target::Report(p))
            } else if name.ends_with(".csv") && name.contains("field") {
                Ok(Target::FieldFile(p))
            } else if name.ends_with(".csv") {
                Ok(Target::Table(p))
            } else {
                Err(Error::config("emit", format!("'{s}' is not a .json, .csv or directory/ target")))
            }
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_outputs(out: &RunOutput, targets: &[Target]) -> Result<Vec<PathBuf>, Error> {
    let mut written = Vec::new();
    for t in targets {
        match t {
            Target::Report(p) => {
                write_file(p, &out.report_text())?;
                written.push(p.clone());
            }
            Target::Table(p) => {
                let table = out
                    .table
                    .as_deref()
                    .ok_or_else(|| Error::config("emit", format!("this scenario produces no table for '{}'", p.display())))?;
                write_file(p, table)?;
                written.push(p.clone());
            }
            Target::FieldFile(p) => {
                write_file(p, &out.fields_text())?;
                written.push(p.clone());
            }
            Target::FieldDir(d) => {
                fs::create_dir_all(d)?;
                for f in &out.fields {
                    let p = d.join(&f.name);
                    fs::write(&p, &f.contents)?;
                    written.push(p);
                }
            }
        }
    }
    Ok(written)
}

/// Timestamps stay out of the artifacts and go to an appended sidecar log.
fn sidecar(first: &Path, line: &str) {
    let dir = match first.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let dir = if first.is_dir() { first.to_path_buf() } else { dir };
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    if let Ok(mut f) = fs::OpenOptions::new().create(true).append(true).open(dir.join("flowlab.log")) {
        let _ = writeln!(f, "{stamp} {line}");
    }
}

fn run_scenario(name: &str, params: &[String], mut global: Global) -> Result<(), Error> {
    let scenario: Scenario = name.parse()?;
    let params = split_flags(params, &mut global)?;
    let mut entries = Vec::new();
    if let Some(path) = &global.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read '{}': {e}", path.display())))?;
        entries.extend(RunConfig::parse_text(&text)?);
    }
    entries.extend(RunConfig::parse_args(&params)?);
    let config = RunConfig::resolve(scenario, &entries, global.seed)?;
    let targets = match &global.emit {
        Some(e) => targets(e)?,
        None => Vec::new(),
    };
    if !global.quiet {
        eprintln!("running {scenario} (seed {})", config.seed);
    }
    let start = Instant::now();
    let out = run(&config, RunContext { jobs: global.jobs })?;
    let elapsed = start.elapsed().as_secs_f64();
    if targets.is_empty() {
        print!("{}", out.report_text());
        return Ok(());
    }
    let written = write_outputs(&out, &targets)?;
    if let Some(first) = written.first() {
        let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
        sidecar(first, &format!("{scenario} seed={} elapsed={elapsed:.3}s wrote {}", config.seed, names.join(",")));
    }
    if !global.quiet {
        for p in &written {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn run_verify(name: &str, global: &Global) -> Result<bool, Error> {
    let suite: Suite = name.parse()?;
    let report = verify_with(suite, |c| println!("{c}"));
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!(
        "{}: {} of {} checks passed",
        if failed == 0 { "PASS" } else { "FAIL" },
        report.checks.len() - failed,
        report.checks.len()
    );
    if let Some(emit) = &global.emit {
        for t in targets(emit)? {
            match t {
                Target::Report(p) => {
                    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::InvalidInput(e.to_string()))?;
                    write_file(&p, &(text + "\n"))?;
                }
                other => return Err(Error::config("emit", format!("verify only writes a JSON report, got {other:?}"))),
            }
        }
    }
    Ok(failed == 0)
}

fn diagnostic(e: &Error) -> String {
    let key = match e {
        Error::Config { key, .. } => key.clone(),
        _ => None,
    };
    json!({
        "error": e.kind(),
        "key": key,
        "message": e.to_string(),
        "exit_code": e.exit_code(),
    })
    .to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = cli.global;
    // FLOWLAB_THREADS also caps the shared pool used inside a single run
    if let Ok(n) = std::env::var("FLOWLAB_THREADS") {
        if n.trim().parse::<usize>().map(|n| n > 0).unwrap_or(false) {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(worker_count(None)).build_global();
        }
    }
    let result = match cli.command {
        Command::Run { scenario, params } => run_scenario(&scenario, &params, global).map(|_| true),
        Command::Alias(args) => {
            let (name, params) = args.split_first().expect("clap supplies the subcommand name");
            run_scenario(name, params, global).map(|_| true)
        }
        Command::Verify { suite } => run_verify(&suite, &global),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
