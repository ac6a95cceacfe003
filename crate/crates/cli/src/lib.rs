//! Command-line front end for the `crisk` toolkit.
//!
//! Every command writes its outputs plus a `<output>.manifest.json` run
//! manifest into `--out-dir`. Exit codes: 0 success, 2 invalid input or
//! flags, 3 I/O failure, 4 numeric failure (singular system, separation,
//! calibration, non-finite values).

pub mod args;
pub mod commands;
pub mod config;
pub mod documents;
pub mod manifest;
pub mod plot;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use crisk::{Error, ErrorClass, Result, SCHEMA_VERSION};

use args::{Cli, Command};
use commands::{Context, Outcome};
use config::ConfigFile;
use manifest::RunManifest;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

pub fn exit_code(err: &Error) -> u8 {
    match err.class() {
        ErrorClass::Validation => EXIT_VALIDATION,
        ErrorClass::Io => EXIT_IO,
        ErrorClass::Numeric => EXIT_NUMERIC,
    }
}

/// Parses `argv` (program name first), runs the command and reports.
pub fn main_with_args<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cwd = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
    match run(cli, args, &cwd) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Runs a parsed command with relative paths resolved against `base_dir`.
/// `args` are recorded in the manifest.
pub fn run(cli: Cli, args: Vec<String>, base_dir: &Path) -> Result<String> {
    if let Command::Rerun(r) = &cli.command {
        return rerun(&base_dir.join(&r.manifest), cli.common.out_dir.as_deref().map(|d| base_dir.join(d)));
    }
    let config = match &cli.common.config {
        Some(p) => ConfigFile::load(&base_dir.join(p))?,
        None => ConfigFile::default(),
    };
    let seed = match cli.common.seed {
        Some(s) => Some(s),
        None => config.seed()?,
    };
    let out_dir = base_dir.join(cli.common.out_dir.as_deref().unwrap_or(Path::new(".")));
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let ctx = Context { base_dir: base_dir.to_path_buf(), out_dir, config, seed };

    let started = Instant::now();
    let (name, outcome) = dispatch(&ctx, &cli.command)?;
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: name.to_string(),
        args,
        working_directory: base_dir.to_path_buf(),
        config: outcome.config,
        inputs: outcome.inputs,
        outputs: outcome.outputs,
        seed: outcome.seed,
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    let manifest_path = RunManifest::path_for(&manifest.outputs[0]);
    manifest.save(&manifest_path)?;
    Ok(format!("{}\nmanifest: {}", outcome.summary, manifest_path.display()))
}

fn dispatch(ctx: &Context, command: &Command) -> Result<(&'static str, Outcome)> {
    use args::TrainCommand;
    Ok(match command {
        Command::Generate(a) => ("generate", commands::generate(ctx, a)?),
        Command::Split(a) => ("split", commands::split_cmd(ctx, a)?),
        Command::Train(t) => {
            let name = match t {
                TrainCommand::Glm(_) => "train glm",
                TrainCommand::Gbm(_) => "train gbm",
            };
            (name, commands::train(ctx, t)?)
        }
        Command::Evaluate(a) => ("evaluate", commands::evaluate_cmd(ctx, a)?),
        Command::Explain(a) => ("explain", commands::explain_cmd(ctx, a)?),
        Command::Stability(a) => ("stability", commands::stability_cmd(ctx, a)?),
        Command::Probe(a) => ("probe", commands::probe_cmd(ctx, a)?),
        Command::Plot(a) => ("plot", commands::plot_cmd(ctx, a)?),
        Command::Rerun(_) => unreachable!("handled before dispatch"),
    })
}

/// Re-executes the invocation recorded in a manifest, optionally writing to
/// a different directory.
fn rerun(manifest_path: &Path, out_dir: Option<PathBuf>) -> Result<String> {
    let m = RunManifest::load(manifest_path)?;
    let args = match &out_dir {
        Some(dir) => manifest::with_out_dir(&m.args, dir),
        None => m.args.clone(),
    };
    let argv = std::iter::once("crisk".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| Error::InvalidArgument(format!("manifest arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(Error::InvalidArgument("a manifest cannot replay another rerun".into()));
    }
    run(cli, args, &m.working_directory)
}
