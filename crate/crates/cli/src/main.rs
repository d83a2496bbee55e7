#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::Parser;

use args::{Cli, Command};
use commands::{Ctx, DiagnosticsReported, Plan, Report, UsageError};
use output::{manifest_path, open_sink, RunManifest};

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Rates(_) => "rates",
        Command::Chi(_) => "chi",
        Command::Lens(_) => "lens",
        Command::Bdsim(_) => "bdsim",
        Command::ValidateZeroRotation(_) => "validate-zero-rotation",
        Command::Replay(_) => "replay",
    }
}

fn plan(c: &Command) -> Plan {
    match c {
        Command::Rates(a) => commands::rates_plan(a),
        Command::Chi(a) => commands::chi_plan(a),
        Command::Lens(a) => commands::lens_plan(a),
        Command::Bdsim(a) => commands::bdsim_plan(a),
        Command::ValidateZeroRotation(a) => commands::zero_rotation_plan(a),
        Command::Replay(_) => unreachable!("replay has no plan"),
    }
}

fn execute(c: &Command, ctx: &Ctx, sink: Box<dyn Write>) -> Result<Report> {
    match c {
        Command::Rates(a) => commands::rates(a, ctx, sink),
        Command::Chi(a) => commands::chi(a, ctx, sink),
        Command::Lens(a) => commands::lens(a, ctx, sink),
        Command::Bdsim(a) => commands::bdsim(a, ctx, sink),
        Command::ValidateZeroRotation(a) => commands::zero_rotation(a, ctx, sink),
        Command::Replay(_) => unreachable!("replay is dispatched separately"),
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<()> {
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest, cli.out.as_deref());
    }
    let ctx = Ctx {
        format: cli.format,
        threads: cli.threads,
    };
    let Some(out) = cli.out.as_deref() else {
        return execute(&cli.command, &ctx, Box::new(io::stdout()))?.into_result().map(drop);
    };
    let plan = plan(&cli.command);
    let mut manifest = RunManifest {
        command: command_name(&cli.command).to_string(),
        argv,
        params: plan.params,
        seed: plan.seed,
        trials: plan.trials,
        threads: cli.threads,
        format: cli.format,
        wall_clock_seconds: 0.0,
        version: env!("CARGO_PKG_VERSION").to_string(),
        sha256: String::new(),
        complete: false,
    };
    let mpath = manifest_path(out);
    manifest.write(&mpath)?;
    let start = Instant::now();
    let report = execute(&cli.command, &ctx, open_sink(Some(out))?);
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    let report = report?;
    manifest.sha256 = report.sha256.clone();
    manifest.complete = report.diagnostics == 0;
    manifest.write(&mpath)?;
    report.into_result().map(drop)
}

/// Re-runs the recorded command and checks the output checksum.
fn replay(manifest: &Path, out: Option<&Path>) -> Result<()> {
    let m = RunManifest::read(manifest)?;
    if !m.complete {
        bail!("{} records an incomplete run; nothing to compare against", manifest.display());
    }
    let cli = Cli::try_parse_from(std::iter::once("patchy".to_string()).chain(m.argv.iter().cloned()))?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!("manifest records a replay");
    }
    let ctx = Ctx {
        format: cli.format,
        threads: cli.threads,
    };
    let sha = execute(&cli.command, &ctx, open_sink_or_discard(out)?)?.into_result()?;
    if sha != m.sha256 {
        bail!("output checksum {sha} differs from recorded {}", m.sha256);
    }
    eprintln!("replay: output matches sha256 {sha}");
    Ok(())
}

fn open_sink_or_discard(out: Option<&Path>) -> Result<Box<dyn Write>> {
    match out {
        Some(_) => open_sink(out),
        None => Ok(Box::new(io::sink())),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<patchy_core::Error>() {
        return match core {
            c if c.is_diagnostic() => 3,
            patchy_core::Error::InvariantViolation(_) => 1,
            _ => 2,
        };
    }
    if e.is::<UsageError>() {
        return 2;
    }
    if e.is::<DiagnosticsReported>() {
        return 3;
    }
    1
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
