//! `carnot`: config-driven experiments over step-two Carnot groups.
//!
//! Exit codes: 0 success, 2 validation failure, 3 runtime failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use carnot_core::lab::CatalogKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::{Failure, Outcome, EXIT_VALIDATION};
use config::ExperimentConfig;
use output::Outputs;

#[derive(Parser, Debug)]
#[command(name = "carnot", version, about = "Coercive-inequality experiments on step-two Carnot groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check skew-symmetry, independence and H-type structure of the group.
    ValidateGroup(Args),
    /// Estimate the norm-geometry constants a_hat, c_hat, b_hat.
    NormConstants(Args),
    /// Fit the q-Poincaré constant over the test catalog.
    Poincare(Args),
    /// Fit U-bound constants (test functions cut off inside N < 1).
    Ubound(Args),
    /// Fit Log^β-Sobolev constants.
    Logsobolev(Args),
    /// Entropy/energy blow-up for bumps under e^{-αN^p}.
    Nogo(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    /// JSON experiment config.
    #[arg(value_name = "CONFIG")]
    config: PathBuf,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "reports")]
    out: PathBuf,
    /// Sample count for the command's main estimator.
    #[arg(long)]
    samples: Option<usize>,
    /// `csv` also writes the companion CSV tables.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ValidateGroup(_) => "validate-group",
            Command::NormConstants(_) => "norm-constants",
            Command::Poincare(_) => "poincare",
            Command::Ubound(_) => "ubound",
            Command::Logsobolev(_) => "logsobolev",
            Command::Nogo(_) => "nogo",
        }
    }

    fn args(&self) -> &Args {
        match self {
            Command::ValidateGroup(a)
            | Command::NormConstants(a)
            | Command::Poincare(a)
            | Command::Ubound(a)
            | Command::Logsobolev(a)
            | Command::Nogo(a) => a,
        }
    }

    fn run(&self, config: &ExperimentConfig) -> Result<Outcome, Failure> {
        match self {
            Command::ValidateGroup(_) => commands::validate_group(config),
            Command::NormConstants(_) => commands::norm_constants(config),
            Command::Poincare(_) => commands::catalog(config, CatalogKind::Poincare),
            Command::Ubound(_) => commands::catalog(config, CatalogKind::Ubound),
            Command::Logsobolev(_) => commands::catalog(config, CatalogKind::Logsobolev),
            Command::Nogo(_) => commands::nogo(config),
        }
    }
}

fn load_config(cmd: &Command) -> Result<ExperimentConfig, Failure> {
    let args = cmd.args();
    let text = std::fs::read_to_string(&args.config).map_err(|e| Failure {
        code: EXIT_VALIDATION,
        reason: "ConfigUnreadable".into(),
        message: format!("{}: {e}", args.config.display()),
    })?;
    let mut config = ExperimentConfig::parse(&text).map_err(|e| Failure {
        code: EXIT_VALIDATION,
        reason: "ConfigInvalid".into(),
        message: e.to_string(),
    })?;
    config.apply_overrides(cmd.name(), args.seed, args.samples);
    config.sampler.seed = Some(config.sampler_seed());
    Ok(config)
}

/// Exit code plus, for a failed validation, the report's reason.
fn execute(cmd: &Command) -> Result<(i32, Value), Failure> {
    let args = cmd.args();
    let config = load_config(cmd)?;
    let outcome = cmd.run(&config)?;
    let out = Outputs::new(&args.out, cmd.name()).map_err(Failure::io)?;
    let mut report = outcome.report;
    report.insert("status".into(), json!(if outcome.exit_code == 0 { "ok" } else { "invalid" }));
    let reason = report.get("reason").cloned().unwrap_or(Value::Null);
    if let Some(Value::Array(w)) = report.get("warnings") {
        for line in w {
            eprintln!("warning: {}", line.as_str().unwrap_or_default());
        }
    }
    let json_path = out
        .write_atomic("", "json", |w| {
            serde_json::to_writer_pretty(&mut *w, &Value::Object(report))?;
            writeln!(w)
        })
        .map_err(Failure::io)?;
    println!("{}", json_path.display());
    if args.format == Format::Csv {
        for (suffix, table) in outcome.tables {
            let p = out.write_atomic(&suffix, "csv", table).map_err(Failure::io)?;
            println!("{}", p.display());
        }
    }
    Ok((outcome.exit_code, reason))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok((code, reason)) => {
            if code != 0 {
                eprintln!("{}", json!({"status": "invalid", "reason": reason}));
            }
            ExitCode::from(code as u8)
        }
        Err(f) => {
            let line = json!({"status": "error", "reason": f.reason, "message": f.message});
            eprintln!("{line}");
            ExitCode::from(f.code as u8)
        }
    }
}
