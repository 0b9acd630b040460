//! Command-line front end: argument parsing, dispatch and error rendering.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use refracted::{Canonical, Error};
use serde_json::Value;

use commands::{Overrides, DEFAULT_SEED};
use config::RunConfig;
use output::{object, Output};
use validate::{run_validate, ValidateSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Paths used by `validate` when neither the config nor `--paths` sets one.
pub const VALIDATE_DEFAULT_PATHS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "refracted", version, about = "Scale functions and fluctuation identities of refracted Lévy processes")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    /// Suppress error messages on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Use a shipped reference model instead of model fields in the config.
    #[arg(long, global = true, value_parser = parse_canonical)]
    pub canonical: Option<Canonical>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Table of W, W', Z (and W'').
    Scale,
    /// Exit-problem Laplace transforms.
    Exit,
    /// Ruin probability.
    Ruin,
    /// Resolvent mass and density table.
    Resolvent,
    /// Discounted probability of creeping below zero.
    Creep,
    /// Expected discounted dividends under the refraction strategy.
    Dividends,
    /// Joint law of overshoot and undershoot at ruin.
    Overshoot,
    /// Smooth-fit diagnostics at the threshold.
    Pasting,
    /// Ruin probability of the stable model in Mittag-Leffler form.
    StableRuin,
    /// Monte Carlo estimate of one functional.
    Simulate {
        /// Also write the CSV trace of one path here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Analytic values against Monte Carlo and the internal cross-checks.
    Validate,
}

fn parse_canonical(s: &str) -> Result<Canonical, String> {
    Canonical::ALL
        .into_iter()
        .find(|c| c.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown model `{s}`, expected M1, M2 or M3"))
}

fn error_json(e: &Error) -> String {
    let mut fields = vec![("error", Value::String(e.kind().into())), ("message", Value::String(e.to_string()))];
    if let Error::DriftNotDominating { .. } = e {
        fields.push((
            "regime_note",
            Value::String(
                "the refracted process drifts to −∞; ruin is certain and the identities are not defined".into(),
            ),
        ));
    }
    serde_json::to_string(&object(fields)).expect("error serialises")
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

fn load(cli: &Cli) -> refracted::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = cli.canonical {
        if cfg.model.is_some() {
            return Err(Error::Config("`--canonical` given together with model fields".into()));
        }
        cfg.params.canonical = Some(c);
    }
    Ok(cfg)
}

enum Done {
    Output(Output),
    Report(String, bool),
}

fn execute(cli: &Cli, cfg: &RunConfig) -> refracted::Result<Done> {
    let ov = Overrides { seed: cli.seed, paths: cli.paths };
    let out = match &cli.command {
        Command::Scale => commands::cmd_scale(cfg)?,
        Command::Exit => commands::cmd_exit(cfg)?,
        Command::Ruin => commands::cmd_ruin(cfg)?,
        Command::Resolvent => commands::cmd_resolvent(cfg)?,
        Command::Creep => commands::cmd_creep(cfg)?,
        Command::Dividends => commands::cmd_dividends(cfg)?,
        Command::Overshoot => commands::cmd_overshoot(cfg)?,
        Command::Pasting => commands::cmd_pasting(cfg)?,
        Command::StableRuin => commands::cmd_stable_ruin(cfg)?,
        Command::Simulate { trace } => {
            let out = commands::cmd_simulate(cfg, ov)?;
            if let Some(path) = trace {
                let text = commands::trace(cfg, ov)?;
                std::fs::write(path, text)
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            }
            out
        }
        Command::Validate => {
            if cfg.model.is_some() {
                // model fields are checked even though the report runs on reference models
                cfg.model()?;
                return Err(Error::Config("`validate` runs on reference models; list them under `models`".into()));
            }
            let p = &cfg.params;
            let models = match (&p.models, p.canonical) {
                (Some(m), _) if m.is_empty() => return Err(Error::Config("`models` is empty".into())),
                (Some(m), _) => m.clone(),
                (None, Some(c)) => vec![c],
                (None, None) => Canonical::ALL.to_vec(),
            };
            let settings = ValidateSettings {
                models,
                n_paths: cli.paths.or(p.n_paths).unwrap_or(VALIDATE_DEFAULT_PATHS),
                seed: cli.seed.or(p.seed).unwrap_or(DEFAULT_SEED),
            };
            let report = run_validate(&settings);
            let mut text = serde_json::to_string_pretty(&report.to_json()).expect("report serialises");
            text.push('\n');
            return Ok(Done::Report(text, report.all_pass()));
        }
    };
    Ok(Done::Output(out))
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = load(cli).and_then(|cfg| execute(cli, &cfg));
    let (text, code) = match result {
        Err(e) => {
            if !cli.quiet {
                eprintln!("{}", error_json(&e));
            }
            return exit_code(&e);
        }
        Ok(Done::Report(text, ok)) => (text, if ok { EXIT_OK } else { EXIT_CHECKS_FAILED }),
        Ok(Done::Output(out)) => {
            let default = if matches!(cli.command, Command::Scale) { Format::Csv } else { Format::Json };
            let text = match cli.format.unwrap_or(default) {
                Format::Json => out.json(),
                Format::Csv => out.csv(),
            };
            (text, EXIT_OK)
        }
    };
    if let Err(msg) = emit(cli, &text) {
        if !cli.quiet {
            eprintln!("{}", error_json(&Error::Config(msg)));
        }
        return EXIT_VALIDATION;
    }
    code
}
