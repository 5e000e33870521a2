use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flipmode_cli::{commands, CliError, ExportFormat, Outcome, ScenarioConfig};

#[derive(Parser)]
#[command(name = "flipmode", version, about = "Quantum noise of multipixel measurements on multimode Gaussian light")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report (or, for export-modes, the mode files) here instead of stdout / `.`
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override `analysis.monte_carlo.seed`
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Log progress to stderr
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Variance of the configured measurement by both routes
    Analyze { config: PathBuf },
    /// Multimode degree of the configured state
    Degree { config: PathBuf },
    /// Squeezing plan for the layouts in the `multi` section
    Multi { config: PathBuf },
    /// Write v0, w1 (and w0, v1 for two-zone splits) as CSV or PGM
    ExportModes {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run every command listed in `analysis.commands`
    Run { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pgm,
}

fn write_report(outcome: &Outcome, out: Option<&Path>) -> Result<(), CliError> {
    let text = commands::render(&outcome.report);
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let load = |p: &Path| ScenarioConfig::load(p);
    match &cli.command {
        Command::Analyze { config } => commands::analyze(&load(config)?, cli.seed),
        Command::Degree { config } => commands::degree(&load(config)?, cli.seed),
        Command::Multi { config } => commands::multi(&load(config)?, cli.seed),
        Command::Run { config } => commands::run(&load(config)?, cli.seed),
        Command::ExportModes { config, format } => {
            let format = match format {
                Format::Csv => ExportFormat::Csv,
                Format::Pgm => ExportFormat::Pgm,
            };
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            commands::export_modes(&load(config)?, cli.seed, format, &dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = execute(&cli).and_then(|outcome| {
        // Export writes its files into --out; the listing goes to stdout.
        let out = match cli.command {
            Command::ExportModes { .. } => None,
            _ => cli.out.as_deref(),
        };
        write_report(&outcome, out)?;
        Ok(outcome.exit_code)
    });
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => {
            eprintln!("error: variance routes disagree beyond tolerance (see dual_path in the report)");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
