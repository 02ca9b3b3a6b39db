use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sqcc_cli::validate::DEFAULT_GRID;
use sqcc_cli::{load_config, run_duty_cycle, run_mc_validation, run_point, run_sweep, CliError, Table};

/// Key rates of CV-QKD with a superposed quantum and classical channel.
#[derive(Debug, Parser)]
#[command(name = "sqcc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config, overlaid on the preset if both are given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// fig2, fig3, fig4-good, fig4-bad, fig5a, fig5b, fig5c or fig5d.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Seed for the Monte Carlo oracle.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Key rates over the configured grid.
    Sweep,
    /// Optimized key rates at a single axis value.
    Optimize {
        /// Fibre length (km), elevation (deg) or gain, per the sweep axis.
        #[arg(long)]
        at: f64,
    },
    /// Monte Carlo agreement suite; exits 3 if any check fails.
    McValidate,
    /// Satellite duty cycle of every rate series.
    DutyCycle,
}

fn emit(table: &Table, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let text = match &cli.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let cfg = load_config(cli.preset.as_deref(), text.as_deref())?;
    match cli.command {
        Command::Sweep => emit(&run_sweep(&cfg)?, cli.out.as_ref()),
        Command::Optimize { at } => emit(&run_point(&cfg, at)?, cli.out.as_ref()),
        Command::DutyCycle => emit(&run_duty_cycle(&cfg)?, cli.out.as_ref()),
        Command::McValidate => {
            let report = run_mc_validation(&cfg, cli.seed, &DEFAULT_GRID)?;
            emit(&report.table(), cli.out.as_ref())?;
            report.into_result().map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sqcc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
