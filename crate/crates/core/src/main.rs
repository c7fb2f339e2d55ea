use clap::{Parser, Subcommand};
use parkrelay::cli::{exit_code, write_table, Run, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK};
use parkrelay::config::RunConfig;
use parkrelay::Result;
use std::path::PathBuf;
use std::process::ExitCode;

/// Outage and capacity of amplify-and-forward links relayed by parked cars.
#[derive(Parser)]
#[command(name = "parkrelay", version)]
struct Cli {
    /// Run configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the Monte Carlo trial counts.
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage against threshold SNR, closed form and simulated.
    Fig2,
    /// Hourly arrivals, departures and occupancy of the lot.
    Fig3,
    /// Outage over the day (capacity alongside).
    Fig4,
    /// Outage against elapsed parking time.
    Fig5,
    /// Outage against arrival hour.
    Fig6,
    /// Capacity over the day (outage alongside).
    Fig7,
    /// Runs the oracle suite and prints pass/fail per check.
    Validate,
    /// Prints the default configuration.
    PrintDefaultConfig,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
        cfg.validate.trials = trials;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8> {
    if let Command::PrintDefaultConfig = cli.command {
        print!("{}", RunConfig::default().to_toml_string());
        return Ok(EXIT_OK);
    }
    let run = Run::new(load(cli)?)?;
    let (name, table) = match cli.command {
        Command::Fig2 => ("fig2", run.fig2()?),
        Command::Fig3 => ("fig3", run.fig3()?),
        Command::Fig4 => ("fig4", run.fig4()?),
        Command::Fig5 => ("fig5", run.fig5()?),
        Command::Fig6 => ("fig6", run.fig6()?),
        Command::Fig7 => ("fig7", run.fig7()?),
        Command::Validate => {
            let (report, ok) = run.validate()?;
            print!("{report}");
            return Ok(if ok { EXIT_OK } else { EXIT_FAILURE });
        }
        Command::PrintDefaultConfig => unreachable!(),
    };
    let path = write_table(&cli.out, name, &table)?;
    println!("{}", path.display());
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            debug_assert!(code == EXIT_CONFIG || code == EXIT_FAILURE);
            ExitCode::from(code)
        }
    }
}
