use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relaycap::validation::{run_all, ValidationOptions};
use relaycap_cli::config::SweepConfig;
use relaycap_cli::error::{exit, CliError};
use relaycap_cli::{configure_threads, presets, write_sweep};

/// Ergodic capacity of two-way relay selection under imperfect CSI.
#[derive(Debug, Parser)]
#[command(name = "relaycap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Monte-Carlo trials per point, overriding the config.
    #[arg(long)]
    trials: Option<u64>,
    /// Base seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Skip the SVG chart.
    #[arg(long)]
    no_plot: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config file.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a built-in figure preset.
    Preset {
        #[arg(value_parser = presets::NAMES)]
        name: String,
        #[command(flatten)]
        run: RunArgs,
        /// Print the preset config and exit.
        #[arg(long)]
        print: bool,
    },
    /// Run the oracle suite and write a pass/fail report.
    Validate {
        /// Fewer trials and coarser histograms.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path.
        #[arg(long, default_value = "validation_report.txt")]
        out: PathBuf,
        /// Test hook: scale one closed-form double-integral term.
        #[arg(long, hide = true)]
        perturb_theta: Option<f64>,
    },
}

fn sweep(mut config: SweepConfig, run: RunArgs) -> Result<(), CliError> {
    if let Some(trials) = run.trials {
        config.trials = trials;
    }
    if let Some(seed) = run.seed {
        config.seed = seed;
    }
    config.validate()?;
    let axis = config.axis.column();
    let files = write_sweep(&config, &run.out, !run.no_plot, |row| {
        eprintln!("{} {axis}={}", row.point.series, row.point.axis_value);
    })?;
    println!("{}", files.csv.display());
    if let Some(svg) = files.svg {
        println!("{}", svg.display());
    }
    println!("{}", files.effective_config.display());
    Ok(())
}

fn validate(
    quick: bool,
    seed: Option<u64>,
    out: PathBuf,
    perturb_theta: Option<f64>,
) -> Result<(), CliError> {
    let mut options = ValidationOptions {
        quick,
        theta_perturbation: perturb_theta,
        ..ValidationOptions::default()
    };
    if let Some(seed) = seed {
        options.seed = seed;
    }
    let report =
        run_all(&options).map_err(|e| CliError::numerical("validation", "oracle suite", e))?;
    let text = report.render();
    fs::write(&out, &text).map_err(|e| CliError::io(&out, e))?;
    print!("{text}");
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed {
            failed: report.failures().map(|c| c.name.clone()).collect(),
        })
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Sweep { config, run } => {
            let text = fs::read_to_string(&config).map_err(|e| CliError::io(&config, e))?;
            let parsed = SweepConfig::parse(&text).map_err(|e| e.context(config.display()))?;
            sweep(parsed, run)
        }
        Command::Preset { name, run, print } => {
            if print {
                print!("{}", presets::source(&name).expect("validated by clap"));
                return Ok(());
            }
            sweep(presets::load(&name)?, run)
        }
        Command::Validate {
            quick,
            seed,
            out,
            perturb_theta,
        } => validate(quick, seed, out, perturb_theta),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::CONFIG
            } else {
                exit::OK
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
