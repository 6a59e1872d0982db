use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kwem::cli::{
    cmd_fit, cmd_ingest_check, cmd_simulate, cmd_sweep, exit_code, ingest_dataset, parse_config,
    ColumnSelector, Completion, FitChoice, OutputFormats, RunManifest,
};
use kwem::Result;

#[derive(Parser)]
#[command(name = "kwem", version, about = "Kinetic wealth exchange models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormats>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble and write histogram, CCDF and summary.
    Simulate(RunArgs),
    /// Run the uniform-saving model over a grid of λ values.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda_grid: Vec<f64>,
    },
    /// Fit a distribution family to a dataset column.
    Fit {
        dataset: PathBuf,
        #[arg(long, default_value = "auto")]
        family: String,
        #[arg(long)]
        column: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "both")]
        format: OutputFormats,
    },
    /// Report how many rows of a dataset are usable.
    IngestCheck {
        dataset: PathBuf,
        #[arg(long)]
        column: Option<String>,
    },
}

fn manifest(args: &RunArgs) -> Result<RunManifest> {
    let mut m = parse_config(&args.config)?;
    if let Some(seed) = args.seed {
        m.config.master_seed = seed;
    }
    if let Some(out) = &args.out {
        m.output_dir = out.clone();
    }
    if let Some(f) = args.format {
        m.formats = f;
    }
    Ok(m)
}

fn column(c: &Option<String>) -> ColumnSelector {
    c.as_deref().map(ColumnSelector::parse).unwrap_or_default()
}

fn run(cli: Cli) -> Result<Completion> {
    match cli.command {
        Command::Simulate(args) => Ok(cmd_simulate(&manifest(&args)?)?.completion),
        Command::Sweep { run, lambda_grid } => Ok(cmd_sweep(&manifest(&run)?, &lambda_grid)?.0),
        Command::Fit {
            dataset,
            family,
            column: col,
            out,
            format,
        } => {
            let choice = FitChoice::parse(&family)?;
            let data = ingest_dataset(&dataset, &column(&col))?;
            let fit = cmd_fit(&data, choice, &out, format)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
            Ok(Completion::Success)
        }
        Command::IngestCheck {
            dataset,
            column: col,
        } => {
            let report = cmd_ingest_check(&dataset, &column(&col))?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(Completion::Success)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(c) => {
            if c == Completion::NonConvergence {
                eprintln!("warning: at least one realization did not reach equilibrium");
            }
            ExitCode::from(c.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
