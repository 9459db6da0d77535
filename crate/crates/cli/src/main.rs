use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sublil::{config, emit_plot_data, run, CliError, RunOptions};

#[derive(Parser)]
#[command(
    name = "sublil",
    version,
    about = "Sub-linear expectation and self-normalized LIL experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for repetitions.
        #[arg(long)]
        workers: Option<usize>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write plot-ready CSVs for a completed run.
    Plot {
        run_dir: PathBuf,
        /// Directory for the CSVs (default `<run_dir>/plot`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the JSON schema of the config format.
    Schema,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            workers,
            out,
        } => run(&config, &RunOptions { seed, workers, out }).and_then(|o| {
            println!("{}", o.dir.display());
            if o.passed() {
                Ok(())
            } else {
                let names: Vec<&str> = o.failures().iter().map(|a| a.name.as_str()).collect();
                Err(CliError::Assertion(names.join(", ")))
            }
        }),
        Command::Plot { run_dir, out } => emit_plot_data(&run_dir, out.as_deref()).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
        Command::Schema => {
            println!(
                "{}",
                serde_json::to_string_pretty(&config::schema()).expect("schema serializes")
            );
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sublil: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
