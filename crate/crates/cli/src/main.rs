use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cmqea_cli::{cmd_run, render_tables, EXIT_IO, EXIT_OK};

/// Simulate the multi-party QKD protocol and its adversaries.
#[derive(Parser)]
#[command(name = "cmqea", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the entanglement-swapping tables and the Pauli-on-Bell map.
    Tables,
    /// Run the experiment described by a config file and write a report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_path` from the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Tables => match std::io::stdout().write_all(render_tables().as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_IO
            }
        },
        Command::Run { config, output } => match cmd_run(&config, output.as_deref(), &mut std::io::stdout()) {
            Ok(_) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code)
}
