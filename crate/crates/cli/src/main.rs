use std::path::PathBuf;
use std::process::ExitCode;

use ccm_core::exec::Execution;
use ccm_lab::{CliError, CliResult, Command, RunOptions};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Exact coset means, Neumann covers and degrees of commutativity.
#[derive(Debug, Parser)]
#[command(name = "ccm-lab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Group specification file (TOML).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Largest finite group or quotient that will be enumerated.
    #[arg(long, default_value_t = 10_000)]
    cap: u64,
    /// Run without worker threads.
    #[arg(long)]
    sequential: bool,
    /// Criteria to run for verify-all (comma separated; default all).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
}

fn execute(args: &Args) -> CliResult<usize> {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Some(ccm_lab::parse_spec(&text)?)
        }
        None => None,
    };
    let opts = RunOptions {
        cap: args.cap,
        mode: if args.sequential { Execution::Sequential } else { Execution::Parallel },
        only: args.only.clone(),
    };
    let report = ccm_lab::run(args.command, spec.as_ref(), &opts)?;
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.failures)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("ccm-lab: {}", CliError::Verification(n));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ccm-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
