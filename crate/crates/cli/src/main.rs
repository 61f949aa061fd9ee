use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nfold_cli::{
    cmd_check, cmd_complexity, cmd_encode, cmd_graver, cmd_solve, CliError, EncodeKind, Exit,
    RunOptions,
};

/// Exact solver for generalized n-fold integer programs.
#[derive(Parser)]
#[command(name = "nfold", version)]
struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for internal parallelism.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Cross-check the Graver complexity by direct stabilization.
    #[arg(long, global = true)]
    verify_complexity: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve { instance: PathBuf },
    /// Print the Graver basis of [A,B]^(n) for two grid files.
    Graver { a: PathBuf, b: PathBuf, n: usize },
    /// Encode an application as an instance file.
    Encode {
        kind: Kind,
        input: PathBuf,
        /// Also solve and decode the result.
        #[arg(long)]
        solve: bool,
    },
    /// Verify a solution file against an instance file.
    Check { instance: PathBuf, solution: PathBuf },
    /// Print the Graver complexity g(A,B) for two grid files.
    Complexity { a: PathBuf, b: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "3way")]
    ThreeWay,
    Dway,
    Shipment,
    Cutstock,
}

impl From<Kind> for EncodeKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::ThreeWay => EncodeKind::ThreeWay,
            Kind::Dway => EncodeKind::DWay,
            Kind::Shipment => EncodeKind::Shipment,
            Kind::Cutstock => EncodeKind::CutStock,
        }
    }
}

fn run(cli: Cli) -> Result<Exit, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = RunOptions {
        verify_complexity: cli.verify_complexity,
    };
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|source| {
            CliError::Io {
                path: path.clone(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    };
    let exit = match &cli.command {
        Command::Solve { instance } => cmd_solve(instance, opts, &mut out)?,
        Command::Graver { a, b, n } => cmd_graver(a, b, *n, opts, &mut out)?,
        Command::Encode { kind, input, solve } => {
            cmd_encode((*kind).into(), input, *solve, opts, &mut out)?
        }
        Command::Check { instance, solution } => cmd_check(instance, solution, &mut out)?,
        Command::Complexity { a, b } => cmd_complexity(a, b, opts, &mut out)?,
    };
    out.flush().map_err(|source| CliError::Io {
        path: cli.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    })?;
    Ok(exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Error.code() as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(exit) => ExitCode::from(exit.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit().code() as u8)
        }
    }
}
