use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bosegp::cli::{self, Command, Format};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Scatter,
    Solve,
    Tf,
    Bounds,
    Sweep,
    Sandwich,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Csv,
}

/// Gross-Pitaevskii ground states and certified many-body energy bounds.
///
/// Any config key can be overridden from the environment, e.g.
/// BOSEGP_SOLVER__TOLERANCE=1e-8 or BOSEGP_N='[1e3, 1e4]'.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Fmt,
    /// Worker threads for sweeps; all cores when absent.
    #[arg(long, env = "BOSEGP_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    match run(&args) {
        Ok(valid) => {
            eprintln!("wall time {:.3} s", start.elapsed().as_secs_f64());
            if valid {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> bosegp::Result<bool> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| bosegp::Error::Config(e.to_string()))?;
    }
    let command = match args.command {
        Cmd::Scatter => Command::Scatter,
        Cmd::Solve => Command::Solve,
        Cmd::Tf => Command::Tf,
        Cmd::Bounds => Command::Bounds,
        Cmd::Sweep => Command::Sweep,
        Cmd::Sandwich => Command::Sandwich,
    };
    let format = match args.format {
        Fmt::Json => Format::Json,
        Fmt::Csv => Format::Csv,
    };
    // the thread count is a run-time knob, not part of the physics config
    let env = std::env::vars().filter(|(k, _)| k != "BOSEGP_THREADS");
    let cfg = cli::load_config(&args.config, env)?;
    let report = cli::run(command, &cfg)?;
    cli::write_outputs(&report, &cfg.outputs)?;
    let bytes = cli::emit(&report, format)?;
    match &args.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    for f in &report.failures {
        eprintln!("invalid: {f}");
    }
    Ok(report.valid)
}
