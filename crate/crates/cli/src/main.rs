//! `hybridflow`: batch front end for the liquidity model and solvers.

mod commands;
mod config;
mod error;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hybridflow::McConfig;

use crate::commands::Mode;
use crate::config::Format;
use crate::error::CliError;
use crate::output::Output;

const SEED_ENV: &str = "HYBRIDFLOW_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Check a config and print derived quantities.
    Validate,
    /// Solve for the optimal order.
    Optimize,
    /// Solve the hybrid problem across a parameter range.
    Sweep,
    /// Emit the liquidity supply curve with the solver points marked.
    Curves,
    /// Run the Monte Carlo verification suite.
    Simulate,
}

#[derive(Debug, Parser)]
#[command(name = "hybridflow", version, about = "Optimal order splitting between a sweepable book and an auction floor")]
struct Args {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "hybrid")]
    mode: Mode,
    /// Overrides mc.seed and $HYBRIDFLOW_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Monte Carlo worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// For lambda_slow sweeps, move `a` at fixed `mu` instead of `mu` at fixed `a`.
    #[arg(long)]
    vary_a: bool,
    /// Grid points for `curves`.
    #[arg(long, default_value_t = 200)]
    points: usize,
}

fn resolve_seed(cli: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = cli.or(config) {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    let cfg = config::load(&args.config)?;
    let out_spec = cfg.raw.output.clone();
    let format = args
        .format
        .or(out_spec.as_ref().and_then(|o| o.format))
        .unwrap_or(match args.command {
            Command::Sweep | Command::Curves => Format::Csv,
            _ => Format::Json,
        });

    let mut gate_failed = false;
    let output: Output = match args.command {
        Command::Validate => commands::validate(&cfg)?,
        Command::Optimize => commands::optimize(&cfg, args.mode)?,
        Command::Sweep => commands::sweep(&cfg, args.vary_a)?,
        Command::Curves => commands::curves(&cfg, args.points)?,
        Command::Simulate => {
            let mc = cfg
                .raw
                .mc
                .ok_or_else(|| CliError::Config("simulate needs an mc block".into()))?;
            let seed = resolve_seed(args.seed, mc.seed)?;
            let mc = McConfig::new(mc.n, seed).with_workers(args.workers);
            let json = args.format == Some(Format::Json);
            let (report, failed) = commands::simulate(&cfg, mc, json);
            gate_failed = failed;
            report
        }
    };

    let path = args.out.clone().or(out_spec.and_then(|o| o.path));
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(&p)?);
            output::write(&output, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            output::write(&output, format, &mut lock)?;
        }
    }
    if gate_failed {
        return Err(CliError::Gate("one or more identities outside 3 standard errors".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hybridflow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
