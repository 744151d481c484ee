use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use twocomp::harness::{run_experiment, selftest, ExperimentConfig, Mode, OutputFormat};
use twocomp::Error;

const EX_VALIDATION_FAILED: u8 = 2;
const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_SOFTWARE: u8 = 70;
const EX_IOERR: u8 = 74;

/// Two-component birth-and-death simulator, kinetic solver and scaling sweeps.
#[derive(Debug, Parser)]
#[command(name = "twocomp", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate replicas of the particle system.
    Simulate(RunArgs),
    /// Integrate the kinetic equations on the grid.
    Kinetic(RunArgs),
    /// Compare rescaled simulations with the kinetic solution for each n.
    Sweep(RunArgs),
    /// Check the well-posedness parameter conditions.
    Validate(RunArgs),
    /// Run the exact combinatorics and convolution checks.
    Selftest {
        #[arg(long)]
        quiet: bool,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override the output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Only report errors.
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn init_logging(quiet: bool) {
    let level = if quiet { log::LevelFilter::Error } else { log::LevelFilter::Info };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Unsupported(_) => EX_DATAERR,
        Error::Io { .. } => EX_IOERR,
        Error::Usage(_) => EX_USAGE,
        _ => EX_SOFTWARE,
    }
}

fn load(args: &RunArgs, mode: Mode) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| Error::Io {
        path: args.config.clone(),
        source,
    })?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    cfg.mode = mode;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &RunArgs, mode: Mode) -> Result<u8, Error> {
    init_logging(args.quiet);
    let cfg = load(args, mode)?;
    let outcome = run_experiment(&cfg)?;
    if !args.quiet {
        if let Some(table) = &outcome.convergence {
            print!("{}", table.to_table().to_csv());
        }
        for f in &outcome.files {
            eprintln!("wrote {}", f.display());
        }
    }
    Ok(match outcome.passed {
        Some(false) => {
            eprintln!("parameter conditions not satisfied; see conditions.json");
            EX_VALIDATION_FAILED
        }
        _ => 0,
    })
}

fn run_selftest(quiet: bool) -> Result<u8, Error> {
    let checks = selftest()?;
    let mut ok = true;
    for c in &checks {
        ok &= c.pass;
        if !quiet || !c.pass {
            println!(
                "{} {}: worst {:.3e} (tolerance {:.0e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.worst,
                c.tolerance
            );
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EX_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => run(a, Mode::Simulate),
        Command::Kinetic(a) => run(a, Mode::Kinetic),
        Command::Sweep(a) => run(a, Mode::Sweep),
        Command::Validate(a) => run(a, Mode::Validate),
        Command::Selftest { quiet } => run_selftest(*quiet),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
