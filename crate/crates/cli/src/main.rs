//! Command-line front end: configuration loading, the five commands and
//! file emission. All simulation happens in the library; this binary owns
//! argument parsing, the thread pool and I/O.

mod commands;
mod output;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use harmloss::config::RunConfig;
use harmloss::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "harmloss",
    version,
    about = "Harmonic motor-loss simulation for battery-electric traction drives",
    after_help = "Exit codes: 0 success, 1 configuration error, 2 infeasible operating point, 3 I/O error, 64 usage error."
)]
struct Cli {
    /// JSON run configuration (omit to use the built-in synthetic 300 kW set)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for emitted files
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads for grid evaluation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Add a generation timestamp to the JSON report metadata
    #[arg(long, global = true)]
    stamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump waveform and ripple spectrum for one mode at one operating point
    Spectrum {
        /// Topology mode (b6_2l, tnpc_3l, ml_5l, buck_2l, ow_h, ow_y)
        #[arg(long, default_value = "b6_2l")]
        modes: String,
        /// Shaft torque (N·m)
        #[arg(long)]
        torque: f64,
        /// Mechanical speed (rad/s)
        #[arg(long)]
        speed: f64,
    },
    /// Loss map over a torque-speed grid for one mode
    Lossmap {
        #[arg(long)]
        modes: String,
        /// Grid size as ROWSxCOLS (torque steps x speed steps)
        #[arg(long, default_value = "5x5")]
        grid: String,
    },
    /// Side-by-side loss maps for a list of modes plus a ratio summary
    Compare {
        /// Comma-separated mode list
        #[arg(long)]
        modes: String,
        #[arg(long, default_value = "5x5")]
        grid: String,
    },
    /// Minimum-loss mode selection per point or over a grid
    Optimize {
        #[arg(long)]
        torque: Option<f64>,
        #[arg(long)]
        speed: Option<f64>,
        #[arg(long)]
        grid: Option<String>,
        /// Restrict the candidate modes (defaults to every configured mode)
        #[arg(long)]
        modes: Option<String>,
    },
    /// Simulate a drive cycle CSV and report energies and shares
    Cycle {
        /// Cycle CSV with header t_s,v_mps
        #[arg(long)]
        cycle: PathBuf,
        /// Evaluate every sample exactly instead of map interpolation
        #[arg(long)]
        exact: bool,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_)
        | Error::NonMonotonicTime { .. }
        | Error::NegativeSpeed { .. }
        | Error::MalformedRow { .. } => 1,
        Error::Infeasible(_)
        | Error::Overmodulation { .. }
        | Error::NoFeasibleMode { .. }
        | Error::InfeasiblePoint { .. }
        | Error::BandEmpty { .. }
        | Error::BandOutsideTables { .. }
        | Error::InvalidRatio { .. } => 2,
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, (String, u8)> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| (format!("cannot read config {}: {e}", p.display()), 1))?;
            RunConfig::from_json(&text).map_err(|e| (e.to_string(), 1))
        }
        None => Ok(RunConfig::synthetic_default()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };

    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot build thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    let config = match load_config(&cli.config) {
        Ok(c) => c,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };

    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!(
            "error: cannot create output directory {}: {e}",
            cli.out.display()
        );
        return ExitCode::from(3);
    }

    let ctx = commands::Context {
        config,
        out_dir: cli.out.clone(),
        stamp: cli.stamp,
    };

    let result = match &cli.command {
        Command::Spectrum {
            modes,
            torque,
            speed,
        } => commands::spectrum(&ctx, modes, *torque, *speed),
        Command::Lossmap { modes, grid } => commands::lossmap(&ctx, modes, grid),
        Command::Compare { modes, grid } => commands::compare(&ctx, modes, grid),
        Command::Optimize {
            torque,
            speed,
            grid,
            modes,
        } => commands::optimize(&ctx, *torque, *speed, grid.as_deref(), modes.as_deref()),
        Command::Cycle { cycle, exact } => commands::cycle(&ctx, cycle, *exact),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CommandError::Sim(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
        Err(commands::CommandError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
