//! `dsrfilt`: synthesis, simulation, fitting and mixed-mode conversion for
//! balanced DSR bandpass filter circuit models.

mod commands;
mod config;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dsrfilter::{Convention, Topology};

use commands::Flags;

#[derive(Parser)]
#[command(name = "dsrfilt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides output.dir).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Cell topology: t (split line), tfull or gamma.
    #[arg(long, global = true)]
    topology: Option<Topology>,

    /// Shunt-branch reactance sign at the band edges: plusj or minusj.
    #[arg(long, global = true)]
    convention: Option<Convention>,

    /// One-based physical port order of a 4-port file, e.g. 1,3,2,4.
    #[arg(long, global = true, value_name = "a,b,c,d")]
    port_map: Option<String>,

    /// Common-mode suppression threshold in dB (positive).
    #[arg(long, global = true, value_name = "N", allow_negative_numbers = true)]
    threshold_db: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Element values from a filter specification.
    Synth,
    /// Frequency sweep of a cascaded filter.
    Sim,
    /// Fit cell values to a measured or simulated two-port response.
    Fit,
    /// Convert a single-ended 4-port file to mixed-mode two-ports.
    Mm {
        /// Touchstone .s4p input.
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },
    /// Passband and common-mode figures of merit.
    Metrics {
        /// Differential-mode .s2p (requires --cm).
        #[arg(long, value_name = "PATH", requires = "cm")]
        dm: Option<PathBuf>,
        /// Common-mode .s2p (requires --dm).
        #[arg(long, value_name = "PATH", requires = "dm")]
        cm: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Flags {
        config: cli.config,
        out: cli.out,
        topology: cli.topology,
        convention: cli.convention,
        port_map: cli.port_map,
        threshold_db: cli.threshold_db,
    };
    let result = match &cli.command {
        Command::Synth => commands::cmd_synth(&flags),
        Command::Sim => commands::cmd_sim(&flags),
        Command::Fit => commands::cmd_fit(&flags),
        Command::Mm { input } => commands::cmd_mm(&flags, input),
        Command::Metrics { dm, cm } => commands::cmd_metrics(&flags, dm.as_deref(), cm.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
