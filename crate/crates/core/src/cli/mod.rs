//! Command-line front end. Every command reads one JSON config, writes its
//! artifacts atomically into an output directory and returns an exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (an escaped run counts as success) |
//! | 1 | I/O error |
//! | 2 | invalid config or initial data |
//! | 3 | integration failure |
//! | 4 | blow-up analysis needs one point and real data |
//! | 5 | requested time outside the computed lifespan |
//! | 6 | energy audit needs a gradient-type nonlinearity |

pub mod commands;
pub mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_analyze_blowup, cmd_energy_audit, cmd_field_slice, cmd_resolvent_check, cmd_simulate};
pub use output::write_atomic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_NOT_SCALAR: i32 = 4;
pub const EXIT_LIFESPAN: i32 = 5;
pub const EXIT_NON_GRADIENT: i32 = 6;

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pointwave", version, about = "Waves with point-concentrated nonlinearities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the charge equation; writes charges.csv and report.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scalar blow-up analysis; writes blowup.json.
    AnalyzeBlowup {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Field values along a segment; writes field.csv and plot_field.py.
    FieldSlice {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Start of the segment, `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        /// End of the segment, `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Energy at the given times; writes energy.csv.
    EnergyAudit {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated times.
        #[arg(long)]
        times: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Resolvent identity residuals; writes resolvent.json.
    ResolventCheck {
        #[arg(long)]
        config: PathBuf,
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parse arguments, run the command and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Simulate { config, out } => cmd_simulate(&config, &out),
        Command::AnalyzeBlowup { config, out } => cmd_analyze_blowup(&config, &out),
        Command::FieldSlice { config, t, from, to, samples, out } => cmd_field_slice(&config, t, &from, &to, samples, &out),
        Command::EnergyAudit { config, times, out } => cmd_energy_audit(&config, &times, &out),
        Command::ResolventCheck { config, z, w, out } => cmd_resolvent_check(&config, &z, &w, &out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
