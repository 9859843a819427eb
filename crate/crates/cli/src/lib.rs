//! The `fractx` command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 a system failed validation,
//! 4 runtime failure (unreadable input, escaped orbits, ...).

mod bench;
mod commands;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use fractx_core::Error as CoreError;

pub use bench::{run_profile, BenchLine, PROFILES};

#[derive(Parser, Debug)]
#[command(name = "fractx", version, about = "Fractal transformations between IFS attractors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the validation report of a system config.
    Validate {
        #[arg(long)]
        ifs: PathBuf,
    },
    /// Transform a binary PPM image.
    Transform2d {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        #[arg(long)]
        src: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Combined)]
        engine: Engine,
        /// Chaos-game iterations (for `combined`, the switch point).
        #[arg(long)]
        iters: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        workers: Workers,
        #[arg(long)]
        code_length: Option<usize>,
    },
    /// Transform a VOXU8 volume.
    #[command(name = "transform3d-voxel")]
    Transform3dVoxel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        #[arg(long)]
        src: PathBuf,
        #[command(flatten)]
        workers: Workers,
        #[arg(long)]
        code_length: Option<usize>,
    },
    /// Transform an OBJ mesh vertex by vertex.
    #[command(name = "transform3d-mesh")]
    Transform3dMesh {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        #[arg(long)]
        src: PathBuf,
        /// Split edges longer than this before transforming.
        #[arg(long)]
        max_edge: Option<f64>,
        #[arg(long, default_value_t = fractx_core::volume::DEFAULT_VERTEX_CAP)]
        vertex_cap: usize,
        #[arg(long, value_enum, default_value_t = Degenerate::Keep)]
        degenerate: Degenerate,
        #[command(flatten)]
        workers: Workers,
        #[arg(long)]
        code_length: Option<usize>,
    },
    /// Time every engine on a built-in workload.
    Bench {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PROFILES))]
        profile: String,
        #[command(flatten)]
        workers: Workers,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory with the UI bundle, served under `/`.
        #[arg(long)]
        root: Option<PathBuf>,
        /// Seconds of inactivity before a session is dropped.
        #[arg(long, default_value_t = 1800)]
        idle_timeout: u64,
        #[command(flatten)]
        workers: Workers,
    },
}

#[derive(clap::Args, Debug, Clone, Copy)]
pub struct Workers {
    #[arg(long = "workers", env = "FRACTX_WORKERS", default_value_t = default_workers())]
    pub count: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Perpixel,
    Chaos,
    /// Chaos game that only plots points whose history agrees with the mask.
    ChaosMasked,
    Chained,
    Combined,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degenerate {
    Keep,
    Drop,
    Segment,
}

/// Why a command failed, and so which exit code it gets.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Invalid(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invalid(_) => 3,
            Failure::Runtime(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        use CoreError::*;
        let m = e.to_string();
        match e {
            Config { .. }
            | Validation(_)
            | SingularMap { .. }
            | NonContractive { .. }
            | MapLeavesDomain { .. }
            | ContractionOutOfRange(_)
            | InvalidMask(_)
            | Incompatible(_)
            | InvalidParameter { .. }
            | ErrorBudgetExceeded { .. } => Failure::Invalid(m),
            _ => Failure::Runtime(m),
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut out = std::io::stdout().lock();
    match commands::dispatch(cli.command, &mut out) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("fractx: {f}");
            f.code()
        }
    }
}
