//! `spectune`: phantoms, projections, reconstructions, PIQUE scoring and filter tuning.
//!
//! Exit codes: 0 success, 1 validation error, 2 I/O or parse error, 3 numeric failure.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] spectune::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &spectune::Error) -> u8 {
    use spectune::Error as E;
    match e {
        E::Input(_) => 1,
        E::Io(_) | E::Format { .. } => 2,
        E::Conditioning { .. } | E::State(_) => 3,
        E::Slice { source, .. } | E::Aborted { source, .. } | E::Sweep { source, .. } => {
            core_exit_code(source)
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spectune",
    version,
    about = "Butterworth FBP filter tuning with PIQUE"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic phantom volume.
    Phantom(PhantomArgs),
    /// Forward-project every slice of a volume into a sinogram file.
    Radon(RadonArgs),
    /// Reconstruct a sinogram file with Butterworth-filtered back-projection.
    Fbp(FbpArgs),
    /// Score every slice of a volume with PIQUE.
    Pique(PiqueArgs),
    /// Tune (ρ, ω₀) with Bayesian optimization.
    Tune(TuneArgs),
    /// Evaluate the objective on a coarse grid.
    Grid(GridArgs),
    /// Export one slice of a volume as an 8-bit PGM image.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    /// shepp-logan or spheres
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub size: usize,
    #[arg(long, default_value_t = 1)]
    pub slices: usize,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RadonArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = spectune::objective::DESK_ANGLES)]
    pub angles: usize,
    /// Peak expected counts for Poisson noise (omit for noiseless data).
    #[arg(long)]
    pub noise_counts: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FbpArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub omega0: f64,
    /// Output slice size (defaults to the size recorded with the sinogram).
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PiqueArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Also write the `slice,pique` table to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// Sinogram file; without it the configured synthetic phantom is projected.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// key=value configuration file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Nodes per axis of the search grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Also sweep an M×M grid and write landscape.csv.
    #[arg(long)]
    pub oracle: Option<usize>,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the reconstruction of every trace row under `recons/`.
    #[arg(long)]
    pub save_recons: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Nodes per axis.
    #[arg(long, default_value_t = 15)]
    pub m: usize,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV (`rho,omega0,pique`).
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub slice: usize,
    #[arg(long, short)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Phantom(a) => commands::phantom(&a),
        Command::Radon(a) => commands::radon(&a),
        Command::Fbp(a) => commands::fbp(&a),
        Command::Pique(a) => commands::pique(&a),
        Command::Tune(a) => commands::tune(&a),
        Command::Grid(a) => commands::grid(&a),
        Command::Export(a) => commands::export(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectune::Error as E;

    #[test]
    fn exit_code_table() {
        assert_eq!(CliError::usage("x").exit_code(), 1);
        assert_eq!(CliError::from(E::Input("x".into())).exit_code(), 1);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(CliError::io(Path::new("f"), io).exit_code(), 2);
        let fmt = E::Format {
            offset: 3,
            detail: "bad".into(),
        };
        assert_eq!(CliError::from(fmt).exit_code(), 2);
        let cond = E::Conditioning {
            condition_estimate: 1e17,
            detail: "x".into(),
        };
        assert_eq!(CliError::from(cond).exit_code(), 3);
        let nested = E::Aborted {
            partial: vec![],
            source: Box::new(E::State("exhausted".into())),
        };
        assert_eq!(CliError::from(nested).exit_code(), 3);
        let slice = E::Slice {
            slice: 2,
            source: Box::new(E::Input("too small".into())),
        };
        assert_eq!(CliError::from(slice).exit_code(), 1);
    }
}
