//! Command-line driver: reads a run configuration, applies flag overrides,
//! runs one pipeline and renders its artifact as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Format, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "toboggan", version, about = "Spectra on multisheeted complex contours")]
pub struct Cli {
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "TOBOGGAN_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags that stand in for the `[problem]` section.
#[derive(Debug, Clone, Default, Args)]
pub struct ProblemFlags {
    /// Potential term `COEFF:POWER`, e.g. `1:2` or `i:3`; repeatable.
    #[arg(long = "term")]
    pub terms: Vec<String>,
    #[arg(long)]
    pub ell: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decay wedges of `exp(-x^p / p)` for a potential `x^K`, `p = K/2 + 1`.
    Wedges {
        #[arg(long, default_value_t = 10.0)]
        power: f64,
        #[arg(long, default_value_t = 0.0)]
        phase: f64,
    },
    /// Prints the rectified Sturm equation.
    Rectify {
        #[command(flatten)]
        problem: ProblemFlags,
        #[arg(long)]
        m: Option<u32>,
        /// Substitute `l` instead of printing `alpha = l + 1/2` symbolically.
        #[arg(long)]
        numeric: bool,
    },
    /// Eigenvalues by shooting or the matrix method.
    Spectrum {
        #[command(flatten)]
        problem: ProblemFlags,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, value_delimiter = ',', num_args = 2)]
        window: Option<Vec<f64>>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Monodromy table of the exactly solvable family.
    ExactCheck {
        #[arg(long)]
        winding: Option<i64>,
        #[arg(long)]
        m_max: Option<i64>,
    },
    /// Partner spectra and regimes over a gamma grid.
    SusySweep {
        #[arg(long)]
        gamma_min: Option<String>,
        #[arg(long)]
        gamma_max: Option<String>,
        #[arg(long)]
        gamma_den: Option<i64>,
    },
    /// Large-l estimates against shooting for the rectified cubic.
    Asympt {
        #[arg(long, value_delimiter = ',')]
        windings: Option<Vec<u32>>,
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
    },
    /// Biorthogonal bases, metric and residuals of a matrix pencil.
    Metric {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Figure data: 1 wedges, 8 SUSY sweep, 9 rescaled estimates, 10 rescaled shooting.
    Fig {
        #[arg(long)]
        which: Option<u32>,
    },
}

/// Rendered result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub csv: String,
    pub json: String,
}

impl Artifact {
    pub fn render(&self, format: Format) -> &str {
        match format {
            Format::Csv => &self.csv,
            Format::Json => &self.json,
        }
    }
}

/// Loads the config (if any), runs the subcommand and returns the artifact
/// with the format and destination resolved from flags and config.
pub fn run(cli: &Cli) -> Result<(Artifact, Format, Option<PathBuf>), CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.threads {
        // A pool may already exist when called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let output = cfg.output.clone().unwrap_or_default();
    let format = cli.format.unwrap_or(output.format);
    let path = cli.out.clone().or(output.path);
    let artifact = commands::dispatch(&cli.command, &cfg, cli.seed)?;
    Ok((artifact, format, path))
}
