use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twc::{GridOptions, GridSpec, GrowthMode};

#[derive(Debug, Parser)]
#[command(
    name = "twc",
    version,
    about = "Twisted convolution calculus at finite Hermite truncation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Phase-space half dimension.
    #[arg(long, global = true, default_value_t = 1)]
    pub d: usize,
    /// Per-coordinate Hermite cutoff.
    #[arg(long = "n-max", global = true, default_value_t = 48)]
    pub n_max: usize,
    /// Largest power N of T_sigma in the growth sequence.
    #[arg(long = "N-max", global = true, default_value_t = 40)]
    pub big_n_max: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Planted Pilipović order (generated elements default to 0.5).
    #[arg(long = "planted-s", global = true)]
    pub planted_s: Option<f64>,
    /// Decay rate of the planted generators (default: chosen from s, n_max, N_max).
    #[arg(long = "planted-r", global = true)]
    pub planted_r: Option<f64>,
    /// Number of generators of a planted element.
    #[arg(long, global = true, default_value_t = 3)]
    pub rank: usize,
    /// Grid box half width L.
    #[arg(long = "grid-L", global = true, default_value_t = 8.0)]
    pub grid_l: f64,
    /// Grid points per axis.
    #[arg(long = "grid-n", global = true, default_value_t = 256)]
    pub grid_n: usize,
    /// Tolerance on fitted orders.
    #[arg(long, global = true, default_value_t = twc::regularity::DEFAULT_S_TOL)]
    pub tol: f64,
    /// Fail (instead of warn) when grid functions carry mass at the box faces.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long = "in", global = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long = "out", global = true)]
    pub output: Option<PathBuf>,
    /// Growth functional used by `verify`.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Origin)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Generate a positive element with planted order.
    Gen,
    /// Twisted product of two coefficient files (`--in A --in B`).
    Compose,
    /// Positivity and regularity check of a generated or given element.
    Verify {
        /// Treat the input as a Weyl symbol.
        #[arg(long)]
        weyl: bool,
    },
    /// Acceptance tables as CSV files in the `--out` directory.
    Tables,
    /// Positivity and decay class of a coefficient file.
    Classify,
    /// Apply one transform to a coefficient file (.json) or a grid file.
    Transform {
        #[arg(long, value_enum)]
        op: TransformOp,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Origin,
    Sup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformOp {
    /// Coefficients to samples on the `--grid-L`/`--grid-n` grid.
    Synthesize,
    /// Samples to coefficients up to `--n-max`.
    Expand,
    /// Symplectic Fourier transform.
    Fsigma,
    /// Kernel of the associated operator.
    Kernel,
    HSigma,
    HBarSigma,
}

/// Everything that determines a run; embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub d: usize,
    pub n_max: usize,
    #[serde(rename = "N_max")]
    pub big_n_max: u32,
    pub seed: u64,
    pub planted_s: Option<f64>,
    pub planted_r: Option<f64>,
    pub rank: usize,
    pub grid_l: f64,
    pub grid_n: usize,
    pub tol: f64,
    pub strict: bool,
    pub inputs: Vec<PathBuf>,
    /// Where results go; not part of the embedded config, so reruns into a
    /// different path stay byte-identical.
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub mode: ModeArg,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> anyhow::Result<Self> {
        let cfg = RunConfig {
            command: cli.command.clone(),
            d: cli.d,
            n_max: cli.n_max,
            big_n_max: cli.big_n_max,
            seed: cli.seed,
            planted_s: cli.planted_s,
            planted_r: cli.planted_r,
            rank: cli.rank,
            grid_l: cli.grid_l,
            grid_n: cli.grid_n,
            tol: cli.tol,
            strict: cli.strict,
            inputs: cli.inputs.clone(),
            output: cli.output.clone(),
            mode: cli.mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.d >= 1, "--d must be at least 1");
        anyhow::ensure!(self.tol > 0.0 && self.tol.is_finite(), "--tol must be positive");
        if let Some(s) = self.planted_s {
            anyhow::ensure!(s > 0.0 && s.is_finite(), "--planted-s must be positive");
        }
        if let Some(r) = self.planted_r {
            anyhow::ensure!(r > 0.0 && r.is_finite(), "--planted-r must be positive");
        }
        let wanted = match self.command {
            Command::Gen | Command::Tables => 0,
            Command::Compose => 2,
            Command::Classify | Command::Transform { .. } => 1,
            Command::Verify { weyl } => usize::from(weyl),
        };
        let ok = match self.command {
            Command::Verify { weyl: false } => self.inputs.len() <= 1,
            _ => self.inputs.len() == wanted,
        };
        anyhow::ensure!(ok, "expected {wanted} --in path(s), got {}", self.inputs.len());
        if matches!(self.command, Command::Tables | Command::Transform { .. }) {
            anyhow::ensure!(self.output.is_some(), "this command needs --out");
        }
        Ok(())
    }

    pub fn grid(&self, dims: usize) -> twc::Result<GridSpec> {
        GridSpec::new(dims, self.grid_l, self.grid_n)
    }

    pub fn grid_options(&self) -> GridOptions {
        if self.strict {
            GridOptions::default()
        } else {
            GridOptions::permissive()
        }
    }

    pub fn growth_mode(&self) -> GrowthMode {
        match self.mode {
            ModeArg::Origin => GrowthMode::Origin,
            ModeArg::Sup => GrowthMode::Sup,
        }
    }
}
