use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Green's function and local density of states of a repulsive Coulomb
/// electron pair, in atomic units (Hartree, r_B).
#[derive(Debug, Parser)]
#[command(name = "pairgf", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pair density at zero separations against the free-pair and
    /// single-electron references, over an energy grid.
    FigR0(FigR0Args),
    /// Local density of states over an r grid at fixed energy, or over an
    /// energy grid at fixed r.
    Ldos(LdosArgs),
    /// Runs the built-in oracle suite and prints a JSON report.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FigR0Args {
    /// Lowest energy of the grid.
    #[arg(long, allow_negative_numbers = true)]
    pub emin: f64,

    /// Highest energy of the grid.
    #[arg(long, allow_negative_numbers = true)]
    pub emax: f64,

    /// Number of energies.
    #[arg(long)]
    pub n: usize,

    /// Logarithmic energy spacing (requires emin > 0).
    #[arg(long)]
    pub log: bool,

    /// Bandwidth W; adds the re_g0 column.
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LdosArgs {
    /// Fixed energy.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,

    /// Fixed inter-electron distance.
    #[arg(long)]
    pub r: Option<f64>,

    /// Smallest r of the grid; defaults to rmax/n.
    #[arg(long)]
    pub rmin: Option<f64>,

    /// Largest r of the grid.
    #[arg(long)]
    pub rmax: Option<f64>,

    /// Lowest energy of the sweep at fixed r.
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,

    /// Highest energy of the sweep at fixed r.
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,

    /// Number of grid points.
    #[arg(long)]
    pub n: Option<usize>,

    /// Add the singlet and triplet densities rho_even and rho_odd.
    #[arg(long)]
    pub split: bool,

    /// Add the pseudo-LDOS rho_minus.
    #[arg(long)]
    pub pseudo: bool,

    /// Emit every density.
    #[arg(long)]
    pub full: bool,

    /// Switch the interaction off.
    #[arg(long)]
    pub free: bool,

    /// Expert override of the relative-motion kinetic coefficient.
    #[arg(long, default_value_t = 1.0)]
    pub ck: f64,

    /// Sommerfeld parameter convention.
    #[arg(long, value_enum, default_value_t = NuChoice::Unit)]
    pub nu: NuChoice,

    /// Relative tolerance of the band quadrature.
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuChoice {
    /// nu = -1/k
    Unit,
    /// nu = -1/(2 c_k k)
    ReducedMass,
}

#[derive(Debug, Clone, Args)]
pub struct SelfcheckArgs {
    /// Also run the coincidence-limit extrapolation check.
    #[arg(long)]
    pub strict: bool,

    /// Highest partial wave of the partial-wave check.
    #[arg(long, default_value_t = 40)]
    pub lmax: u32,

    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultChoice>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultChoice {
    Sign,
}
