use super::suites::Suite;
use super::{Format, Units};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "fuzzy-qm",
    version,
    about = "Coulomb problem on the fuzzy space R3_lambda: spectra, S-matrix, poles and identity checks",
    after_help = "Exit status: 0 when every tolerance holds, 1 on a tolerance failure, 2 on bad arguments."
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. A `--config` file supplies the same keys.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Plain-text key=value file merged under the command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Noncommutativity length scale.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Coupling of the Coulomb term; positive is attractive.
    #[arg(long, global = true, visible_alias = "alpha", allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Truncation level of the Fock space.
    #[arg(long = "nmax", global = true)]
    pub n_max: Option<usize>,
    /// Angular momentum sector.
    #[arg(long, global = true)]
    pub j: Option<usize>,
    /// Replaces every tolerance in the report.
    #[arg(long, global = true, env = "FUZZY_QM_TOLERANCE")]
    pub tolerance: Option<f64>,
    /// Seed for the random waves in `verify` (default 7).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for independent work items.
    #[arg(long, global = true, env = "FUZZY_QM_THREADS")]
    pub threads: Option<usize>,
    /// `natural` sets m = hbar = 1; `explicit` reads --mass and --hbar.
    #[arg(long, global = true, value_enum)]
    pub units: Option<Units>,
    /// Particle mass for `--units explicit`.
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    /// Reduced Planck constant for `--units explicit`.
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    /// Record wall time in the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumMethod {
    /// Diagonalize the truncated radial operator and compare with the closed form.
    Diagonalize,
    /// Closed-form levels against the commutative Bohr formula.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RadialType {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
    Scatter,
    Eta0,
    Eta1,
    GenericPlus,
    GenericMinus,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest (q > 0) or highest (q < 0) radial levels against the closed form.
    Spectrum {
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = SpectrumMethod::Diagonalize)]
        method: SpectrumMethod,
    },
    /// Partial-wave S-matrix on an energy grid inside (0, 2/lambda^2).
    Smatrix {
        /// Number of evenly spaced interior grid points.
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Explicit comma-separated energies instead of the grid.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        energies: Option<Vec<f64>>,
    },
    /// Run verification suites; one row per identity.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Random waves per identity.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Bound-state poles of the S-matrix with reciprocal-gamma residuals.
    Poles {
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Discrete Laplace solution against -q/r + q0.
    Laplace {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q0: f64,
    },
    /// Closed-form radial vector with its norm and eigen-residual.
    Radial {
        #[arg(long = "type", value_enum)]
        kind: RadialType,
        /// Principal number for the bound families.
        #[arg(long)]
        n: Option<usize>,
        /// Energy for the scattering and generic solutions.
        #[arg(long, allow_negative_numbers = true)]
        energy: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Smatrix { .. } => "smatrix",
            Command::Verify { .. } => "verify",
            Command::Poles { .. } => "poles",
            Command::Laplace { .. } => "laplace",
            Command::Radial { .. } => "radial",
        }
    }
}
