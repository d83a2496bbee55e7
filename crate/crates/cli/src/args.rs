use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use patchy_core::ModelParams;

#[derive(Debug, Parser)]
#[command(name = "patchy", version, about = "Binding rates of patchy particles")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write output here instead of stdout; a `.manifest.json` file is
    /// written next to it.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form rates for one or more site counts.
    Rates(RatesArgs),
    /// Orientation factor chi from 5D kinetic Monte Carlo.
    Chi(ChiArgs),
    /// Lens capacitances c(s) and the integral of c(s) s over [0, 2].
    Lens(LensArgs),
    /// Brownian dynamics of the full binding process.
    Bdsim(BdArgs),
    /// Frozen-site Brownian dynamics against the lens prediction.
    ValidateZeroRotation(ZeroRotationArgs),
    /// Re-run the command recorded in a manifest and compare checksums.
    Replay(ReplayArgs),
}

/// Physical parameters. Defaults give `R = D_tr = a = 1`, `eps = 10^-1.5`,
/// rotational diffusivities 1/2 and no surface diffusion.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 10f64.powf(-1.5))]
    pub eps: f64,
    /// Site counts on A; a comma list sweeps.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub na: Vec<u64>,
    /// Site counts on B; a comma list sweeps.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub nb: Vec<u64>,
    #[arg(long = "a-a", default_value_t = 1.0)]
    pub a_a: f64,
    #[arg(long = "a-b", default_value_t = 1.0)]
    pub a_b: f64,
    #[arg(long = "dtr-a", default_value_t = 0.5)]
    pub dtr_a: f64,
    #[arg(long = "dtr-b", default_value_t = 0.5)]
    pub dtr_b: f64,
    #[arg(long = "drot-a", default_value_t = 0.5)]
    pub drot_a: f64,
    #[arg(long = "drot-b", default_value_t = 0.5)]
    pub drot_b: f64,
    #[arg(long = "dsurf-a", default_value_t = 0.0)]
    pub dsurf_a: f64,
    #[arg(long = "dsurf-b", default_value_t = 0.0)]
    pub dsurf_b: f64,
    #[arg(long = "r-a", default_value_t = 0.5)]
    pub r_a: f64,
    #[arg(long = "r-b", default_value_t = 0.5)]
    pub r_b: f64,
}

impl ModelArgs {
    /// One parameter set per `(N_A, N_B)` in the Cartesian product of the
    /// site-count lists.
    pub fn sweep(&self) -> Vec<ModelParams> {
        let mut out = Vec::new();
        for &n_a in &self.na {
            for &n_b in &self.nb {
                out.push(ModelParams {
                    r_a: self.r_a,
                    r_b: self.r_b,
                    dtr_a: self.dtr_a,
                    dtr_b: self.dtr_b,
                    drot_a: self.drot_a,
                    drot_b: self.drot_b,
                    dsurf_a: self.dsurf_a,
                    dsurf_b: self.dsurf_b,
                    eps: self.eps,
                    a_a: self.a_a,
                    a_b: self.a_b,
                    n_a,
                    n_b,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RatesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Value of chi for the k0 columns; defaults to the quasi-chemical value.
    #[arg(long)]
    pub chi: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChiArgs {
    /// Dimensionless orientational diffusivities of A.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1,10")]
    pub da: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,1,10")]
    pub db: Vec<f64>,
    /// Size ratios R_B/R_A under Stokes–Einstein scaling; replaces the
    /// `--da`/`--db` grid when given.
    #[arg(long, value_delimiter = ',')]
    pub xi: Option<Vec<f64>>,
    #[arg(long = "a-a", default_value_t = 1.0)]
    pub a_a: f64,
    #[arg(long = "a-b", default_value_t = 1.0)]
    pub a_b: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long = "rho-inf", default_value_t = 1e5)]
    pub rho_inf: f64,
    /// Launch radius as a multiple of the region's circumradius.
    #[arg(long = "rho-start", default_value_t = patchy_core::kmc5d::DEFAULT_START_FACTOR)]
    pub rho_start: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LensArgs {
    #[arg(long = "grid-n", default_value_t = 400)]
    pub grid_n: usize,
    /// Trials per grid point.
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long = "rho-inf", default_value_t = 1e5)]
    pub rho_inf: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// chi(1e-4, 1e-4) used for the validation ratio.
    #[arg(long = "chi-ref", default_value_t = 0.1459)]
    pub chi_ref: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BdArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Start radius in units of R.
    #[arg(long, default_value_t = 1.1)]
    pub r0: f64,
    /// Escape radius in units of R.
    #[arg(long = "r-inf", default_value_t = 10.0)]
    pub r_inf: f64,
    #[arg(long = "dt-big", default_value_t = 1e-3)]
    pub dt_big: f64,
    #[arg(long = "dt-small", default_value_t = 1e-8)]
    pub dt_small: f64,
    #[arg(long = "proximity-factor", default_value_t = 3.0)]
    pub proximity_factor: f64,
    #[arg(long = "max-steps", default_value_t = 10_000_000_000)]
    pub max_steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// chi for the prediction columns; computed by kinetic Monte Carlo when
    /// omitted.
    #[arg(long)]
    pub chi: Option<f64>,
    /// Trials for the kinetic Monte Carlo chi.
    #[arg(long = "chi-trials", default_value_t = 1_000_000)]
    pub chi_trials: u64,
    /// Run the frozen-site validation instead.
    #[arg(long = "zero-rotation")]
    pub zero_rotation: bool,
    /// Lens integral for `--zero-rotation`; computed when omitted.
    #[arg(long, requires = "zero_rotation")]
    pub integral: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ZeroRotationArgs {
    #[arg(long, default_value_t = 10f64.powf(-1.5))]
    pub eps: f64,
    #[arg(long, default_value_t = 1.1)]
    pub r0: f64,
    #[arg(long = "r-inf", default_value_t = 10.0)]
    pub r_inf: f64,
    /// Brownian dynamics trials.
    #[arg(long, default_value_t = 10_000_000)]
    pub trials: u64,
    #[arg(long = "dt-big", default_value_t = 1e-3)]
    pub dt_big: f64,
    #[arg(long = "dt-small", default_value_t = 1e-8)]
    pub dt_small: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use this value of the lens integral instead of computing it.
    #[arg(long)]
    pub integral: Option<f64>,
    #[arg(long = "grid-n", default_value_t = 400)]
    pub grid_n: usize,
    #[arg(long = "lens-trials", default_value_t = 100_000)]
    pub lens_trials: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: std::path::PathBuf,
}
