use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relloc::discriminator::{Truth, DEFAULT_EXPERIMENTS, DEFAULT_RUNS};
use relloc::momentum::{DEFAULT_P_MAX, DEFAULT_P_POINTS};
use relloc::spectra::BlackbodyWeighting;
use relloc::wave1d::DEFAULT_GRID_1D;
use relloc::wave3d::DEFAULT_GRID_3D;

use crate::config::{
    DiscriminateConfig, MomentumConfig, RunConfig, Simulate1dConfig, Simulate3dConfig, SourceSpec,
    SpectrumConfig, TofParameters,
};
use crate::tof::{DEFAULT_DETECTOR_LENGTH, DEFAULT_FLIGHT_TIME, DEFAULT_MASS_U, DEFAULT_WAVELENGTH};

pub const OUT_DIR_ENV: &str = "RELLOC_OUT_DIR";

const FILES_HELP: &str = "\
Output files (comma-separated, preceded by '#' lines naming the command, the
full config and the column units):
  simulate1d    position_density.csv  x, density
                momentum_density.csv  p, q_induced, q_prelocalised
                events.csv            photon, kind, theta, wavelength
  simulate3d    marginals.csv         coordinate, marginal_x, marginal_y, marginal_z
                cloud.csv             x, y, z
                events.csv            photon, kind, theta, phi, wavelength
  discriminate  posterior.csv         run, p_nl_dp<δp> for each δp
                posterior_stderr.csv  run, p_nl_dp<δp> standard errors
Every command also writes run.json, which `relloc replay` re-executes.
Positions are in units of the reference wavelength λ, momenta in h/λ.

Exit status: 0 success, 1 invalid input, 2 runtime failure.";

#[derive(Debug, Parser)]
#[command(name = "relloc", version, about = "Simulate photon-induced relative localisation of two particles", after_help = FILES_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Localise a 1D relative wavefunction and report its position and momentum densities.
    Simulate1d(Simulate1dArgs),
    /// Localise a 3D relative wavefunction and export marginals and a point cloud.
    Simulate3d(Simulate3dArgs),
    /// Run the Bayesian test between induced and pre-existing localisation.
    Discriminate(DiscriminateArgs),
    /// Detector resolution needed for a momentum resolution under time of flight.
    Tof(TofArgs),
    /// Re-execute a run record and check that it reproduces its results.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Energy,
    PhotonNumber,
}

impl From<WeightingArg> for BlackbodyWeighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Energy => BlackbodyWeighting::Energy,
            WeightingArg::PhotonNumber => BlackbodyWeighting::PhotonNumber,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TruthArg {
    Delocalised,
    Localised,
}

impl From<TruthArg> for Truth {
    fn from(t: TruthArg) -> Self {
        match t {
            TruthArg::Delocalised => Truth::Delocalised,
            TruthArg::Localised => Truth::Localised,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Random seed; drawn from the OS and recorded in run.json when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "relloc-out")]
    pub out_dir: PathBuf,
    /// Grid points per axis [default: 2048 in 1D, 64 in 3D].
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 150)]
    pub photons: usize,
    /// Half-width d of the relative-position box, in λ.
    #[arg(long = "d", default_value_t = 1.0, allow_negative_numbers = true)]
    pub half_width: f64,
    /// `mono:<wavelength in λ>` or `blackbody:<temperature in K>`.
    #[arg(long, default_value = "mono:1")]
    pub source: SourceSpec,
    /// Physical length of λ in metres; sets the scale for blackbody sources.
    #[arg(long, default_value_t = 1e-6)]
    pub reference_wavelength: f64,
    #[arg(long, value_enum, default_value_t = WeightingArg::Energy)]
    pub weighting: WeightingArg,
    /// Fraction of the blackbody spectrum kept when truncating it.
    #[arg(long, default_value_t = 0.999)]
    pub coverage: f64,
    #[arg(long, default_value_t = DEFAULT_P_MAX, allow_negative_numbers = true)]
    pub p_max: f64,
    #[arg(long, default_value_t = DEFAULT_P_POINTS)]
    pub p_bins: usize,
}

impl CommonArgs {
    fn spectrum(&self) -> SpectrumConfig {
        SpectrumConfig {
            source: self.source,
            reference_wavelength: self.reference_wavelength,
            weighting: self.weighting.into(),
            coverage: self.coverage,
        }
    }

    fn momentum(&self) -> MomentumConfig {
        MomentumConfig {
            p_max: self.p_max,
            p_bins: self.p_bins,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Simulate1dArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Simulate3dArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Points drawn from the final density for cloud.csv.
    #[arg(long, default_value_t = 20_000)]
    pub cloud_samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct DiscriminateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    pub runs: usize,
    #[arg(long, default_value_t = DEFAULT_EXPERIMENTS)]
    pub experiments: usize,
    /// Momentum resolutions δp in h/λ; 0 means perfect resolution.
    #[arg(long = "dp", value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0], allow_negative_numbers = true)]
    pub resolutions: Vec<f64>,
    #[arg(long, value_enum, default_value_t = TruthArg::Delocalised)]
    pub truth: TruthArg,
}

#[derive(Debug, Clone, Args)]
pub struct TofArgs {
    #[arg(long, env = OUT_DIR_ENV, default_value = "relloc-out")]
    pub out_dir: PathBuf,
    /// Particle mass in atomic mass units.
    #[arg(long, default_value_t = DEFAULT_MASS_U, allow_negative_numbers = true)]
    pub mass: f64,
    /// Photon wavelength in metres.
    #[arg(long, default_value_t = DEFAULT_WAVELENGTH, allow_negative_numbers = true)]
    pub wavelength: f64,
    /// Flight time in seconds.
    #[arg(long, default_value_t = DEFAULT_FLIGHT_TIME, allow_negative_numbers = true)]
    pub flight_time: f64,
    /// Detector length in metres.
    #[arg(long, default_value_t = DEFAULT_DETECTOR_LENGTH, allow_negative_numbers = true)]
    pub detector_length: f64,
    /// Momentum resolution δp in h/λ.
    #[arg(long = "dp", default_value_t = 0.5, allow_negative_numbers = true)]
    pub resolution: f64,
    #[arg(long, default_value_t = DEFAULT_P_MAX, allow_negative_numbers = true)]
    pub p_max: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// A run.json written by an earlier command.
    pub record: PathBuf,
    /// Where to write the regenerated files.
    #[arg(long, env = OUT_DIR_ENV, default_value = "relloc-out")]
    pub out_dir: PathBuf,
}

impl Command {
    /// The run configuration with the seed fixed, plus the output directory.
    /// `None` for `replay`, which takes its config from the record.
    pub fn to_config(&self, entropy_seed: impl FnOnce() -> u64) -> Option<(RunConfig, PathBuf)> {
        Some(match self {
            Command::Simulate1d(a) => {
                let c = &a.common;
                (
                    RunConfig::Simulate1d(Simulate1dConfig {
                        seed: c.seed.unwrap_or_else(entropy_seed),
                        grid: c.grid.unwrap_or(DEFAULT_GRID_1D),
                        photons: c.photons,
                        half_width: c.half_width,
                        spectrum: c.spectrum(),
                        momentum: c.momentum(),
                    }),
                    c.out_dir.clone(),
                )
            }
            Command::Simulate3d(a) => {
                let c = &a.common;
                (
                    RunConfig::Simulate3d(Simulate3dConfig {
                        seed: c.seed.unwrap_or_else(entropy_seed),
                        grid: c.grid.unwrap_or(DEFAULT_GRID_3D),
                        photons: c.photons,
                        half_width: c.half_width,
                        spectrum: c.spectrum(),
                        cloud_samples: a.cloud_samples,
                    }),
                    c.out_dir.clone(),
                )
            }
            Command::Discriminate(a) => {
                let c = &a.common;
                (
                    RunConfig::Discriminate(DiscriminateConfig {
                        seed: c.seed.unwrap_or_else(entropy_seed),
                        grid: c.grid.unwrap_or(DEFAULT_GRID_1D),
                        photons: c.photons,
                        half_width: c.half_width,
                        spectrum: c.spectrum(),
                        momentum: c.momentum(),
                        runs: a.runs,
                        experiments: a.experiments,
                        resolutions: a.resolutions.clone(),
                        truth: a.truth.into(),
                    }),
                    c.out_dir.clone(),
                )
            }
            Command::Tof(a) => (
                RunConfig::Tof(TofParameters {
                    mass_u: a.mass,
                    wavelength: a.wavelength,
                    flight_time: a.flight_time,
                    detector_length: a.detector_length,
                    resolution: a.resolution,
                    p_max: a.p_max,
                }),
                a.out_dir.clone(),
            ),
            Command::Replay(_) => return None,
        })
    }
}
