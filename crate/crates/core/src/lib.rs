//! Measurement-induced relative-position localisation of two particles under
//! photon scattering, and the Bayesian momentum-space test that tells induced
//! localisation apart from pre-existing localisation.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the crate-root
//! aliases fix the scalar to `f64`.

pub mod analysis;
pub mod cdf;
pub mod discriminator;
pub mod error;
pub mod grid;
pub mod momentum;
pub mod rng;
pub mod scalar;
pub mod spectra;
pub mod wave1d;
pub mod wave3d;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Wavefunction1D = wave1d::RelativeWavefunction1D<f64>;
pub type Outcome1D = wave1d::ScatterOutcome1D<f64>;
pub type Source = spectra::SpectralSource<f64>;
pub type Momenta = momentum::MomentumGrid<f64>;
pub type Density = momentum::MomentumDensity<f64>;
pub type Wavefunction3D = wave3d::RelativeWavefunction3D<f64>;
pub type Outcome3D = wave3d::ScatterOutcome3D<f64>;
pub type Hypotheses = discriminator::HypothesisDensities<f64>;
pub type Trace = discriminator::PosteriorTrace<f64>;
pub type Experiment = discriminator::ExperimentConfig<f64>;
