//! Serializable run configurations. A config plus its seed fully determines
//! every number a command produces.

use std::fmt;
use std::str::FromStr;

use relloc::discriminator::Truth;
use relloc::spectra::{BlackbodyWeighting, SpectralSource};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Photon spectrum as given on the command line: `mono:<λ>` with λ in
/// reference units, or `blackbody:<T>` with T in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceSpec {
    Mono { wavelength: f64 },
    Blackbody { temperature: f64 },
}

impl FromStr for SourceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| format!("expected mono:<wavelength> or blackbody:<kelvin>, got {s:?}"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("{value:?} is not a number"))?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "mono" | "monochromatic" => Ok(SourceSpec::Mono { wavelength: value }),
            "blackbody" | "bb" => Ok(SourceSpec::Blackbody { temperature: value }),
            other => Err(format!("unknown source kind {other:?}")),
        }
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Mono { wavelength } => write!(f, "mono:{wavelength}"),
            SourceSpec::Blackbody { temperature } => write!(f, "blackbody:{temperature}"),
        }
    }
}

/// Spectrum settings shared by every simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub source: SourceSpec,
    /// Physical length of one simulation length unit, in metres.
    pub reference_wavelength: f64,
    pub weighting: BlackbodyWeighting,
    /// Fraction of the untruncated blackbody mass kept in the table.
    pub coverage: f64,
}

impl SpectrumConfig {
    pub fn build(&self) -> Result<SpectralSource<f64>, CliError> {
        Ok(match self.source {
            SourceSpec::Mono { wavelength } => SpectralSource::monochromatic(wavelength)?,
            SourceSpec::Blackbody { temperature } => SpectralSource::blackbody(
                temperature,
                self.coverage,
                self.reference_wavelength,
                self.weighting,
            )?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumConfig {
    pub p_max: f64,
    pub p_bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulate1dConfig {
    pub seed: u64,
    pub grid: usize,
    pub photons: usize,
    pub half_width: f64,
    pub spectrum: SpectrumConfig,
    pub momentum: MomentumConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulate3dConfig {
    pub seed: u64,
    pub grid: usize,
    pub photons: usize,
    pub half_width: f64,
    pub spectrum: SpectrumConfig,
    pub cloud_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminateConfig {
    pub seed: u64,
    pub grid: usize,
    pub photons: usize,
    pub half_width: f64,
    pub spectrum: SpectrumConfig,
    pub momentum: MomentumConfig,
    pub runs: usize,
    pub experiments: usize,
    pub resolutions: Vec<f64>,
    pub truth: Truth,
}

/// Time-of-flight apparatus, in SI units except where noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TofParameters {
    /// Atomic mass units.
    pub mass_u: f64,
    pub wavelength: f64,
    pub flight_time: f64,
    pub detector_length: f64,
    /// Momentum resolution in units of h/λ.
    pub resolution: f64,
    /// Half-width of the momentum window to fit on the detector, in h/λ.
    pub p_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Simulate1d(Simulate1dConfig),
    Simulate3d(Simulate3dConfig),
    Discriminate(DiscriminateConfig),
    Tof(TofParameters),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Simulate1d(_) => "simulate1d",
            RunConfig::Simulate3d(_) => "simulate3d",
            RunConfig::Discriminate(_) => "discriminate",
            RunConfig::Tof(_) => "tof",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            RunConfig::Simulate1d(c) => Some(c.seed),
            RunConfig::Simulate3d(c) => Some(c.seed),
            RunConfig::Discriminate(c) => Some(c.seed),
            RunConfig::Tof(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_specs_round_trip() {
        for text in ["mono:1", "mono:0.75", "blackbody:3000"] {
            let spec: SourceSpec = text.parse().unwrap();
            assert_eq!(spec.to_string().parse::<SourceSpec>().unwrap(), spec);
        }
        assert_eq!(
            "BB:2500".parse::<SourceSpec>().unwrap(),
            SourceSpec::Blackbody { temperature: 2500.0 }
        );
        assert!("laser:1".parse::<SourceSpec>().is_err());
        assert!("mono".parse::<SourceSpec>().is_err());
        assert!("mono:x".parse::<SourceSpec>().is_err());
    }
}
