//! Converts a relative-momentum resolution into the spatial resolution a
//! time-of-flight detector needs.

use relloc::spectra::PLANCK;
use serde::{Deserialize, Serialize};

use crate::config::TofParameters;
use crate::error::CliError;

/// Kilograms per unified atomic mass unit.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

pub const DEFAULT_MASS_U: f64 = 87.0;
pub const DEFAULT_WAVELENGTH: f64 = 400e-9;
pub const DEFAULT_FLIGHT_TIME: f64 = 5e-3;
pub const DEFAULT_DETECTOR_LENGTH: f64 = 10e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TofReport {
    /// Separation after the flight of two momenta `resolution` h/λ apart.
    pub spatial_resolution: f64,
    /// Displacement per h/λ of momentum.
    pub displacement_per_unit: f64,
    /// Width on the detector of the momentum window [−p_max, p_max].
    pub window_span: f64,
    pub fits_detector: bool,
}

impl TofParameters {
    pub fn validate(&self) -> Result<(), CliError> {
        let checks = [
            ("mass", self.mass_u, false),
            ("wavelength", self.wavelength, false),
            ("flight time", self.flight_time, true),
            ("detector length", self.detector_length, false),
            ("resolution", self.resolution, true),
            ("p_max", self.p_max, false),
        ];
        for (name, value, zero_ok) in checks {
            let ok = value.is_finite() && (value > 0.0 || (zero_ok && value == 0.0));
            if !ok {
                return Err(CliError::Invalid(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

/// Δx = δp (h/λ) t / m.
pub fn tof_resolution(params: &TofParameters) -> Result<TofReport, CliError> {
    params.validate()?;
    let mass = params.mass_u * ATOMIC_MASS_UNIT;
    let per_unit = PLANCK / params.wavelength * params.flight_time / mass;
    let window_span = 2.0 * params.p_max * per_unit;
    Ok(TofReport {
        spatial_resolution: params.resolution * per_unit,
        displacement_per_unit: per_unit,
        window_span,
        fits_detector: window_span <= params.detector_length,
    })
}
