//! Photon wavelength sources: monochromatic light or a truncated blackbody.
//!
//! Blackbody wavelengths are tabulated in metres and handed to the
//! simulators in units of a run-level reference wavelength.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cdf::TabulatedCdf;
use crate::error::{Error, Result};
use crate::rng::uniform;
use crate::scalar::Real;

/// Planck constant (J s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Second radiation constant hc/k (m K).
pub const SECOND_RADIATION: f64 = PLANCK * SPEED_OF_LIGHT / BOLTZMANN;
/// Wien displacement constant (m K).
pub const WIEN: f64 = 2.897_771_955e-3;

/// Number of nodes in a blackbody CDF table.
pub const BLACKBODY_TABLE_POINTS: usize = 4096;

/// Which spectral density the blackbody draw follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlackbodyWeighting {
    /// Spectral energy density u_λ ∝ λ⁻⁵ / (exp(hc/λkT) − 1).
    #[default]
    Energy,
    /// Photon number density, u_λ · λ / hc ∝ λ⁻⁴ / (exp(hc/λkT) − 1).
    PhotonNumber,
}

impl BlackbodyWeighting {
    /// Power of s = hc/(λkT) in the density written over s.
    fn s_power(self) -> i32 {
        match self {
            BlackbodyWeighting::Energy => 3,
            BlackbodyWeighting::PhotonNumber => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blackbody<T> {
    temperature: T,
    reference_wavelength: T,
    weighting: BlackbodyWeighting,
    table: TabulatedCdf<T>,
}

impl<T: Real> Blackbody<T> {
    pub fn temperature(&self) -> T {
        self.temperature
    }

    /// Shortest tabulated wavelength, metres.
    pub fn lambda_min(&self) -> T {
        self.table.nodes()[0]
    }

    /// Longest tabulated wavelength, metres.
    pub fn lambda_max(&self) -> T {
        *self.table.nodes().last().unwrap()
    }

    pub fn reference_wavelength(&self) -> T {
        self.reference_wavelength
    }

    pub fn weighting(&self) -> BlackbodyWeighting {
        self.weighting
    }

    pub fn cdf(&self) -> &TabulatedCdf<T> {
        &self.table
    }

    /// Wavelength in metres for a uniform input; monotone in `u`.
    pub fn wavelength_for(&self, u: T) -> T {
        self.table.invert(u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralSource<T> {
    /// Fixed wavelength in reference units.
    Monochromatic(T),
    Blackbody(Blackbody<T>),
}

impl<T: Real> SpectralSource<T> {
    pub fn monochromatic(wavelength: T) -> Result<Self> {
        if !(wavelength > T::zero()) || !wavelength.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(SpectralSource::Monochromatic(wavelength))
    }

    /// Blackbody at `temperature` kelvin, truncated to the central band that
    /// holds `coverage` of the untruncated spectral mass. Draws are reported
    /// in units of `reference_wavelength` (metres).
    pub fn blackbody(
        temperature: T,
        coverage: T,
        reference_wavelength: T,
        weighting: BlackbodyWeighting,
    ) -> Result<Self> {
        build_blackbody(temperature, coverage, reference_wavelength, weighting)
            .map(SpectralSource::Blackbody)
    }

    /// Wavelength for the next photon, in reference units.
    pub fn draw_wavelength<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            SpectralSource::Monochromatic(w) => *w,
            SpectralSource::Blackbody(bb) => {
                bb.wavelength_for(uniform(rng)) / bb.reference_wavelength
            }
        }
    }

    /// The wavelength if the source is monochromatic.
    pub fn fixed_wavelength(&self) -> Option<T> {
        match self {
            SpectralSource::Monochromatic(w) => Some(*w),
            SpectralSource::Blackbody(_) => None,
        }
    }
}

/// Tabulates a truncated Planck spectrum.
pub fn build_blackbody<T: Real>(
    temperature: T,
    coverage: T,
    reference_wavelength: T,
    weighting: BlackbodyWeighting,
) -> Result<Blackbody<T>> {
    if !(temperature > T::zero()) || !temperature.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if !(coverage > T::zero() && coverage < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "coverage must lie in (0, 1), got {coverage}"
        )));
    }
    if !(reference_wavelength > T::zero()) || !reference_wavelength.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "reference wavelength must be positive, got {reference_wavelength}"
        )));
    }

    let power = weighting.s_power();
    let tail = 0.5 * (1.0 - coverage.as_f64());
    let (s_lo, s_hi) = central_band(power, tail);
    let t = temperature.as_f64();
    let lambda_min = SECOND_RADIATION / (t * s_hi);
    let lambda_max = SECOND_RADIATION / (t * s_lo);

    let n = BLACKBODY_TABLE_POINTS;
    let step = (lambda_max - lambda_min) / (n - 1) as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = if i == n - 1 {
            lambda_max
        } else {
            lambda_min + step * i as f64
        };
        // Written over the dimensionless t = λT/c₂ to stay in range for f32.
        let scaled = lambda * t / SECOND_RADIATION;
        let value = scaled.powi(-(power + 2)) / (1.0 / scaled).exp_m1();
        nodes.push(T::lit(lambda));
        density.push(T::lit(value));
    }
    let table = TabulatedCdf::from_density(nodes, &density).ok_or_else(|| {
        Error::InvalidParameter("blackbody spectrum could not be tabulated".into())
    })?;
    Ok(Blackbody {
        temperature,
        reference_wavelength,
        weighting,
        table,
    })
}

/// Band [s_lo, s_hi] of s = hc/(λkT) leaving `tail` of the mass of
/// s^power / (eˢ − 1) on each side.
fn central_band(power: i32, tail: f64) -> (f64, f64) {
    const S_MAX: f64 = 100.0;
    const STEPS: usize = 400_000;
    let h = S_MAX / STEPS as f64;
    let f = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            s.powi(power) / s.exp_m1()
        }
    };
    let mut cumulative = Vec::with_capacity(STEPS + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for i in 0..STEPS {
        let a = i as f64 * h;
        // Simpson on each step.
        acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
        cumulative.push(acc);
    }
    let total = acc;
    let locate = |target: f64| {
        let i = cumulative.partition_point(|&c| c < target).clamp(1, STEPS);
        let (c0, c1) = (cumulative[i - 1], cumulative[i]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        (i as f64 - 1.0 + frac) * h
    };
    let s_lo = locate(tail * total).max(h);
    let s_hi = locate((1.0 - tail) * total);
    (s_lo, s_hi)
}
