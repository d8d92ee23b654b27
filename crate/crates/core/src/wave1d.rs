//! One-dimensional relative-position wavefunction under photon scattering.
//!
//! Positions are in units of the reference wavelength λ and the state is the
//! real amplitude c(x) sampled at cell centres of `[-d, d]`. A detected
//! photon either leaves the state as `c(x) cos(2πx sinθ / λ)` (scattered into
//! θ) or `c(x) A(x)` (not scattered), followed by renormalisation.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cdf::draw_cell;
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::rng::uniform;
use crate::scalar::Real;
use crate::spectra::SpectralSource;

pub const DEFAULT_GRID_1D: usize = 2048;
pub const DEFAULT_ANGLE_BINS_1D: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct RelativeWavefunction1D<T> {
    axis: Arc<Axis<T>>,
    amplitudes: Vec<T>,
}

impl<T: Real> RelativeWavefunction1D<T> {
    /// The delocalised state c(x) = 1/√(2d).
    pub fn flat(half_width: T, n: usize) -> Result<Self> {
        let axis = Arc::new(Axis::new(half_width, n)?);
        let value = (half_width + half_width).sqrt().recip();
        Ok(Self {
            amplitudes: vec![value; n],
            axis,
        })
    }

    /// Builds a state from arbitrary real amplitudes and normalises it.
    pub fn from_amplitudes(axis: Arc<Axis<T>>, amplitudes: Vec<T>) -> Result<Self> {
        if amplitudes.len() != axis.len() {
            return Err(Error::InvalidDimension(format!(
                "{} amplitudes for a {}-point axis",
                amplitudes.len(),
                axis.len()
            )));
        }
        let mut state = Self {
            axis,
            amplitudes: vec![T::zero(); amplitudes.len()],
        };
        state.replace_normalised(amplitudes)?;
        Ok(state)
    }

    /// Samples `f` at the grid points and normalises.
    pub fn from_fn(half_width: T, n: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let axis = Arc::new(Axis::new(half_width, n)?);
        let amplitudes = axis.points().iter().map(|&x| f(x)).collect();
        Self::from_amplitudes(axis, amplitudes)
    }

    pub fn axis(&self) -> &Arc<Axis<T>> {
        &self.axis
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn positions(&self) -> &[T] {
        self.axis.points()
    }

    pub fn spacing(&self) -> T {
        self.axis.spacing()
    }

    pub fn half_width(&self) -> T {
        self.axis.half_width()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// ∑ |c(x_j)|² Δx.
    pub fn norm_sq(&self) -> T {
        self.amplitudes.iter().map(|&c| c * c).sum::<T>() * self.spacing()
    }

    /// P(x_j) = |c(x_j)|².
    pub fn position_density(&self) -> Vec<T> {
        self.amplitudes.iter().map(|&c| c * c).collect()
    }

    /// Variance of the peak on one side of the origin.
    pub fn peak_variance(&self, side: Side) -> Result<T> {
        peak_variance(&self.position_density(), &self.axis, side)
    }

    /// Multiplies pointwise and renormalises; leaves the state untouched on error.
    pub fn apply_multiplier(&mut self, multiplier: &[T]) -> Result<()> {
        assert_eq!(multiplier.len(), self.len(), "multiplier length");
        let next = self
            .amplitudes
            .iter()
            .zip(multiplier)
            .map(|(&c, &m)| c * m)
            .collect();
        self.replace_normalised(next)
    }

    fn replace_normalised(&mut self, mut next: Vec<T>) -> Result<()> {
        let norm_sq = next.iter().map(|&c| c * c).sum::<T>() * self.spacing();
        if !(norm_sq >= T::collapse_floor()) || !norm_sq.is_finite() {
            return Err(Error::DegenerateCollapse {
                norm: norm_sq.as_f64(),
            });
        }
        let scale = norm_sq.sqrt().recip();
        for c in &mut next {
            *c *= scale;
        }
        self.amplitudes = next;
        Ok(())
    }
}

/// Outcome of one photon detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScatterOutcome1D<T> {
    NonScattered { wavelength: T },
    /// Scattered into `theta` ∈ [0, 2π).
    Scattered { theta: T, wavelength: T },
}

impl<T: Real> ScatterOutcome1D<T> {
    pub fn wavelength(&self) -> T {
        match *self {
            ScatterOutcome1D::NonScattered { wavelength }
            | ScatterOutcome1D::Scattered { wavelength, .. } => wavelength,
        }
    }

    pub fn is_scattered(&self) -> bool {
        matches!(self, ScatterOutcome1D::Scattered { .. })
    }
}

/// Seed and ordered events of a localisation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog<E> {
    seed: u64,
    events: Vec<E>,
}

impl<E> EventLog<E> {
    pub fn new(seed: u64, events: Vec<E>) -> Self {
        Self { seed, events }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn events(&self) -> &[E] {
        &self.events
    }

    pub fn photon_count(&self) -> usize {
        self.events.len()
    }

    pub fn into_events(self) -> Vec<E> {
        self.events
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

/// Midpoint angle grid over [0, 2π). Only the first quadrant is stored: the
/// integrands depend on θ through sin²-type even functions of sin θ, which
/// take the same value on the four mirror images of each midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid1D<T> {
    bins: usize,
    step: T,
    sin_quarter: Vec<T>,
}

impl<T: Real> AngleGrid1D<T> {
    pub fn new(bins: usize) -> Result<Self> {
        if bins < 4 || bins % 4 != 0 {
            return Err(Error::InvalidDimension(format!(
                "angle bins must be a positive multiple of 4, got {bins}"
            )));
        }
        let step = T::TAU() / T::from_usize_lossy(bins);
        let half = T::lit(0.5);
        let sin_quarter = (0..bins / 4)
            .map(|m| ((T::from_usize_lossy(m) + half) * step).sin())
            .collect();
        Ok(Self {
            bins,
            step,
            sin_quarter,
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// A²(x) by the midpoint rule over the full circle.
    pub fn nonscatter_sq(&self, x: T, wavelength: T) -> T {
        let phase = T::TAU() * x / wavelength;
        let sum: T = self
            .sin_quarter
            .iter()
            .map(|&s| {
                let v = (phase * s).sin();
                v * v
            })
            .sum();
        sum / T::from_usize_lossy(self.sin_quarter.len())
    }
}

impl<T: Real> Default for AngleGrid1D<T> {
    fn default() -> Self {
        Self::new(DEFAULT_ANGLE_BINS_1D).expect("default angle grid")
    }
}

/// Nonscattering amplitude A(x) at every grid point for one wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct NonscatterTable1D<T> {
    axis: Arc<Axis<T>>,
    wavelength: T,
    amplitude_sq: Vec<T>,
    amplitude: Vec<T>,
}

impl<T: Real> NonscatterTable1D<T> {
    pub fn new(axis: Arc<Axis<T>>, wavelength: T, angles: &AngleGrid1D<T>) -> Self {
        let n = axis.len();
        let mut amplitude_sq = vec![T::zero(); n];
        for j in 0..axis.even_prefix() {
            let a2 = angles.nonscatter_sq(axis.points()[j], wavelength);
            amplitude_sq[j] = a2;
            amplitude_sq[axis.mirror(j)] = a2;
        }
        let amplitude = amplitude_sq.iter().map(|a| a.sqrt()).collect();
        Self {
            axis,
            wavelength,
            amplitude_sq,
            amplitude,
        }
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn amplitude_sq(&self) -> &[T] {
        &self.amplitude_sq
    }

    pub fn amplitude(&self) -> &[T] {
        &self.amplitude
    }

    fn matches(&self, axis: &Arc<Axis<T>>, wavelength: T) -> bool {
        self.wavelength == wavelength && (Arc::ptr_eq(&self.axis, axis) || *self.axis == **axis)
    }
}

/// Scattering model for the 1D state: angle quadrature plus a cached A(x) table.
///
/// Cloning shares the cached table, so a pre-warmed scatterer can be handed
/// to parallel workers.
#[derive(Debug, Clone)]
pub struct Scatterer1D<T> {
    angles: AngleGrid1D<T>,
    table: Option<Arc<NonscatterTable1D<T>>>,
}

impl<T: Real> Default for Scatterer1D<T> {
    fn default() -> Self {
        Self {
            angles: AngleGrid1D::default(),
            table: None,
        }
    }
}

impl<T: Real> Scatterer1D<T> {
    pub fn new(angle_bins: usize) -> Result<Self> {
        Ok(Self {
            angles: AngleGrid1D::new(angle_bins)?,
            table: None,
        })
    }

    pub fn angles(&self) -> &AngleGrid1D<T> {
        &self.angles
    }

    /// The A(x) table for `axis` at `wavelength`, computed on first use.
    pub fn nonscatter_table(
        &mut self,
        axis: &Arc<Axis<T>>,
        wavelength: T,
    ) -> Arc<NonscatterTable1D<T>> {
        match &self.table {
            Some(t) if t.matches(axis, wavelength) => t.clone(),
            _ => {
                let t = Arc::new(NonscatterTable1D::new(
                    axis.clone(),
                    wavelength,
                    &self.angles,
                ));
                self.table = Some(t.clone());
                t
            }
        }
    }

    /// P_S(θ) = (1/2π) ∫ |c(x)|² cos²(2πx sinθ / λ) dx.
    pub fn scatter_density(&self, state: &RelativeWavefunction1D<T>, theta: T, wavelength: T) -> T {
        let k = T::TAU() * theta.sin() / wavelength;
        let sum: T = state
            .amplitudes()
            .iter()
            .zip(state.positions())
            .map(|(&c, &x)| {
                let v = (k * x).cos();
                c * c * v * v
            })
            .sum();
        sum * state.spacing() / T::TAU()
    }

    /// P_NS = ∫ |c(x)|² A²(x) dx.
    pub fn nonscatter_probability(&mut self, state: &RelativeWavefunction1D<T>, wavelength: T) -> T {
        let table = self.nonscatter_table(state.axis(), wavelength);
        let sum: T = state
            .amplitudes()
            .iter()
            .zip(table.amplitude_sq())
            .map(|(&c, &a2)| c * c * a2)
            .sum();
        sum * state.spacing()
    }

    /// Draws the next detection outcome.
    ///
    /// The relative position is drawn from |c|², the photon is unscattered
    /// with probability A²(x) and otherwise scattered into an angle bin with
    /// weight cos²(2πx sinθ_m / λ), uniformly within the bin. Summed over
    /// positions this is the inverse-CDF draw from the discretised P_S(θ)
    /// and P_NS, at O(N + M) cost.
    pub fn sample_event<R: Rng + ?Sized>(
        &self,
        state: &RelativeWavefunction1D<T>,
        wavelength: T,
        rng: &mut R,
    ) -> ScatterOutcome1D<T> {
        let density = state.position_density();
        let (j, _) = draw_cell(&density, uniform(rng)).expect("normalised state has mass");
        let x = state.positions()[j];
        if uniform::<T, _>(rng) < self.angles.nonscatter_sq(x, wavelength) {
            return ScatterOutcome1D::NonScattered { wavelength };
        }
        let phase = T::TAU() * x / wavelength;
        let weights: Vec<T> = self
            .angles
            .sin_quarter
            .iter()
            .map(|&s| {
                let v = (phase * s).cos();
                v * v
            })
            .collect();
        let (m, offset) = draw_cell(&weights, uniform(rng))
            // cos² vanishes on every bin only if A² = 1, which cannot happen.
            .unwrap_or((0, T::zero()));
        let quadrant: T = uniform(rng);
        let inner = (T::from_usize_lossy(m) + offset) * self.angles.step;
        let pi = T::PI();
        let theta = if quadrant < T::lit(0.25) {
            inner
        } else if quadrant < T::lit(0.5) {
            pi - inner
        } else if quadrant < T::lit(0.75) {
            pi + inner
        } else {
            T::TAU() - inner
        };
        let theta = if theta >= T::TAU() { T::zero() } else { theta };
        ScatterOutcome1D::Scattered { theta, wavelength }
    }

    /// Collapses the state onto an observed outcome.
    pub fn apply_event(
        &mut self,
        state: &mut RelativeWavefunction1D<T>,
        event: &ScatterOutcome1D<T>,
    ) -> Result<()> {
        match *event {
            ScatterOutcome1D::NonScattered { wavelength } => {
                let table = self.nonscatter_table(state.axis(), wavelength);
                state.apply_multiplier(table.amplitude())
            }
            ScatterOutcome1D::Scattered { theta, wavelength } => {
                let k = T::TAU() * theta.sin() / wavelength;
                let axis = state.axis().clone();
                let mut multiplier = vec![T::zero(); axis.len()];
                for j in 0..axis.even_prefix() {
                    let m = (k * axis.points()[j]).cos();
                    multiplier[j] = m;
                    multiplier[axis.mirror(j)] = m;
                }
                state.apply_multiplier(&multiplier)
            }
        }
    }

    /// Detects `photons` photons, each with a fresh wavelength from `source`.
    pub fn run_localisation<R: Rng + ?Sized>(
        &mut self,
        state: &mut RelativeWavefunction1D<T>,
        photons: usize,
        source: &SpectralSource<T>,
        rng: &mut R,
    ) -> Result<Vec<ScatterOutcome1D<T>>> {
        let mut events = Vec::with_capacity(photons);
        for _ in 0..photons {
            let wavelength = source.draw_wavelength(rng);
            let event = self.sample_event(state, wavelength, rng);
            self.apply_event(state, &event)?;
            events.push(event);
        }
        Ok(events)
    }
}

pub fn flat_state<T: Real>(half_width: T, n: usize) -> Result<RelativeWavefunction1D<T>> {
    RelativeWavefunction1D::flat(half_width, n)
}

/// A(x) with the default angle quadrature.
pub fn nonscatter_amplitude<T: Real>(x: T, wavelength: T) -> T {
    AngleGrid1D::default().nonscatter_sq(x, wavelength).sqrt()
}

pub fn scatter_density<T: Real>(state: &RelativeWavefunction1D<T>, theta: T, wavelength: T) -> T {
    Scatterer1D::default().scatter_density(state, theta, wavelength)
}

pub fn nonscatter_probability<T: Real>(state: &RelativeWavefunction1D<T>, wavelength: T) -> T {
    Scatterer1D::default().nonscatter_probability(state, wavelength)
}

pub fn sample_event<T: Real, R: Rng + ?Sized>(
    state: &RelativeWavefunction1D<T>,
    wavelength: T,
    rng: &mut R,
) -> ScatterOutcome1D<T> {
    Scatterer1D::default().sample_event(state, wavelength, rng)
}

pub fn apply_event<T: Real>(
    state: &RelativeWavefunction1D<T>,
    event: &ScatterOutcome1D<T>,
) -> Result<RelativeWavefunction1D<T>> {
    let mut next = state.clone();
    Scatterer1D::default().apply_event(&mut next, event)?;
    Ok(next)
}

pub fn run_localisation<T: Real, R: Rng + ?Sized>(
    state: &RelativeWavefunction1D<T>,
    photons: usize,
    source: &SpectralSource<T>,
    rng: &mut R,
) -> Result<(RelativeWavefunction1D<T>, Vec<ScatterOutcome1D<T>>)> {
    let mut next = state.clone();
    let events = Scatterer1D::default().run_localisation(&mut next, photons, source, rng)?;
    Ok((next, events))
}

/// Variance of x within one half-space, after renormalising that half.
pub fn peak_variance<T: Real>(density: &[T], axis: &Axis<T>, side: Side) -> Result<T> {
    assert_eq!(density.len(), axis.len(), "density length");
    let keep = |x: T| match side {
        Side::Left => x < T::zero(),
        Side::Right => x > T::zero(),
    };
    let (mut mass, mut first) = (T::zero(), T::zero());
    for (&p, &x) in density.iter().zip(axis.points()) {
        if keep(x) {
            mass += p;
            first += p * x;
        }
    }
    if !(mass * axis.spacing() >= T::lit(1e-12)) {
        return Err(Error::EmptyHalf {
            mass: (mass * axis.spacing()).as_f64(),
        });
    }
    let mean = first / mass;
    let second: T = density
        .iter()
        .zip(axis.points())
        .filter(|(_, &x)| keep(x))
        .map(|(&p, &x)| p * (x - mean) * (x - mean))
        .sum();
    Ok(second / mass)
}
