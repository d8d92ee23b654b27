//! Sequential Bayesian test between measurement-induced localisation and
//! localisation that existed before the photons arrived.
//!
//! Under induced localisation the released pair has relative-momentum
//! density Q₁, the transform of the whole post-scattering state. Under
//! pre-existing localisation the pair sat in one of the two mirror peaks, and
//! either peak gives the same density Q₂, taken here from the x > 0 half.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::momentum::{split_amplitudes, MomentumDensity, MomentumGrid};
use crate::rng::{seeded, stream, uniform};
use crate::scalar::Real;
use crate::spectra::SpectralSource;
use crate::wave1d::{RelativeWavefunction1D, Scatterer1D};

pub const DEFAULT_RUNS: usize = 20;
pub const DEFAULT_EXPERIMENTS: usize = 300;
pub const DEFAULT_RESOLUTIONS: [f64; 3] = [0.25, 0.5, 1.0];
pub const PRIOR: f64 = 0.5;

const EMPTY_HALF_MASS: f64 = 1e-12;
const LIKELIHOOD_FLOOR: f64 = 1e-300;
const KERNEL_REACH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truth {
    /// The pair was delocalised and the photons induced the localisation.
    Delocalised,
    /// The pair was already in one of the two peaks.
    Localised,
}

impl std::str::FromStr for Truth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "delocalised" | "delocalized" => Ok(Truth::Delocalised),
            "localised" | "localized" => Ok(Truth::Localised),
            other => Err(Error::InvalidParameter(format!("unknown truth {other:?}"))),
        }
    }
}

/// Q₁ and Q₂ on a shared momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisDensities<T> {
    q1: MomentumDensity<T>,
    q2: MomentumDensity<T>,
}

impl<T: Real> HypothesisDensities<T> {
    pub fn new(q1: MomentumDensity<T>, q2: MomentumDensity<T>) -> Result<Self> {
        if q1.grid() != q2.grid() {
            return Err(Error::InvalidGrid("hypotheses must share a momentum grid".into()));
        }
        Ok(Self { q1, q2 })
    }

    pub fn q1(&self) -> &MomentumDensity<T> {
        &self.q1
    }

    pub fn q2(&self) -> &MomentumDensity<T> {
        &self.q2
    }

    pub fn grid(&self) -> &MomentumGrid<T> {
        self.q1.grid()
    }

    /// Density the true momentum is drawn from.
    pub fn for_truth(&self, truth: Truth) -> &MomentumDensity<T> {
        match truth {
            Truth::Delocalised => &self.q1,
            Truth::Localised => &self.q2,
        }
    }

    /// ∫ |Q₁ − Q₂| dp.
    pub fn separation(&self) -> T {
        self.q1.l1_distance(&self.q2)
    }

    pub fn convolved(&self, resolution: T) -> Result<Self> {
        Ok(Self {
            q1: convolve_resolution(&self.q1, resolution)?,
            q2: convolve_resolution(&self.q2, resolution)?,
        })
    }
}

/// Q₁ from the whole state, Q₂ from its x > 0 half.
pub fn build_hypotheses<T: Real>(
    state: &RelativeWavefunction1D<T>,
    grid: &MomentumGrid<T>,
) -> Result<HypothesisDensities<T>> {
    let right_mass = state
        .positions()
        .iter()
        .zip(state.amplitudes())
        .filter(|(&x, _)| x > T::zero())
        .map(|(_, &c)| c * c)
        .sum::<T>()
        * state.spacing();
    if !(right_mass.as_f64() >= EMPTY_HALF_MASS) {
        return Err(Error::EmptyHalf {
            mass: right_mass.as_f64(),
        });
    }
    let split = split_amplitudes(state, grid);
    let q1 = split.total().iter().map(|a| a.norm_sqr()).collect();
    let q2 = split.right.iter().map(|a| a.norm_sqr()).collect();
    Ok(HypothesisDensities {
        q1: MomentumDensity::new(grid.clone(), q1)?,
        q2: MomentumDensity::new(grid.clone(), q2)?,
    })
}

/// Blurs `density` with a Gaussian of standard deviation `resolution`,
/// truncated at six standard deviations, with zero padding beyond the grid.
pub fn convolve_resolution<T: Real>(
    density: &MomentumDensity<T>,
    resolution: T,
) -> Result<MomentumDensity<T>> {
    if !(resolution >= T::zero()) || !resolution.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "resolution must be finite and non-negative, got {resolution}"
        )));
    }
    let step = density.grid().step();
    let reach = (T::lit(KERNEL_REACH) * resolution / step)
        .floor()
        .to_usize()
        .unwrap_or(0);
    if reach == 0 {
        return Ok(density.clone());
    }
    let half = T::lit(-0.5);
    let kernel: Vec<T> = (0..=reach)
        .map(|k| {
            let u = T::from_usize_lossy(k) * step / resolution;
            (half * u * u).exp()
        })
        .collect();
    let values = density.values();
    let n = values.len();
    let blurred = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(reach);
            let hi = (i + reach).min(n - 1);
            (lo..=hi)
                .map(|j| values[j] * kernel[i.abs_diff(j)])
                .sum::<T>()
        })
        .collect();
    MomentumDensity::new(density.grid().clone(), blurred)
}

/// One application of Bayes' rule with likelihoods Q₁(p) and Q₂(p). Priors
/// of exactly 0 or 1 are returned unchanged.
pub fn bayes_update<T: Real>(
    prior_nl: T,
    momentum: T,
    hypotheses: &HypothesisDensities<T>,
) -> Result<T> {
    if !(prior_nl >= T::zero() && prior_nl <= T::one()) {
        return Err(Error::InvalidParameter(format!("prior {prior_nl} is not a probability")));
    }
    if prior_nl == T::zero() || prior_nl == T::one() {
        return Ok(prior_nl);
    }
    let outside = || Error::ZeroLikelihood {
        momentum: momentum.as_f64(),
    };
    let q1 = hypotheses.q1.at(momentum).ok_or_else(outside)?;
    let q2 = hypotheses.q2.at(momentum).ok_or_else(outside)?;
    let floor = T::lit(LIKELIHOOD_FLOOR);
    if q1 < floor && q2 < floor {
        return Err(outside());
    }
    let a = q1 * prior_nl;
    let b = q2 * (T::one() - prior_nl);
    Ok((a / (a + b)).max(T::zero()).min(T::one()))
}

/// Posterior probability of induced localisation after each run of one
/// experiment. Entry 0 is the prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorTrace<T> {
    truth: Truth,
    resolution: T,
    p_nl: Vec<T>,
    measurements: Vec<T>,
}

impl<T: Real> PosteriorTrace<T> {
    fn start(truth: Truth, resolution: T, prior: T, runs: usize) -> Self {
        let mut p_nl = Vec::with_capacity(runs + 1);
        p_nl.push(prior);
        Self {
            truth,
            resolution,
            p_nl,
            measurements: Vec::with_capacity(runs),
        }
    }

    pub fn truth(&self) -> Truth {
        self.truth
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn runs(&self) -> usize {
        self.measurements.len()
    }

    /// P_nl after each run, starting with the prior.
    pub fn p_nl(&self) -> &[T] {
        &self.p_nl
    }

    pub fn p_l(&self) -> Vec<T> {
        self.p_nl.iter().map(|&p| T::one() - p).collect()
    }

    /// Measured relative momentum of each run.
    pub fn measurements(&self) -> &[T] {
        &self.measurements
    }

    pub fn final_p_nl(&self) -> T {
        *self.p_nl.last().expect("trace holds the prior")
    }
}

/// Everything about an experiment except the truth and the resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T> {
    pub half_width: T,
    pub grid_points: usize,
    pub photons: usize,
    pub runs: usize,
    pub momenta: MomentumGrid<T>,
    pub prior: T,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        if !(self.prior >= T::zero() && self.prior <= T::one()) {
            return Err(Error::InvalidParameter(format!("prior {} is not a probability", self.prior)));
        }
        Ok(())
    }
}

/// One experiment with the given truth, evaluated at every resolution in
/// `resolutions`. All resolutions share the localisation runs, true momenta
/// and noise draws, so their traces differ only through the resolution.
///
/// A noisy measurement that falls outside the momentum grid is redrawn.
pub fn simulate_sweep<T: Real, R: Rng + ?Sized>(
    truth: Truth,
    config: &ExperimentConfig<T>,
    resolutions: &[T],
    source: &SpectralSource<T>,
    rng: &mut R,
) -> Result<Vec<PosteriorTrace<T>>> {
    config.validate()?;
    for &r in resolutions {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("resolution {r} must be non-negative")));
        }
    }
    let mut traces: Vec<_> = resolutions
        .iter()
        .map(|&r| PosteriorTrace::start(truth, r, config.prior, config.runs))
        .collect();
    let (p_lo, p_hi) = (config.momenta.points()[0], config.momenta.p_max());
    let mut scatterer = Scatterer1D::default();
    for _ in 0..config.runs {
        let mut state = RelativeWavefunction1D::flat(config.half_width, config.grid_points)?;
        scatterer.run_localisation(&mut state, config.photons, source, rng)?;
        let hypotheses = build_hypotheses(&state, &config.momenta)?;
        let true_p = hypotheses.for_truth(truth).sampler().sample(uniform(rng));
        let noise_seed = rng.next_u64();
        for trace in &mut traces {
            let resolution = trace.resolution;
            let (measured, likelihoods) = if resolution > T::zero() {
                let mut noise = seeded(noise_seed);
                let measured = loop {
                    let z: f64 = noise.sample(StandardNormal);
                    let p = true_p + resolution * T::lit(z);
                    if p >= p_lo && p <= p_hi {
                        break p;
                    }
                };
                (measured, hypotheses.convolved(resolution)?)
            } else {
                (true_p, hypotheses.clone())
            };
            let prior = trace.final_p_nl();
            trace.p_nl.push(bayes_update(prior, measured, &likelihoods)?);
            trace.measurements.push(measured);
        }
    }
    Ok(traces)
}

pub fn simulate_experiment<T: Real, R: Rng + ?Sized>(
    truth: Truth,
    config: &ExperimentConfig<T>,
    resolution: T,
    source: &SpectralSource<T>,
    rng: &mut R,
) -> Result<PosteriorTrace<T>> {
    let mut traces = simulate_sweep(truth, config, &[resolution], source, rng)?;
    Ok(traces.remove(0))
}

/// Mean posterior over many experiments at one resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedPosterior<T> {
    pub truth: Truth,
    pub resolution: T,
    pub experiments: usize,
    /// Mean P_nl after each run, starting with the prior.
    pub mean_p_nl: Vec<T>,
    /// Standard error of each mean.
    pub std_error: Vec<T>,
}

impl<T: Real> AveragedPosterior<T> {
    pub fn final_mean(&self) -> T {
        *self.mean_p_nl.last().expect("curve holds the prior")
    }

    pub fn final_std_error(&self) -> T {
        *self.std_error.last().expect("curve holds the prior")
    }

    /// Mean posterior of the hypothesis that is actually true.
    pub fn final_confidence(&self) -> T {
        match self.truth {
            Truth::Delocalised => self.final_mean(),
            Truth::Localised => T::one() - self.final_mean(),
        }
    }
}

/// Runs `experiments` sweeps in parallel. Experiment `e` draws from stream
/// `e` of `seed`, so the result does not depend on thread scheduling.
pub fn average_sweep<T: Real>(
    truth: Truth,
    experiments: usize,
    config: &ExperimentConfig<T>,
    resolutions: &[T],
    source: &SpectralSource<T>,
    seed: u64,
) -> Result<Vec<AveragedPosterior<T>>> {
    if experiments == 0 {
        return Err(Error::InvalidParameter("experiments must be at least 1".into()));
    }
    let all: Vec<Vec<PosteriorTrace<T>>> = (0..experiments as u64)
        .into_par_iter()
        .map(|e| simulate_sweep(truth, config, resolutions, source, &mut stream(seed, e)))
        .collect::<Result<_>>()?;
    Ok(average_traces(truth, resolutions, &all))
}

pub fn average_experiments<T: Real>(
    truth: Truth,
    experiments: usize,
    config: &ExperimentConfig<T>,
    resolution: T,
    source: &SpectralSource<T>,
    seed: u64,
) -> Result<AveragedPosterior<T>> {
    let mut curves = average_sweep(truth, experiments, config, &[resolution], source, seed)?;
    Ok(curves.remove(0))
}

fn average_traces<T: Real>(
    truth: Truth,
    resolutions: &[T],
    all: &[Vec<PosteriorTrace<T>>],
) -> Vec<AveragedPosterior<T>> {
    let count = T::from_usize_lossy(all.len());
    resolutions
        .iter()
        .enumerate()
        .map(|(slot, &resolution)| {
            let len = all[0][slot].p_nl.len();
            let (mut mean_p_nl, mut std_error) = (Vec::with_capacity(len), Vec::with_capacity(len));
            for k in 0..len {
                let column = all.iter().map(|t| t[slot].p_nl[k]);
                let mean = column.clone().sum::<T>() / count;
                let var = if all.len() > 1 {
                    column.map(|v| (v - mean) * (v - mean)).sum::<T>()
                        / (count - T::one())
                } else {
                    T::zero()
                };
                mean_p_nl.push(mean);
                std_error.push((var / count).sqrt());
            }
            AveragedPosterior {
                truth,
                resolution,
                experiments: all.len(),
                mean_p_nl,
                std_error,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn grid() -> MomentumGrid<f64> {
        MomentumGrid::new(8.0, 1025).unwrap()
    }

    fn flat_pair(grid: &MomentumGrid<f64>, q1: Vec<f64>, q2: Vec<f64>) -> HypothesisDensities<f64> {
        HypothesisDensities::new(
            MomentumDensity::new(grid.clone(), q1).unwrap(),
            MomentumDensity::new(grid.clone(), q2).unwrap(),
        )
        .unwrap()
    }

    fn two_peaks(x0_index: usize) -> RelativeWavefunction1D<f64> {
        let n = 512;
        let axis = Arc::new(Axis::new(1.0, n).unwrap());
        let x0: f64 = axis.points()[x0_index];
        let amps = axis
            .points()
            .iter()
            .map(|&x| (-(x - x0).powi(2) * 400.0).exp() + (-(x + x0).powi(2) * 400.0).exp())
            .collect();
        RelativeWavefunction1D::from_amplitudes(axis, amps).unwrap()
    }

    #[test]
    fn bayes_examples() {
        let g = MomentumGrid::new(1.0, 3).unwrap();
        let h = flat_pair(&g, vec![1.0, 2.0, 1.0], vec![1.5, 1.0, 1.5]);
        assert_relative_eq!(bayes_update(0.5, 0.0, &h).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        let same = flat_pair(&g, vec![1.0, 3.0, 1.0], vec![1.0, 3.0, 1.0]);
        assert_relative_eq!(bayes_update(0.37, 0.2, &same).unwrap(), 0.37, epsilon = 1e-15);
        assert_eq!(bayes_update(1.0, 5.0, &h).unwrap(), 1.0);
        assert_eq!(bayes_update(0.0, 0.1, &h).unwrap(), 0.0);
        assert!(matches!(bayes_update(0.5, 5.0, &h), Err(Error::ZeroLikelihood { .. })));
        assert!(matches!(bayes_update(1.5, 0.0, &h), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn zero_likelihood_under_both() {
        let g = MomentumGrid::new(1.0, 3).unwrap();
        let h = flat_pair(&g, vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]);
        assert!(matches!(bayes_update(0.5, 0.75, &h), Err(Error::ZeroLikelihood { .. })));
    }

    #[test]
    fn hypotheses_share_envelope_and_differ_by_fringes() {
        let s = two_peaks(400);
        let h = build_hypotheses(&s, &grid()).unwrap();
        let q1 = h.q1().values();
        let q2 = h.q2().values();
        assert_relative_eq!(q1.iter().sum::<f64>() * grid().step(), 1.0, epsilon = 1e-9);
        // Q₁ ∝ Q₂ (1 + cos(4π p x₀)) up to the overlap of the two peaks.
        let x0 = s.positions()[400];
        let shaped: Vec<f64> = grid()
            .points()
            .iter()
            .zip(q2)
            .map(|(&p, &q)| q * (1.0 + (2.0 * std::f64::consts::TAU * p * x0).cos()))
            .collect();
        let scale = q1.iter().sum::<f64>() / shaped.iter().sum::<f64>();
        for (a, b) in q1.iter().zip(&shaped) {
            assert_relative_eq!(*a, b * scale, epsilon = 1e-10);
        }
        assert!(h.separation() > 0.5);
    }

    #[test]
    fn right_only_state_has_equal_hypotheses() {
        let s = RelativeWavefunction1D::from_fn(1.0, 300, |x: f64| if x > 0.0 { (5.0 * x).sin() } else { 0.0 })
            .unwrap();
        let h = build_hypotheses(&s, &grid()).unwrap();
        for (a, b) in h.q1().values().iter().zip(h.q2().values()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-9);
        }
    }

    #[test]
    fn left_only_state_is_rejected() {
        let s = RelativeWavefunction1D::from_fn(1.0, 300, |x: f64| if x < 0.0 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(build_hypotheses(&s, &grid()), Err(Error::EmptyHalf { .. })));
    }

    #[test]
    fn narrow_peak_gives_flat_q2() {
        let axis = Arc::new(Axis::new(1.0, 2048).unwrap());
        let mut amps = vec![0.0; 2048];
        amps[1500] = 1.0;
        amps[axis.mirror(1500)] = 1.0;
        let s = RelativeWavefunction1D::from_amplitudes(axis, amps).unwrap();
        let h = build_hypotheses(&s, &grid()).unwrap();
        let expect = 1.0 / (2.0 * 8.0 + grid().step());
        for &v in h.q2().values() {
            assert_relative_eq!(v, expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn convolution_of_a_spike_is_gaussian() {
        let g = grid();
        let mut v = vec![0.0; 1025];
        v[512] = 1.0;
        let spike = MomentumDensity::new(g.clone(), v).unwrap();
        assert_eq!(convolve_resolution(&spike, 0.0).unwrap(), spike);
        let blurred = convolve_resolution(&spike, 0.5).unwrap();
        let var: f64 = blurred
            .values()
            .iter()
            .zip(g.points())
            .map(|(q, p)| q * p * p)
            .sum::<f64>()
            * g.step();
        assert_relative_eq!(var.sqrt(), 0.5, max_relative = 1e-6);
        assert!(convolve_resolution(&spike, -0.1).is_err());
    }

    #[test]
    fn blur_washes_out_fine_fringes() {
        let h = build_hypotheses(&two_peaks(450), &grid()).unwrap();
        let blurred = h.convolved(1.0).unwrap();
        assert!(blurred.separation() < 0.05 * h.separation());
    }

    fn small_config(runs: usize) -> ExperimentConfig<f64> {
        ExperimentConfig {
            half_width: 1.0,
            grid_points: 256,
            photons: 60,
            runs,
            momenta: MomentumGrid::new(8.0, 257).unwrap(),
            prior: 0.5,
        }
    }

    #[test]
    fn trace_structure() {
        let src = SpectralSource::monochromatic(1.0).unwrap();
        let t = simulate_experiment(Truth::Delocalised, &small_config(1), 0.0, &src, &mut seeded(1)).unwrap();
        assert_eq!(t.p_nl().len(), 2);
        assert_eq!(t.p_nl()[0], 0.5);
        assert_eq!(t.runs(), 1);
        for (a, b) in t.p_nl().iter().zip(t.p_l()) {
            assert_eq!(a + b, 1.0);
        }
        assert!(simulate_experiment(Truth::Delocalised, &small_config(0), 0.0, &src, &mut seeded(1)).is_err());
    }

    #[test]
    fn sweep_matches_single_resolution_runs() {
        let src = SpectralSource::monochromatic(1.0).unwrap();
        let cfg = small_config(4);
        let sweep = simulate_sweep(Truth::Localised, &cfg, &[0.0, 0.5], &src, &mut seeded(9)).unwrap();
        let single = simulate_experiment(Truth::Localised, &cfg, 0.5, &src, &mut seeded(9)).unwrap();
        assert_eq!(sweep[1], single);
        assert_eq!(sweep[0].truth(), Truth::Localised);
    }

    #[test]
    fn averaging_is_reproducible() {
        let src = SpectralSource::monochromatic(1.0).unwrap();
        let cfg = small_config(3);
        let a = average_experiments(Truth::Delocalised, 8, &cfg, 0.25, &src, 77).unwrap();
        let b = average_experiments(Truth::Delocalised, 8, &cfg, 0.25, &src, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean_p_nl[0], 0.5);
        assert_eq!(a.std_error[0], 0.0);
        assert!(average_experiments(Truth::Delocalised, 0, &cfg, 0.25, &src, 77).is_err());
    }

    #[test]
    fn truth_parses() {
        assert_eq!("Localised".parse::<Truth>().unwrap(), Truth::Localised);
        assert_eq!("delocalized".parse::<Truth>().unwrap(), Truth::Delocalised);
        assert!("maybe".parse::<Truth>().is_err());
    }
}
