//! Three-dimensional relative-position wavefunction on a cube `[-d, d]³`.
//!
//! Light travels along z. A photon scattered into (θ, φ) multiplies the state
//! by cos(2πΓ/λ) with Γ = x sinθ cosφ + y sinθ sinφ + z(cosθ − 1); an
//! unscattered photon multiplies it by A(x, y, z).
//!
//! Amplitudes are stored x-major: index `(i * n + j) * n + k` for the point
//! `(x_i, y_j, z_k)`. Because every axis is an exact mirror, the point
//! `-r` of flat index `q` has flat index `n³ - 1 - q`.

use std::sync::Arc;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cdf::{draw_cell, CellCdf};
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::rng::uniform;
use crate::scalar::Real;
use crate::spectra::SpectralSource;

pub const DEFAULT_GRID_3D: usize = 64;
pub const DEFAULT_THETA_BINS: usize = 128;
pub const DEFAULT_PHI_BINS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct RelativeWavefunction3D<T> {
    axis: Arc<Axis<T>>,
    amplitudes: Vec<T>,
}

impl<T: Real> RelativeWavefunction3D<T> {
    /// The delocalised state c = (2d)^(-3/2).
    pub fn flat(half_width: T, n: usize) -> Result<Self> {
        let axis = Arc::new(Axis::new(half_width, n)?);
        let side = half_width + half_width;
        let value = (side * side * side).sqrt().recip();
        Ok(Self {
            amplitudes: vec![value; n * n * n],
            axis,
        })
    }

    pub fn from_amplitudes(axis: Arc<Axis<T>>, amplitudes: Vec<T>) -> Result<Self> {
        let n = axis.len();
        if amplitudes.len() != n * n * n {
            return Err(Error::InvalidDimension(format!(
                "{} amplitudes for a {n}³ grid",
                amplitudes.len()
            )));
        }
        let mut state = Self {
            axis,
            amplitudes: Vec::new(),
        };
        state.replace_normalised(amplitudes)?;
        Ok(state)
    }

    pub fn from_fn(half_width: T, n: usize, f: impl Fn(T, T, T) -> T) -> Result<Self> {
        let axis = Arc::new(Axis::new(half_width, n)?);
        let pts = axis.points();
        let mut amplitudes = Vec::with_capacity(n * n * n);
        for &x in pts {
            for &y in pts {
                for &z in pts {
                    amplitudes.push(f(x, y, z));
                }
            }
        }
        Self::from_amplitudes(axis, amplitudes)
    }

    pub fn axis(&self) -> &Arc<Axis<T>> {
        &self.axis
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    /// Points per axis.
    pub fn side_len(&self) -> usize {
        self.axis.len()
    }

    pub fn half_width(&self) -> T {
        self.axis.half_width()
    }

    pub fn cell_volume(&self) -> T {
        let dx = self.axis.spacing();
        dx * dx * dx
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.side_len();
        (i * n + j) * n + k
    }

    /// Cartesian position of flat index `q`.
    pub fn point(&self, q: usize) -> [T; 3] {
        let n = self.side_len();
        let pts = self.axis.points();
        [pts[q / (n * n)], pts[(q / n) % n], pts[q % n]]
    }

    pub fn norm_sq(&self) -> T {
        self.amplitudes.iter().map(|&c| c * c).sum::<T>() * self.cell_volume()
    }

    pub fn position_density(&self) -> Vec<T> {
        self.amplitudes.iter().map(|&c| c * c).collect()
    }

    /// Largest |P(r) − P(−r)| over the grid.
    pub fn inversion_asymmetry(&self) -> T {
        let n3 = self.amplitudes.len();
        (0..n3 / 2)
            .map(|q| {
                let (a, b) = (self.amplitudes[q], self.amplitudes[n3 - 1 - q]);
                (a * a - b * b).abs()
            })
            .fold(T::zero(), T::max)
    }

    /// The x, y and z marginal densities, each integrating to 1.
    pub fn marginals(&self) -> [Vec<T>; 3] {
        let n = self.side_len();
        let dx = self.axis.spacing();
        let area = dx * dx;
        let mut out = [vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.amplitudes[(i * n + j) * n + k];
                    let p = c * c * area;
                    out[0][i] += p;
                    out[1][j] += p;
                    out[2][k] += p;
                }
            }
        }
        out
    }

    pub fn apply_multiplier(&mut self, multiplier: &[T]) -> Result<()> {
        assert_eq!(multiplier.len(), self.amplitudes.len(), "multiplier length");
        let next = self
            .amplitudes
            .iter()
            .zip(multiplier)
            .map(|(&c, &m)| c * m)
            .collect();
        self.replace_normalised(next)
    }

    fn replace_normalised(&mut self, mut next: Vec<T>) -> Result<()> {
        let norm_sq = next.iter().map(|&c| c * c).sum::<T>() * self.cell_volume();
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

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScatterOutcome3D<T> {
    NonScattered { wavelength: T },
    /// Polar angle `theta` ∈ [0, π], azimuth `phi` ∈ [0, 2π).
    Scattered { theta: T, phi: T, wavelength: T },
}

impl<T: Real> ScatterOutcome3D<T> {
    pub fn wavelength(&self) -> T {
        match *self {
            ScatterOutcome3D::NonScattered { wavelength }
            | ScatterOutcome3D::Scattered { wavelength, .. } => wavelength,
        }
    }

    pub fn is_scattered(&self) -> bool {
        matches!(self, ScatterOutcome3D::Scattered { .. })
    }
}

/// Γ(θ, φ) = x sinθ cosφ + y sinθ sinφ + z(cosθ − 1), i.e. (λ/h) Δp·r for the
/// momentum kick (Δp_x, Δp_y, Δp_z) = (h/λ)(sinθ cosφ, sinθ sinφ, cosθ − 1).
pub fn gamma_kernel<T: Real>(x: T, y: T, z: T, theta: T, phi: T) -> T {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    x * st * cp + y * st * sp + z * (ct - T::one())
}

/// Midpoint (θ, φ) grid on the sphere. Each cell carries its exact solid
/// angle (cos θ_lo − cos θ_hi) Δφ, so the weights sum to 4π.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid3D<T> {
    n_theta: usize,
    n_phi: usize,
    phi_step: T,
    cos_edges: Vec<T>,
    sin_theta: Vec<T>,
    cos_theta_m1: Vec<T>,
    cos_phi: Vec<T>,
    sin_phi: Vec<T>,
    /// Solid angle of one cell in each θ row.
    row_weight: Vec<T>,
}

impl<T: Real> AngleGrid3D<T> {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 1 || n_phi < 4 || n_phi % 4 != 0 {
            return Err(Error::InvalidDimension(format!(
                "angle grid {n_theta}×{n_phi}: need θ bins ≥ 1 and φ bins a positive multiple of 4"
            )));
        }
        let half = T::lit(0.5);
        let theta_step = T::PI() / T::from_usize_lossy(n_theta);
        let phi_step = T::TAU() / T::from_usize_lossy(n_phi);
        let cos_edges: Vec<T> = (0..=n_theta)
            .map(|i| (T::from_usize_lossy(i) * theta_step).cos())
            .collect();
        let (sin_theta, cos_theta_m1) = (0..n_theta)
            .map(|i| {
                let (s, c) = ((T::from_usize_lossy(i) + half) * theta_step).sin_cos();
                (s, c - T::one())
            })
            .unzip();
        let (sin_phi, cos_phi) = (0..n_phi)
            .map(|l| ((T::from_usize_lossy(l) + half) * phi_step).sin_cos())
            .unzip();
        let row_weight = cos_edges
            .windows(2)
            .map(|w| (w[0] - w[1]) * phi_step)
            .collect();
        Ok(Self {
            n_theta,
            n_phi,
            phi_step,
            cos_edges,
            sin_theta,
            cos_theta_m1,
            cos_phi,
            sin_phi,
            row_weight,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn cells(&self) -> usize {
        self.n_theta * self.n_phi
    }

    /// Midpoint angles (θ, φ) of cell `(i, l)`.
    pub fn cell_centre(&self, i: usize, l: usize) -> (T, T) {
        let half = T::lit(0.5);
        let theta = (T::from_usize_lossy(i) + half) * T::PI() / T::from_usize_lossy(self.n_theta);
        let phi = (T::from_usize_lossy(l) + half) * self.phi_step;
        (theta, phi)
    }

    /// Solid angle of any cell in row `i`.
    pub fn cell_weight(&self, i: usize) -> T {
        self.row_weight[i]
    }

    fn gamma(&self, r: [T; 3], i: usize, l: usize) -> T {
        let st = self.sin_theta[i];
        r[0] * st * self.cos_phi[l] + r[1] * st * self.sin_phi[l] + r[2] * self.cos_theta_m1[i]
    }

    /// A²(r) = (1/4π) ∫ sin²(2πΓ/λ) dΩ on the grid.
    pub fn nonscatter_sq(&self, r: [T; 3], wavelength: T) -> T {
        let k = T::TAU() / wavelength;
        let mut total = T::zero();
        for i in 0..self.n_theta {
            let row: T = (0..self.n_phi)
                .map(|l| {
                    let v = (k * self.gamma(r, i, l)).sin();
                    v * v
                })
                .sum();
            total += row * self.row_weight[i];
        }
        total / (T::lit(4.0) * T::PI())
    }

    /// Per-cell probabilities of scattering into each (θ, φ) cell given the
    /// relative position r, flattened θ-major. They sum to 1 − A²(r).
    pub fn conditional_weights(&self, r: [T; 3], wavelength: T) -> Vec<T> {
        let k = T::TAU() / wavelength;
        let norm = (T::lit(4.0) * T::PI()).recip();
        let mut out = Vec::with_capacity(self.cells());
        for i in 0..self.n_theta {
            let w = self.row_weight[i] * norm;
            for l in 0..self.n_phi {
                let v = (k * self.gamma(r, i, l)).cos();
                out.push(w * v * v);
            }
        }
        out
    }
}

impl<T: Real> Default for AngleGrid3D<T> {
    fn default() -> Self {
        Self::new(DEFAULT_THETA_BINS, DEFAULT_PHI_BINS).expect("default 3D angle grid")
    }
}

/// A(r) at every grid point for one wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct NonscatterTable3D<T> {
    axis: Arc<Axis<T>>,
    wavelength: T,
    amplitude_sq: Vec<T>,
    amplitude: Vec<T>,
}

impl<T: Real> NonscatterTable3D<T> {
    /// Evaluates the grid quadrature at every point.
    ///
    /// A² only depends on (|x|, |y|, |z|) up to x ↔ y exchange on this angle
    /// grid, so it is evaluated on that fundamental domain. There
    /// sin²(kΓ) = (1 − cos 2kΓ)/2 and e^{2ikΓ} factorises into one phase per
    /// axis.
    pub fn new(axis: Arc<Axis<T>>, wavelength: T, angles: &AngleGrid3D<T>) -> Self {
        let n = axis.len();
        let start = n / 2;
        let reps = &axis.points()[start..];
        let m = reps.len();
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect();
        let mut acc = vec![T::zero(); pairs.len() * m];
        let two_k = T::lit(2.0) * T::TAU() / wavelength;
        let phase = |a: T| -> Vec<Complex<T>> {
            reps.iter()
                .map(|&v| {
                    let (s, c) = (a * v).sin_cos();
                    Complex::new(c, s)
                })
                .collect()
        };
        let mut total_weight = T::zero();
        for i in 0..angles.n_theta {
            let w = angles.row_weight[i];
            let ez = phase(two_k * angles.cos_theta_m1[i]);
            for l in 0..angles.n_phi {
                total_weight += w;
                let ex = phase(two_k * angles.sin_theta[i] * angles.cos_phi[l]);
                let ey = phase(two_k * angles.sin_theta[i] * angles.sin_phi[l]);
                for (p, &(a, b)) in pairs.iter().enumerate() {
                    let exy = ex[a] * ey[b];
                    let (re, im) = (exy.re * w, exy.im * w);
                    let row = &mut acc[p * m..(p + 1) * m];
                    for (slot, e) in row.iter_mut().zip(&ez) {
                        *slot += re * e.re - im * e.im;
                    }
                }
            }
        }
        let eight_pi = T::lit(8.0) * T::PI();
        let reduced: Vec<T> = acc
            .iter()
            .map(|&c| ((total_weight - c) / eight_pi).max(T::zero()))
            .collect();

        let rep = |i: usize| if i >= start { i - start } else { n - 1 - i - start };
        let mut amplitude_sq = vec![T::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = {
                    let (a, b) = (rep(i), rep(j));
                    if a <= b { (a, b) } else { (b, a) }
                };
                // Row offset of pair (a, b) in the upper-triangular listing.
                let p = a * m - a * (a + 1) / 2 + b;
                for k in 0..n {
                    amplitude_sq[(i * n + j) * n + k] = reduced[p * m + rep(k)];
                }
            }
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

/// Scattering model for the 3D state. The A² table is immutable once built
/// and shared between clones.
#[derive(Debug, Clone)]
pub struct Scatterer3D<T> {
    angles: AngleGrid3D<T>,
    table: Option<Arc<NonscatterTable3D<T>>>,
}

impl<T: Real> Default for Scatterer3D<T> {
    fn default() -> Self {
        Self {
            angles: AngleGrid3D::default(),
            table: None,
        }
    }
}

impl<T: Real> Scatterer3D<T> {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        Ok(Self {
            angles: AngleGrid3D::new(n_theta, n_phi)?,
            table: None,
        })
    }

    pub fn angles(&self) -> &AngleGrid3D<T> {
        &self.angles
    }

    pub fn nonscatter_table(
        &mut self,
        axis: &Arc<Axis<T>>,
        wavelength: T,
    ) -> Arc<NonscatterTable3D<T>> {
        match &self.table {
            Some(t) if t.matches(axis, wavelength) => t.clone(),
            _ => {
                let t = Arc::new(NonscatterTable3D::new(axis.clone(), wavelength, &self.angles));
                self.table = Some(t.clone());
                t
            }
        }
    }

    /// P_S(θ, φ) = (1/4π) ∭ |c|² cos²(2πΓ/λ) dV, per steradian.
    pub fn scatter_density(
        &self,
        state: &RelativeWavefunction3D<T>,
        theta: T,
        phi: T,
        wavelength: T,
    ) -> T {
        // cos²(kΓ) = (1 + Re e^{2ikΓ}) / 2 with a separable phase.
        let two_k = T::lit(2.0) * T::TAU() / wavelength;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let pts = state.axis().points();
        let phases = |a: T| -> Vec<Complex<T>> {
            pts.iter()
                .map(|&v| {
                    let (s, c) = (a * v).sin_cos();
                    Complex::new(c, s)
                })
                .collect()
        };
        let ex = phases(two_k * st * cp);
        let ey = phases(two_k * st * sp);
        let ez = phases(two_k * (ct - T::one()));
        let n = state.side_len();
        let amps = state.amplitudes();
        let (mut plain, mut oscillating) = (T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                let exy = ex[i] * ey[j];
                let base = (i * n + j) * n;
                for k in 0..n {
                    let c = amps[base + k];
                    let rho = c * c;
                    plain += rho;
                    oscillating += rho * (exy.re * ez[k].re - exy.im * ez[k].im);
                }
            }
        }
        let half = T::lit(0.5);
        half * (plain + oscillating) * state.cell_volume() / (T::lit(4.0) * T::PI())
    }

    /// P_NS = ∭ |c|² A² dV.
    pub fn nonscatter_probability(&mut self, state: &RelativeWavefunction3D<T>, wavelength: T) -> T {
        let table = self.nonscatter_table(state.axis(), wavelength);
        let sum: T = state
            .amplitudes()
            .iter()
            .zip(table.amplitude_sq())
            .map(|(&c, &a2)| c * c * a2)
            .sum();
        sum * state.cell_volume()
    }

    /// Draws the next detection outcome: a relative position from |c|², then
    /// non-scattering with probability A²(r), otherwise a (θ, φ) cell with
    /// weight sinθ cos²(2πΓ/λ); within the cell cos θ and φ are uniform.
    /// Marginally this is the inverse-CDF draw over the discretised
    /// P_S(θ, φ) sinθ and P_NS.
    pub fn sample_event<R: Rng + ?Sized>(
        &self,
        state: &RelativeWavefunction3D<T>,
        wavelength: T,
        rng: &mut R,
    ) -> ScatterOutcome3D<T> {
        let density = state.position_density();
        let (q, _) = draw_cell(&density, uniform(rng)).expect("normalised state has mass");
        let r = state.point(q);
        if uniform::<T, _>(rng) < self.angles.nonscatter_sq(r, wavelength) {
            return ScatterOutcome3D::NonScattered { wavelength };
        }
        let weights = self.angles.conditional_weights(r, wavelength);
        let (cell, _) = draw_cell(&weights, uniform(rng)).unwrap_or((0, T::zero()));
        let (i, l) = (cell / self.angles.n_phi, cell % self.angles.n_phi);
        let (c_hi, c_lo) = (self.angles.cos_edges[i], self.angles.cos_edges[i + 1]);
        let cos_theta = c_lo + (c_hi - c_lo) * uniform(rng);
        let theta = cos_theta.max(-T::one()).min(T::one()).acos();
        let phi = (T::from_usize_lossy(l) + uniform(rng)) * self.angles.phi_step;
        let phi = if phi >= T::TAU() { T::zero() } else { phi };
        ScatterOutcome3D::Scattered {
            theta,
            phi,
            wavelength,
        }
    }

    pub fn apply_event(
        &mut self,
        state: &mut RelativeWavefunction3D<T>,
        event: &ScatterOutcome3D<T>,
    ) -> Result<()> {
        match *event {
            ScatterOutcome3D::NonScattered { wavelength } => {
                let table = self.nonscatter_table(state.axis(), wavelength);
                state.apply_multiplier(table.amplitude())
            }
            ScatterOutcome3D::Scattered {
                theta,
                phi,
                wavelength,
            } => {
                let multiplier = scatter_multiplier(state.axis(), theta, phi, wavelength);
                state.apply_multiplier(&multiplier)
            }
        }
    }

    pub fn run_localisation<R: Rng + ?Sized>(
        &mut self,
        state: &mut RelativeWavefunction3D<T>,
        photons: usize,
        source: &SpectralSource<T>,
        rng: &mut R,
    ) -> Result<Vec<ScatterOutcome3D<T>>> {
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

/// cos(2πΓ/λ) on the grid as Re(e^{ikx a} e^{iky b} e^{ikz c}). Phases on the
/// negative half of each axis are conjugates of the positive half, which
/// makes the multiplier exactly even under r → −r.
fn scatter_multiplier<T: Real>(axis: &Axis<T>, theta: T, phi: T, wavelength: T) -> Vec<T> {
    let k = T::TAU() / wavelength;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let n = axis.len();
    let phases = |a: T| -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for j in n / 2..n {
            let (s, c) = (a * axis.points()[j]).sin_cos();
            out[j] = Complex::new(c, s);
            out[axis.mirror(j)] = Complex::new(c, -s);
        }
        out
    };
    let ex = phases(k * st * cp);
    let ey = phases(k * st * sp);
    let ez = phases(k * (ct - T::one()));
    let mut out = Vec::with_capacity(n * n * n);
    for e_x in &ex {
        for e_y in &ey {
            let exy = e_x * e_y;
            out.extend(ez.iter().map(|e| exy.re * e.re - exy.im * e.im));
        }
    }
    out
}

/// A(x, y, z) with the default angle grid.
pub fn nonscatter_amplitude_3d<T: Real>(x: T, y: T, z: T, wavelength: T) -> T {
    AngleGrid3D::default().nonscatter_sq([x, y, z], wavelength).sqrt()
}

pub fn apply_event_3d<T: Real>(
    state: &RelativeWavefunction3D<T>,
    event: &ScatterOutcome3D<T>,
) -> Result<RelativeWavefunction3D<T>> {
    let mut next = state.clone();
    Scatterer3D::default().apply_event(&mut next, event)?;
    Ok(next)
}

/// Draws `samples` points from |c|² for point-cloud plots, jittered
/// uniformly within their grid cells.
pub fn density_export_3d<T: Real, R: Rng + ?Sized>(
    state: &RelativeWavefunction3D<T>,
    samples: usize,
    rng: &mut R,
) -> Vec<[T; 3]> {
    if samples == 0 {
        return Vec::new();
    }
    let cdf = CellCdf::new(&state.position_density()).expect("normalised state has mass");
    let dx = state.axis().spacing();
    let half = T::lit(0.5);
    (0..samples)
        .map(|_| {
            let (q, _) = cdf.sample(uniform(rng));
            let p = state.point(q);
            let mut jitter = || (uniform::<T, _>(rng) - half) * dx;
            [p[0] + jitter(), p[1] + jitter(), p[2] + jitter()]
        })
        .collect()
}
