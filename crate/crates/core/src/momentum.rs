//! Relative-momentum densities of 1D states, p in units of h/λ.
//!
//! Q(p) = |∑_j c(x_j) e^{-2πi p x_j} Δx|², evaluated directly on a
//! user-chosen symmetric grid. Amplitudes at -p are the conjugates of those
//! at +p because c(x) is real, so only p ≥ 0 is computed.

use num_complex::Complex;

use crate::cdf::PiecewiseLinear;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::wave1d::RelativeWavefunction1D;

pub const DEFAULT_P_MAX: f64 = 8.0;
pub const DEFAULT_P_POINTS: usize = 1025;

/// Uniform momentum grid symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid<T> {
    points: Vec<T>,
    step: T,
}

impl<T: Real> MomentumGrid<T> {
    /// `n` points spanning `[-p_max, p_max]`.
    pub fn new(p_max: T, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if !(p_max > T::zero()) || !p_max.is_finite() {
            return Err(Error::InvalidGrid(format!("p_max must be positive, got {p_max}")));
        }
        let step = (p_max + p_max) / T::from_usize_lossy(n - 1);
        let mut points = vec![T::zero(); n];
        for k in 0..n / 2 {
            let p = -p_max + T::from_usize_lossy(k) * step;
            points[k] = p;
            points[n - 1 - k] = -p;
        }
        Ok(Self { points, step })
    }

    /// Validates an explicit list of momenta.
    pub fn from_points(points: Vec<T>) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        let step = (points[n - 1] - points[0]) / T::from_usize_lossy(n - 1);
        if !(step > T::zero()) {
            return Err(Error::InvalidGrid("points must increase".into()));
        }
        let tol = step * T::lit(1e-6);
        for (k, w) in points.windows(2).enumerate() {
            if ((w[1] - w[0]) - step).abs() > tol {
                return Err(Error::InvalidGrid(format!("non-uniform spacing at index {k}")));
            }
        }
        for k in 0..n / 2 {
            if (points[k] + points[n - 1 - k]).abs() > tol {
                return Err(Error::InvalidGrid("grid is not symmetric about 0".into()));
            }
        }
        Ok(Self { points, step })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn p_max(&self) -> T {
        *self.points.last().unwrap()
    }

    /// First index with p ≥ 0.
    fn nonnegative_start(&self) -> usize {
        self.points.len() / 2
    }
}

/// Probability density on a momentum grid, normalised so ∑ Q Δp = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDensity<T> {
    grid: MomentumGrid<T>,
    values: Vec<T>,
}

impl<T: Real> MomentumDensity<T> {
    pub fn new(grid: MomentumGrid<T>, mut values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidDimension(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| *v < T::zero() || !v.is_finite()) {
            return Err(Error::InvalidParameter("density values must be finite and non-negative".into()));
        }
        let mass = values.iter().copied().sum::<T>() * grid.step();
        if !(mass > T::zero()) {
            return Err(Error::InvalidParameter("density has no mass on the grid".into()));
        }
        for v in &mut values {
            *v /= mass;
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &MomentumGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn at(&self, p: T) -> Option<T> {
        let pts = self.grid.points();
        let (lo, hi) = (pts[0], *pts.last().unwrap());
        if !(p >= lo && p <= hi) {
            return None;
        }
        let pos = (p - lo) / self.grid.step();
        let i = pos.floor().to_usize().unwrap_or(0).min(pts.len() - 2);
        let t = (pos - T::from_usize_lossy(i)).max(T::zero()).min(T::one());
        Some(self.values[i] * (T::one() - t) + self.values[i + 1] * t)
    }

    /// Sampler for the piecewise-linear density reported by [`Self::at`].
    pub fn sampler(&self) -> PiecewiseLinear<T> {
        PiecewiseLinear::new(self.grid.points()[0], self.grid.step(), self.values.clone())
            .expect("normalised density has mass")
    }

    /// ∫ |Q - other| dp.
    pub fn l1_distance(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .sum::<T>()
            * self.grid.step()
    }
}

/// Transform amplitudes split by the sign of x.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitAmplitudes<T> {
    /// Contribution of x < 0.
    pub left: Vec<Complex<T>>,
    /// Contribution of x = 0 (present only on odd grids).
    pub centre: Vec<Complex<T>>,
    /// Contribution of x > 0.
    pub right: Vec<Complex<T>>,
}

impl<T: Real> SplitAmplitudes<T> {
    pub fn total(&self) -> Vec<Complex<T>> {
        self.left
            .iter()
            .zip(&self.centre)
            .zip(&self.right)
            .map(|((l, c), r)| l + c + r)
            .collect()
    }
}

/// Fourier amplitudes of the left, centre and right parts of `state` at
/// every momentum of `grid`.
pub fn split_amplitudes<T: Real>(
    state: &RelativeWavefunction1D<T>,
    grid: &MomentumGrid<T>,
) -> SplitAmplitudes<T> {
    let xs = state.positions();
    let cs = state.amplitudes();
    let dx = state.spacing();
    let n_left = xs.partition_point(|&x| x < T::zero());
    let n_right_start = xs.partition_point(|&x| x <= T::zero());

    let start = grid.nonnegative_start();
    let p0 = grid.points()[start];
    let minus_tau = -T::TAU();
    // Phase rotors e^{-2πi p x_j}, advanced by one grid step per momentum.
    let (mut rot_re, mut rot_im): (Vec<T>, Vec<T>) = xs
        .iter()
        .map(|&x| {
            let (s, c) = (minus_tau * p0 * x).sin_cos();
            (c, s)
        })
        .unzip();
    let (step_re, step_im): (Vec<T>, Vec<T>) = xs
        .iter()
        .map(|&x| {
            let (s, c) = (minus_tau * grid.step() * x).sin_cos();
            (c, s)
        })
        .unzip();

    let m = grid.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = SplitAmplitudes {
        left: vec![zero; m],
        centre: vec![zero; m],
        right: vec![zero; m],
    };
    let ranges = [0..n_left, n_left..n_right_start, n_right_start..xs.len()];
    for k in start..m {
        let mut sums = [zero; 3];
        for (sum, range) in sums.iter_mut().zip(ranges.iter().cloned()) {
            let (mut re, mut im) = (T::zero(), T::zero());
            for j in range {
                let (r, i) = (rot_re[j], rot_im[j]);
                re += cs[j] * r;
                im += cs[j] * i;
                rot_re[j] = r * step_re[j] - i * step_im[j];
                rot_im[j] = r * step_im[j] + i * step_re[j];
            }
            *sum = Complex::new(re * dx, im * dx);
        }
        out.left[k] = sums[0];
        out.centre[k] = sums[1];
        out.right[k] = sums[2];
        let mirror = m - 1 - k;
        if mirror != k {
            out.left[mirror] = sums[0].conj();
            out.centre[mirror] = sums[1].conj();
            out.right[mirror] = sums[2].conj();
        }
    }
    out
}

/// Q(p) of the full state.
pub fn momentum_density<T: Real>(
    state: &RelativeWavefunction1D<T>,
    grid: &MomentumGrid<T>,
) -> Result<MomentumDensity<T>> {
    let values = split_amplitudes(state, grid)
        .total()
        .iter()
        .map(|a| a.norm_sqr())
        .collect();
    MomentumDensity::new(grid.clone(), values)
}
