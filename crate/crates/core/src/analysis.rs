//! Observables extracted from final states and momentum densities: peak
//! positions, fringe period and contrast, and the principal localisation axis
//! of a 3D state.

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::momentum::MomentumDensity;
use crate::scalar::Real;
use crate::wave1d::Side;
use crate::wave3d::RelativeWavefunction3D;

/// Local maxima no lower than `fraction` of the global maximum. A plateau
/// counts once, at its left end; the end points compare with their single
/// neighbour.
pub fn local_maxima<T: Real>(values: &[T], fraction: T) -> Vec<usize> {
    let Some(top) = values.iter().copied().reduce(T::max) else {
        return Vec::new();
    };
    let floor = top * fraction;
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let v = values[i];
            v >= floor
                && (i == 0 || v > values[i - 1])
                && (i + 1 == n || v >= values[i + 1])
        })
        .collect()
}

/// Positions of the two peaks of a two-peak density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakPair<T> {
    pub left: T,
    pub right: T,
}

/// `Some` when the density has exactly two maxima above 10% of its maximum,
/// one on each side of the origin, and they mirror each other to within two
/// grid spacings.
pub fn two_peak_signature<T: Real>(density: &[T], axis: &Axis<T>) -> Option<PeakPair<T>> {
    let peaks = local_maxima(density, T::lit(0.1));
    let [a, b] = peaks[..] else {
        return None;
    };
    let (left, right) = (axis.points()[a], axis.points()[b]);
    let mirrored = (left + right).abs() <= T::lit(2.0) * axis.spacing();
    (left < T::zero() && right > T::zero() && mirrored).then_some(PeakPair { left, right })
}

/// Mean x within one half-space, after renormalising that half.
pub fn peak_mean<T: Real>(density: &[T], axis: &Axis<T>, side: Side) -> Result<T> {
    assert_eq!(density.len(), axis.len(), "density length");
    let (mut mass, mut first) = (T::zero(), T::zero());
    for (&p, &x) in density.iter().zip(axis.points()) {
        let keep = match side {
            Side::Left => x < T::zero(),
            Side::Right => x > T::zero(),
        };
        if keep {
            mass += p;
            first += p * x;
        }
    }
    if !(mass * axis.spacing() >= T::lit(1e-12)) {
        return Err(Error::EmptyHalf {
            mass: (mass * axis.spacing()).as_f64(),
        });
    }
    Ok(first / mass)
}

/// Fringe minima of a density relative to a smooth envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeFit<T> {
    /// Refined momenta of the minima of density / envelope.
    pub minima: Vec<T>,
    /// Mean spacing of consecutive minima.
    pub period: T,
}

/// Locates the fringes of `density` by the minima of `density / envelope`,
/// considering only momenta where the envelope exceeds 5% of its maximum.
/// Each minimum is refined by a parabola through its neighbours. Returns
/// `None` with fewer than two minima.
pub fn fringe_period<T: Real>(
    density: &MomentumDensity<T>,
    envelope: &MomentumDensity<T>,
) -> Option<FringeFit<T>> {
    let step = density.grid().step();
    let pts = density.grid().points();
    let env = envelope.values();
    let top = env.iter().copied().fold(T::zero(), T::max);
    let cut = top * T::lit(0.05);
    let ratio: Vec<Option<T>> = density
        .values()
        .iter()
        .zip(env)
        .map(|(&q, &e)| (e > cut).then(|| q / e))
        .collect();
    let mut minima = Vec::new();
    for i in 1..ratio.len().saturating_sub(1) {
        let (Some(a), Some(b), Some(c)) = (ratio[i - 1], ratio[i], ratio[i + 1]) else {
            continue;
        };
        if b < a && b <= c {
            let curvature = a - b - b + c;
            let shift = if curvature > T::zero() {
                (a - c) / (T::lit(2.0) * curvature)
            } else {
                T::zero()
            };
            minima.push(pts[i] + shift * step);
        }
    }
    if minima.len() < 2 {
        return None;
    }
    let span = minima[minima.len() - 1] - minima[0];
    let period = span / T::from_usize_lossy(minima.len() - 1);
    Some(FringeFit { minima, period })
}

/// (max − min)/(max + min) over grid momenta within half a period of
/// `centre`.
pub fn fringe_contrast<T: Real>(density: &MomentumDensity<T>, centre: T, period: T) -> Option<T> {
    let half = period * T::lit(0.5);
    let window = density
        .grid()
        .points()
        .iter()
        .zip(density.values())
        .filter(|(&p, _)| (p - centre).abs() <= half)
        .map(|(_, &q)| q);
    let (lo, hi) = window.fold((None, None), |(lo, hi): (Option<T>, Option<T>), q| {
        (Some(lo.map_or(q, |l| l.min(q))), Some(hi.map_or(q, |h| h.max(q))))
    });
    let (lo, hi) = (lo?, hi?);
    (hi + lo > T::zero()).then(|| (hi - lo) / (hi + lo))
}

/// Unit vector of the largest eigenvalue of ∭ |c|² r rᵀ dV.
pub fn principal_axis<T: Real>(state: &RelativeWavefunction3D<T>) -> [T; 3] {
    let mut m = Matrix3::<f64>::zeros();
    for (q, &c) in state.amplitudes().iter().enumerate() {
        let rho = (c * c).as_f64();
        let r = state.point(q).map(|v| v.as_f64());
        for a in 0..3 {
            for b in a..3 {
                m[(a, b)] += rho * r[a] * r[b];
            }
        }
    }
    for a in 0..3 {
        for b in 0..a {
            m[(a, b)] = m[(b, a)];
        }
    }
    let eig = SymmetricEigen::new(m);
    let best = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(best);
    [T::lit(v[0]), T::lit(v[1]), T::lit(v[2])]
}

/// Probability of the projection s = r·direction, binned over
/// [−√3 d, √3 d], which holds every point of the cube for a unit direction.
pub fn projected_profile<T: Real>(
    state: &RelativeWavefunction3D<T>,
    direction: [T; 3],
    bins: usize,
) -> Vec<T> {
    let mut out = vec![T::zero(); bins];
    if bins == 0 {
        return out;
    }
    let reach = T::lit(3.0).sqrt() * state.half_width();
    let width = (reach + reach) / T::from_usize_lossy(bins);
    let volume = state.cell_volume();
    for (q, &c) in state.amplitudes().iter().enumerate() {
        let r = state.point(q);
        let s = r[0] * direction[0] + r[1] * direction[1] + r[2] * direction[2];
        let bin = ((s + reach) / width).floor().to_usize().unwrap_or(0).min(bins - 1);
        out[bin] += c * c * volume;
    }
    out
}

/// Two clouds along the principal axis: the projected profile (64 bins) has
/// exactly two maxima above 10% of its maximum, on opposite sides of zero.
pub fn is_bimodal_3d<T: Real>(state: &RelativeWavefunction3D<T>) -> bool {
    const BINS: usize = 64;
    let profile = projected_profile(state, principal_axis(state), BINS);
    matches!(local_maxima(&profile, T::lit(0.1))[..], [a, b] if a < BINS / 2 && b >= BINS / 2)
}
