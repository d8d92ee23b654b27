//! Cell-centred, mirror-symmetric position axis over `[-d, d]`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform cell-centred axis of `n` points over `[-half_width, half_width]`.
///
/// Point `n - 1 - j` is the exact negation of point `j`, so densities that
/// are even in position stay bit-for-bit even under even multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis<T> {
    half_width: T,
    spacing: T,
    points: Vec<T>,
}

impl<T: Real> Axis<T> {
    pub fn new(half_width: T, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(format!(
                "grid needs at least 2 points, got {n}"
            )));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidDimension(format!(
                "half-width must be positive and finite, got {half_width}"
            )));
        }
        let spacing = (half_width + half_width) / T::from_usize_lossy(n);
        let half = T::lit(0.5);
        let mut points = vec![T::zero(); n];
        for j in 0..n / 2 {
            let x = -half_width + (T::from_usize_lossy(j) + half) * spacing;
            points[j] = x;
            points[n - 1 - j] = -x;
        }
        Ok(Self {
            half_width,
            spacing,
            points,
        })
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the mirror point `-x_j`.
    #[inline]
    pub fn mirror(&self, j: usize) -> usize {
        self.points.len() - 1 - j
    }

    /// Number of leading points that determine every even function on the axis.
    #[inline]
    pub fn even_prefix(&self) -> usize {
        (self.points.len() + 1) / 2
    }
}
