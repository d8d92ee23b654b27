//! Inverse-CDF samplers over tabulated distributions.

use crate::scalar::Real;

/// Picks a cell with probability proportional to its (non-negative) weight.
///
/// Returns the cell index and the position of `u` within that cell's slice
/// of the cumulative mass, in `[0, 1)`. `None` when the total weight is not
/// positive and finite.
pub fn draw_cell<T: Real>(weights: &[T], u: T) -> Option<(usize, T)> {
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) || !total.is_finite() {
        return None;
    }
    let target = u * total;
    let mut acc = T::zero();
    let mut last_live = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= T::zero() {
            continue;
        }
        last_live = Some(i);
        let next = acc + w;
        if target < next {
            let offset = ((target - acc) / w).max(T::zero()).min(one_below::<T>());
            return Some((i, offset));
        }
        acc = next;
    }
    // Rounding left `target` at the very top of the table.
    last_live.map(|i| (i, one_below::<T>()))
}

#[inline]
fn one_below<T: Real>() -> T {
    T::one() - T::epsilon()
}

/// Cumulative table over cells, built once and inverted many times.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCdf<T> {
    cumulative: Vec<T>,
}

impl<T: Real> CellCdf<T> {
    pub fn new(weights: &[T]) -> Option<Self> {
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = T::zero();
        for &w in weights {
            if w < T::zero() || !w.is_finite() {
                return None;
            }
            acc += w;
            cumulative.push(acc);
        }
        if !(acc > T::zero()) {
            return None;
        }
        for c in &mut cumulative {
            *c /= acc;
        }
        Some(Self { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// Cell index and in-cell offset for a uniform draw `u` in `[0, 1)`.
    pub fn sample(&self, u: T) -> (usize, T) {
        let i = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        let lo = if i == 0 {
            T::zero()
        } else {
            self.cumulative[i - 1]
        };
        let width = self.cumulative[i] - lo;
        let offset = if width > T::zero() {
            ((u - lo) / width).max(T::zero()).min(one_below::<T>())
        } else {
            T::zero()
        };
        (i, offset)
    }
}

/// Monotone CDF tabulated on increasing nodes, inverted by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf<T> {
    nodes: Vec<T>,
    cdf: Vec<T>,
}

impl<T: Real> TabulatedCdf<T> {
    /// Integrates `density` sampled at `nodes` with the trapezoid rule and
    /// normalises so the table runs from exactly 0 to exactly 1.
    pub fn from_density(nodes: Vec<T>, density: &[T]) -> Option<Self> {
        if nodes.len() < 2 || nodes.len() != density.len() {
            return None;
        }
        let half = T::lit(0.5);
        let mut cdf = Vec::with_capacity(nodes.len());
        cdf.push(T::zero());
        for i in 1..nodes.len() {
            let dx = nodes[i] - nodes[i - 1];
            if !(dx > T::zero()) || density[i] < T::zero() || density[i - 1] < T::zero() {
                return None;
            }
            let next = cdf[i - 1] + half * (density[i] + density[i - 1]) * dx;
            cdf.push(next);
        }
        let total = *cdf.last().unwrap();
        if !(total > T::zero()) || !total.is_finite() {
            return None;
        }
        for c in &mut cdf {
            *c /= total;
        }
        *cdf.last_mut().unwrap() = T::one();
        Some(Self { nodes, cdf })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.cdf
    }

    /// Node value at which the interpolated CDF reaches `u`.
    pub fn invert(&self, u: T) -> T {
        let u = u.max(T::zero()).min(T::one());
        let i = self.cdf.partition_point(|&c| c <= u);
        if i == 0 {
            return self.nodes[0];
        }
        if i >= self.cdf.len() {
            return *self.nodes.last().unwrap();
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        if c1 > c0 {
            x0 + (x1 - x0) * (u - c0) / (c1 - c0)
        } else {
            x0
        }
    }
}

/// Samples the piecewise-linear interpolant of non-negative values on a
/// uniform grid, i.e. exactly the density that linear interpolation reports.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear<T> {
    start: T,
    step: T,
    values: Vec<T>,
    intervals: CellCdf<T>,
}

impl<T: Real> PiecewiseLinear<T> {
    pub fn new(start: T, step: T, values: Vec<T>) -> Option<Self> {
        if values.len() < 2 || !(step > T::zero()) {
            return None;
        }
        let half = T::lit(0.5);
        let masses: Vec<T> = values
            .windows(2)
            .map(|w| half * (w[0] + w[1]) * step)
            .collect();
        let intervals = CellCdf::new(&masses)?;
        Some(Self {
            start,
            step,
            values,
            intervals,
        })
    }

    pub fn sample(&self, u: T) -> T {
        let (i, r) = self.intervals.sample(u);
        let (a, b) = (self.values[i], self.values[i + 1]);
        // Within the interval the density is a + (b - a) t; solve its CDF for t.
        let denom = a + (a * a + (b * b - a * a) * r).max(T::zero()).sqrt();
        let t = if denom > T::zero() {
            (r * (a + b) / denom).min(T::one())
        } else {
            r
        };
        self.start + (T::from_usize_lossy(i) + t) * self.step
    }
}
