//! Seeded random streams.
//!
//! Every stochastic routine takes a generic [`rand::Rng`]. Batch drivers derive
//! one non-overlapping ChaCha stream per experiment from a single master seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in `[0, 1)` converted to the working scalar.
#[inline]
pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let u = T::lit(rng.random::<f64>());
    // f32 rounding can land on 1.0.
    if u >= T::one() {
        T::one() - T::epsilon()
    } else {
        u
    }
}
