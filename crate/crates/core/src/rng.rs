//! Seeded random streams. Every stochastic routine in the crate draws from a
//! ChaCha8 stream seeded with an explicit `u64`, so runs are reproducible
//! bit-for-bit across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linops::Vector;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vector(rng: &mut SeededRng, len: usize) -> Vector {
    let data: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    Vector::new(data).expect("standard normal draws are finite")
}

/// Entries drawn independently from the open interval `(lo, hi)`.
pub fn uniform_vector(rng: &mut SeededRng, len: usize, lo: f64, hi: f64) -> Vector {
    let data: Vec<f64> = (0..len).map(|_| open_uniform(rng, lo, hi)).collect();
    Vector::new(data).expect("uniform draws are finite")
}

pub fn open_uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return lo + (hi - lo) * u;
        }
    }
}
