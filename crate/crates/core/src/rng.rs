//! Seeded random streams.
//!
//! Every random quantity comes from ChaCha20 (`rand_chacha::ChaCha20Rng`)
//! keyed by `seed_from_u64(seed)`; independent families draw from distinct
//! ChaCha stream ids of the same key, so results are bit-reproducible across
//! platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Recorded in every report.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.3, seed_from_u64, stream per family)";

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Stream ids used by the library so that families never overlap.
pub mod streams {
    pub const STATES: u64 = 1;
    pub const GROUP: u64 = 2;
    pub const HAMILTONIAN: u64 = 3;
    pub const QUBITS: u64 = 4;
    pub const SIMILARITY: u64 = 5;
}
