//! Per-path normal variates.
//!
//! Each path owns a ChaCha8 stream keyed by `(seed, path_index)`: the key is
//! derived from `seed` and the 64-bit stream id is the path index, so the
//! variates of a path never depend on which thread ran it or in what order.
//! Uniforms carry 53 random bits; normals come from the Box–Muller
//! transform, both outputs of each pair used in turn.

use std::f64::consts::TAU;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

/// Deterministic standard-normal stream for one simulated path.
pub fn rng_substream(seed: u64, path_index: u64) -> NormalStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    NormalStream { rng, spare: None }
}

impl NormalStream {
    /// Uniform on `(0, 1]`.
    fn open_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.open_unit();
        let u2 = self.open_unit();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}
