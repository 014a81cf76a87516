//! Seeded randomness shared by every component.
//!
//! All draws go through [`SeededRng`], a ChaCha8 stream keyed by a 64-bit
//! seed. ChaCha output is specified independently of platform and word size,
//! so the same seed yields the same draw sequence everywhere.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floor applied by [`SeededRng::clipped_standard_normal`]: `1/sqrt(2*pi)`.
pub const CLIP_FLOOR: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent child stream `stream` of `seed`. Children of one seed never
    /// overlap with each other or with the parent stream (stream 0).
    pub fn child(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream + 1);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// `max(1/sqrt(2*pi), z)` for a standard normal `z`.
    pub fn clipped_standard_normal(&mut self) -> f64 {
        clip_normal(self.standard_normal())
    }

    /// Index drawn from a discrete distribution given by `probs` (assumed to
    /// sum to one). Falls back to the last index on round-off.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }
}

/// Clip a raw standard normal draw at `1/sqrt(2*pi)`.
pub fn clip_normal(z: f64) -> f64 {
    z.max(CLIP_FLOOR)
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_floor_value() {
        assert!((CLIP_FLOOR - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-16);
        assert_eq!(clip_normal(-0.3), CLIP_FLOOR);
        assert_eq!(clip_normal(2.0), 2.0);
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        for _ in 0..1000 {
            assert_eq!(a.standard_normal().to_bits(), b.standard_normal().to_bits());
        }
    }

    #[test]
    fn children_differ() {
        let mut a = SeededRng::child(7, 0);
        let mut b = SeededRng::child(7, 1);
        let mut p = SeededRng::new(7);
        let xa: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        let xp: Vec<u64> = (0..4).map(|_| p.next_u64()).collect();
        assert_ne!(xa, xb);
        assert_ne!(xa, xp);
    }

    #[test]
    fn clipped_mean_band() {
        // E[max(c, Z)] = c*Phi(c) + phi(c), about 0.60 for c = 1/sqrt(2*pi)
        let mut rng = SeededRng::new(1);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let z = rng.clipped_standard_normal();
            assert!(z >= CLIP_FLOOR - 1e-15);
            sum += z;
        }
        let mean = sum / n as f64;
        assert!((0.55..=0.65).contains(&mean), "mean {mean}");
    }

    #[test]
    fn categorical_respects_mass() {
        let mut rng = SeededRng::new(3);
        let probs = [0.0, 1.0, 0.0];
        for _ in 0..100 {
            assert_eq!(rng.categorical(&probs), 1);
        }
    }
}
