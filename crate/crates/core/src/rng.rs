//! Seeded random number generation shared by the noise-injection and
//! ensemble machinery.
//!
//! All randomness in the crate flows through ChaCha12 streams plus an
//! explicit Box-Muller transform, so that seeded outputs stay bit-identical
//! across platforms and dependency upgrades.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub fn seeded(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of the generator for `seed`. Used for
/// ensemble members so that results do not depend on scheduling order.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in the half-open interval (0, 1].
fn uniform_open(rng: &mut ChaCha12Rng) -> f64 {
    // 53 random mantissa bits; +1 keeps the value strictly positive.
    ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
}

/// One standard-normal draw via the Box-Muller transform.
///
/// Two uniforms are consumed per draw (the second transform output is
/// discarded); trading a little speed for a stream layout that is trivial
/// to document and reproduce.
pub fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
    let u1 = uniform_open(rng);
    let u2 = uniform_open(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A vector of standard-normal draws.
pub fn normal_vec(rng: &mut ChaCha12Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| standard_normal(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = normal_vec(&mut seeded(42), 64);
        let b = normal_vec(&mut seeded(42), 64);
        assert_eq!(a, b);
    }

    #[test]
    fn substreams_differ() {
        let a = normal_vec(&mut seeded_stream(1, 0), 16);
        let b = normal_vec(&mut seeded_stream(1, 1), 16);
        assert_ne!(a, b);
    }

    #[test]
    fn normal_moments_roughly_standard() {
        let xs = normal_vec(&mut seeded(7), 20_000);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }
}
