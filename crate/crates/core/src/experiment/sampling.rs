//! Seeded sampling.
//!
//! Sample `i` of a run with seed `s` draws from ChaCha8 keyed by
//! `SHA-256(s as u64 LE || i as u64 LE)`. Streams are therefore independent of
//! each other and of the order in which samples are processed.

use num_bigint::{BigInt, BigUint};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::numerics::{NumericsConfig, Scalar};

/// The generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(index.to_le_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Uniform integer in `0..n`.
///
/// Multiply-shift on one 64-bit draw; the bias is below `n / 2^64`.
pub fn below<R: RngCore>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0, "empty range");
    ((rng.next_u64() as u128 * n as u128) >> 64) as u64
}

/// Uniform integer in `lo..=hi`.
pub fn between<R: RngCore>(rng: &mut R, lo: u64, hi: u64) -> u64 {
    lo + below(rng, hi - lo + 1)
}

/// `P` uniform random bits as the dyadic `M / 2^P ∈ [0, 1)`.
pub fn random_dyadic<S: Scalar, R: RngCore>(rng: &mut R, cfg: &NumericsConfig) -> S {
    let bits = cfg.precision_bits();
    let words = bits.div_ceil(64) as usize;
    let mut digits: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
    let spare = 64 * words as u32 - bits;
    if spare > 0 {
        let last = digits.last_mut().expect("at least one word");
        *last >>= spare;
    }
    let mantissa = BigInt::from(BigUint::from_slice(
        &digits
            .iter()
            .flat_map(|d| [*d as u32, (*d >> 32) as u32])
            .collect::<Vec<_>>(),
    ));
    S::from_big_ratio(&mantissa, &(BigInt::from(1) << bits), cfg)
}

/// The `α` of sample `index`.
pub fn sample_alpha<S: Scalar>(seed: u64, index: u64, cfg: &NumericsConfig) -> S {
    random_dyadic(&mut sample_rng(seed, index), cfg)
}
