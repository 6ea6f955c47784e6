//! Seed derivation.
//!
//! Every random draw in a simulation is a pure function of
//! `(master_seed, component_id, step)`. A component id names one stochastic
//! source (the point stream of the interval world, arm `i`'s reward bits, ...)
//! so replaying a run with the same seed and action sequence reproduces every
//! observation regardless of what else was sampled.
//!
//! The mixer is the SplitMix64 finalizer applied in a chain:
//! `h = fmix(fmix(fmix(master ^ GOLDEN) ^ component * K1) ^ step * K2)`.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const K1: u64 = 0xBF58_476D_1CE4_E5B9;
const K2: u64 = 0x94D0_49BB_1331_11EB;

#[inline]
pub fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(K1);
    z = (z ^ (z >> 27)).wrapping_mul(K2);
    z ^ (z >> 31)
}

/// 64-bit substream seed for `(master, component, step)`.
#[inline]
pub fn derive_seed(master: u64, component: u64, step: u64) -> u64 {
    let a = fmix64(master ^ GOLDEN);
    let b = fmix64(a ^ component.wrapping_mul(K1).wrapping_add(GOLDEN));
    fmix64(b ^ step.wrapping_mul(K2).wrapping_add(K1))
}

/// Seed for replica `k` of a run with the given master seed.
pub fn replica_seed(master: u64, k: u64) -> u64 {
    derive_seed(master, u64::MAX, k)
}

/// Uniform in `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Single uniform draw for `(master, component, step)`.
#[inline]
pub fn uniform(master: u64, component: u64, step: u64) -> f64 {
    unit_from_bits(derive_seed(master, component, step))
}

/// SplitMix64 generator, used when a sampler needs more than one word.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn for_step(master: u64, component: u64, step: u64) -> Self {
        SplitMix64::new(derive_seed(master, component, step))
    }

    pub fn next_unit(&mut self) -> f64 {
        unit_from_bits(self.next_u64())
    }
}

impl RngCore for SplitMix64 {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        fmix64(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
