//! Splittable, counter-based pseudo-random streams.
//!
//! Every random quantity in the toolkit comes from an [`RngStream`], a
//! SplitMix64-style generator addressed by a 64-bit key and a running
//! counter: the n-th output of a stream is `mix64(key + n * GAMMA)` with
//! the SplitMix64 finalizer of Vigna. Child streams are derived by mixing
//! a tag into the parent *key* — never by consuming draws — so a child is
//! identical no matter how much of the parent has been used and no matter
//! in which order siblings are generated. That property is what makes
//! serial and parallel runs produce the same bytes.

use crate::real::Real;

/// Golden-ratio increment from SplitMix64.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Purpose tags keeping the seed domains of the pipeline stages disjoint.
pub mod purpose {
    /// World-model generation.
    pub const SCENARIO: u64 = 0x5343_454e;
    /// Training-cohort simulation.
    pub const COHORT: u64 = 0x434f_484f;
    /// Forest training (bootstrap + feature subsampling).
    pub const TRAINING: u64 = 0x5452_4149;
    /// Policy-evaluation cohort.
    pub const EVALUATION: u64 = 0x4556_414c;
}

/// A deterministic random stream identified by a 64-bit key.
#[derive(Clone, Debug)]
pub struct RngStream {
    key: u64,
    counter: u64,
}

impl RngStream {
    /// Root stream for a master seed.
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ GAMMA),
            counter: 0,
        }
    }

    /// Derive an independent child stream keyed by `tag`.
    ///
    /// Depends only on the parent's key, not on its counter, so deriving
    /// commutes with drawing.
    pub fn derive(&self, tag: u64) -> Self {
        Self {
            key: mix64(self.key ^ mix64(tag.wrapping_add(GAMMA))),
            counter: 0,
        }
    }

    /// Next raw 64-bit draw.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform draw in `[0, 1)` as the working scalar.
    #[inline]
    pub fn next_unit<F: Real>(&mut self) -> F {
        F::from_f64(self.next_f64()).expect("unit draw")
    }

    /// Uniform integer in `[0, n)`. The modulo bias is below `n / 2^64`.
    #[inline]
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }
}
