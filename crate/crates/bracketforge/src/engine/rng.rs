//! Deterministic random streams for match sampling.
//!
//! The generator is SplitMix64. A replication's stream is seeded with
//! `mix(master_seed + (rep + 1) * 0x9E3779B97F4A7C15)` where `mix` is the
//! SplitMix64 finalizer, so replication `r` produces the same draws no
//! matter how replications are partitioned across workers. Within a stream,
//! draws are consumed in a fixed documented order: static formats sample
//! matches in topological order; dynamic formats run rounds in order,
//! random-draw rounds consume their shuffle draws before any match draw.
//! This derivation is a compatibility contract and must not change between
//! releases.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the stream driving replication `rep` of a run keyed by
/// `master_seed`.
pub fn replication_seed(master_seed: u64, rep: u64) -> u64 {
    mix(master_seed.wrapping_add((rep + 1).wrapping_mul(GOLDEN_GAMMA)))
}

/// SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform draw in `[0, n)` by modulo rejection.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// Fisher-Yates shuffle; uniform over permutations.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below((i + 1) as u64) as usize;
            items.swap(i, j);
        }
    }
}
