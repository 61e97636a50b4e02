//! SplitMix64, the seeded generator behind every random choice in the crate.
//!
//! The generator is fixed (rather than pluggable) so that a `(p, seed)` pair
//! names exactly one key on every platform and in every language binding.

/// SplitMix64 over a single 64-bit state word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[0, bound)`.
    ///
    /// Draws below `2^64 mod bound` are rejected, so every residue class is hit
    /// by exactly `floor(2^64 / bound)` raw outputs.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }

    /// The `index`-th output (0-based) of a fresh generator seeded with `seed`.
    pub fn nth_output(seed: u64, index: u64) -> u64 {
        let mut g = SplitMix64 {
            state: seed.wrapping_add(index.wrapping_mul(Self::GAMMA)),
        };
        g.next_u64()
    }
}
