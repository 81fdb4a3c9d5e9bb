//! SplitMix64, the generator behind every arrival stream.
//!
//! ```text
//! state  <- state + 0x9E3779B97F4A7C15            (mod 2^64)
//! z      <- state
//! z      <- (z xor (z >> 30)) * 0xBF58476D1CE4E5B9 (mod 2^64)
//! z      <- (z xor (z >> 27)) * 0x94D049BB133111EB (mod 2^64)
//! output <- z xor (z >> 31)
//! ```
//!
//! A uniform draw in (0, 1) takes the top 52 bits of one output:
//! `u = ((x >> 12) + 0.5) * 2^-52`. Every such value is exact in an f64 and
//! lies strictly between 0 and 1; with 53 bits the largest value would round
//! up to 1. An exponential
//! draw with rate `r` is `-ln(u) / r`.
//!
//! Stream `i` of a run with seed `s` starts from state `s xor i`. Streams
//! are numbered in scenario order: consumers as listed, and within a
//! consumer its services in ascending id order.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn stream(seed: u64, index: u64) -> Self {
        Self::new(seed ^ index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in the open interval (0, 1).
    pub fn next_open01(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
        ((self.next_u64() >> 12) as f64 + 0.5) * SCALE
    }

    /// Exponentially distributed with the given rate; `rate` must be positive.
    pub fn next_exp(&mut self, rate: f64) -> f64 {
        -self.next_open01().ln() / rate
    }
}
