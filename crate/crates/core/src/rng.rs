//! Reproducible random streams.
//!
//! A stream is identified by `(master_seed, stream_index)`. The generator is
//! ChaCha8 keyed by `seed_from_u64(master_seed)` with the ChaCha stream word set
//! to `stream_index`, so streams with distinct indices are independent and the
//! output is byte-identical on every platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Offset added to a trial index to obtain its goal-placement stream.
pub const PLACEMENT_STREAM_OFFSET: u64 = 1 << 32;

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        RngStream {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n` (Lemire's multiply-shift with rejection).
    ///
    /// Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "cannot sample from an empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform index into a slice of length `len`.
    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_identity_equal_output() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ() {
        let a: Vec<u64> = {
            let mut r = RngStream::new(42, 0);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(42, 1);
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_ne!(a, b);
    }

    #[test]
    fn byte_stable_prefix() {
        // Frozen output: guards against silent generator changes.
        let mut r = RngStream::new(0, 0);
        assert_eq!(r.next_u64(), 13080132717333068652);
        assert_eq!(r.next_u64(), 8594738769458413623);
        let mut s = RngStream::new(42, 7);
        assert_eq!(s.next_u64(), 2370525664269707216);
        assert_eq!(s.below(1000), 326);
    }

    #[test]
    fn below_is_roughly_uniform() {
        let mut r = RngStream::new(3, 3);
        let mut counts = [0u32; 6];
        for _ in 0..60_000 {
            counts[r.below(6) as usize] += 1;
        }
        for c in counts {
            assert!((9_500..10_500).contains(&c), "{counts:?}");
        }
    }
}
