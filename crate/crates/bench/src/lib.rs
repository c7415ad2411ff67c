//! Shared fixtures for the benchmarks.

use ietshrink::rotations::{golden, rotation_iet};
use ietshrink::sample::sample_random_iet;
use ietshrink::Iet;

/// A rational 4-IET with denominator close to `2^62`, on the fast path.
pub fn large_rational(seed: u64) -> Iet {
    sample_random_iet(4, (1 << 62) + 12_345, seed).expect("valid sampler parameters")
}

/// A rational IET with a moderate denominator, cheap in exact arithmetic.
pub fn small_rational(d: usize, seed: u64) -> Iet {
    sample_random_iet(d, 1_000_003, seed).expect("valid sampler parameters")
}

pub fn golden_rotation() -> Iet {
    rotation_iet(&golden()).expect("golden angle is in (0, 1)")
}
