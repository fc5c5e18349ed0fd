//! Seed derivation for independent deterministic random streams.

/// SplitMix64 finalizer: a bijective 64-bit mix with good avalanche.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a stream label. Distinct labels
/// give statistically independent streams under the same base seed.
pub fn mix(seed: u64, label: u64) -> u64 {
    splitmix(seed ^ splitmix(label))
}
