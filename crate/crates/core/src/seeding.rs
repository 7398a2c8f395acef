//! Deterministic seed derivation.
//!
//! A single user-facing seed fans out to per-pair and per-stage streams
//! through a counter-based SplitMix64 scheme: stream `k` of master seed `s`
//! is `mix(s + (k + 1) * GOLDEN)`. Results therefore do not depend on
//! execution order, so parallel and serial runs agree.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Seed for stream `stream` of master seed `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix(master.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// FNV-1a hash of the exact bit patterns of a float column.
///
/// Used to derive jitter seeds from column content rather than column
/// position, so swapping the two columns of a pair leaves each column's
/// jitter unchanged.
pub fn column_fingerprint(values: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    h
}
