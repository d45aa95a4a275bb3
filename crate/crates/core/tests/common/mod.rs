//! Reference values for the default backend (raw DEFLATE, level 9, miniz_oxide),
//! produced by `cargo run --release --example freeze_goldens`.
#![allow(dead_code)]

/// Compressed length of the blob of an empty dataset.
pub const EMPTY_BODY_K: u64 = 8;
/// `estimate_bytes(b"")`.
pub const EMPTY_BYTES_K: u64 = 5;

/// 2^20 single-column bits.
pub const CONSTANT_BITS_K: u64 = 22_414;
pub const ALTERNATING_BITS_K: u64 = 28_010;
pub const RANDOM_BITS_SEED7_K: u64 = 257_638;
pub const BITS_RAW_LEN: u64 = 11_534_345;

/// `hypercube(100, 3000, 11)` and the 201 x 63 parametric curve with n = 100.
pub const HYPERCUBE_SEED11_K_FULL: u64 = 1_146_041;
pub const CURVE_K_FULL: u64 = 163_065;

/// Reference light-cone manifest: m = 40000, seed 3, epsilon 0.
pub const LIGHTCONE_M: usize = 40_000;
pub const LIGHTCONE_SEED: u64 = 3;
pub const LIGHTCONE_FULL_K: u64 = 640_547;
pub const LIGHTCONE_INSIDE_K: u64 = 84_827;
pub const LIGHTCONE_OUTSIDE_K: u64 = 556_338;

/// Geometric mean of the inside and full golden values.
pub fn filter_threshold() -> u64 {
    ((LIGHTCONE_INSIDE_K as f64) * (LIGHTCONE_FULL_K as f64)).sqrt().round() as u64
}
