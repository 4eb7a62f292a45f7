//! Deterministic seed derivation.
//!
//! Every stochastic stage of the pipeline draws from its own stream, derived
//! from the master seed by a fixed label. Re-running one stage therefore
//! never perturbs another, and per-cell streams make results independent of
//! execution order.

use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; stable across platforms and releases.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over the label bytes.
fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed for a named pipeline stage.
pub fn stage_seed(master: u64, label: &str) -> u64 {
    mix(master ^ label_hash(label))
}

/// Seed for a cell within a stage, keyed by two indices (e.g. gamma, window).
pub fn cell_seed(stage: u64, a: u64, b: u64) -> u64 {
    mix(mix(stage ^ mix(a)) ^ mix(b.wrapping_add(0x517c_c1b7_2722_0a95)))
}

/// The RNG used throughout; seeded explicitly, never from the environment.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}
