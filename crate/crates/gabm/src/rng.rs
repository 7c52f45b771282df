//! Seeded random sources.
//!
//! The world keeps one serializable ChaCha stream for everything that must
//! replay from a checkpoint (persona sampling, contact pairing, transmission
//! draws). Decision backends get their own per-(day, agent) streams derived
//! arithmetically from the run seed, so the decision phase can run in any
//! order — or concurrently — without perturbing the world stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic, serializable random source used by the engine.
pub type SimRng = ChaCha8Rng;

/// Build the world stream for a run seed.
pub fn world_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive the decision stream for one agent on one day.
///
/// Stable across platforms and independent of evaluation order.
pub fn decision_rng(seed: u64, day: u32, agent_id: u32) -> SimRng {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ u64::from(day));
    h = splitmix64(h ^ u64::from(agent_id));
    ChaCha8Rng::seed_from_u64(h)
}

/// SplitMix64 finalizer; used only for seed derivation.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
