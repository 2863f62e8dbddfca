//! Deterministic per-trial random streams.
//!
//! Parallel trials must be reproducible regardless of scheduling order, so
//! every trial gets its own counter-based stream derived from the root
//! seed and the trial index.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The stream type used by all samplers and drivers.
pub type TrialRng = ChaCha8Rng;

/// Stream for one trial: same `(root_seed, trial)` always yields the same
/// sequence, and distinct trials never overlap.
pub fn trial_rng(root_seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(trial);
    rng
}
