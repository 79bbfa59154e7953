//! The seeded generator used everywhere randomness is needed.

use rand::SeedableRng;

/// ChaCha with 8 rounds, seeded through `SeedableRng::seed_from_u64`.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Identifier recorded in run reports so a run can be reproduced.
pub const RNG_ALGORITHM: &str = "rand_chacha::ChaCha8Rng/seed_from_u64";

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
