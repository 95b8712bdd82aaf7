//! Seeded random streams. Every restart, replica or role draws from its own
//! ChaCha stream, so results do not depend on how work is spread over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub use rand::Rng;

/// Stable sub-seed for a named role.
pub fn derive_seed(seed: u64, role: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(role.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

/// Stream `id` of the generator for (`seed`, `role`).
pub fn stream(seed: u64, role: &str, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(derive_seed(seed, role));
    r.set_stream(id);
    r
}

pub fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen::<bool>() as u8).collect()
}
