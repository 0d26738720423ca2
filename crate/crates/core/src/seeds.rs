//! Role-tagged seed derivation.
//!
//! Every random stream is keyed by `(master seed, role, index)`, so adding a
//! trial or a stratum never shifts the randomness of the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Role {
    Stratum = 1,
    Host = 2,
    Guest = 3,
    GuestFamily = 4,
    Sample = 5,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, role: Role, index: u64) -> u64 {
    splitmix(splitmix(splitmix(master) ^ role as u64) ^ index)
}

pub fn stream(master: u64, role: Role, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, role, index))
}
