//! Deterministic seed derivation for independent random substreams.
//!
//! Every stochastic component (coefficient path, regressors, errors,
//! bootstrap multipliers, replications) draws from a ChaCha stream whose
//! key is derived from a master seed plus a tag path. Substreams are
//! therefore reproducible regardless of thread count or evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags namespacing the derived substreams.
pub mod stream {
    pub const TVP_PATH: u64 = 0x01;
    pub const REGRESSOR: u64 = 0x02;
    pub const ERROR: u64 = 0x03;
    pub const BOOTSTRAP: u64 = 0x04;
    pub const THRESHOLD: u64 = 0x05;
    pub const MIXTURE: u64 = 0x06;
    pub const REPLICATION: u64 = 0x07;
    pub const SELECTION: u64 = 0x08;
    pub const FIXTURE: u64 = 0x09;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `master` and a tag path.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = master ^ 0x6A09_E667_F3BC_C908;
    let mut acc = splitmix64(&mut state);
    for &t in tags {
        state ^= t.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        acc ^= splitmix64(&mut state);
    }
    acc
}

/// A ChaCha generator keyed by `master` and a tag path.
pub fn derive_rng(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = derive_seed(master, tags);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_deterministic() {
        let a = derive_seed(42, &[stream::TVP_PATH, 3]);
        let b = derive_seed(42, &[stream::TVP_PATH, 3]);
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_tags_give_distinct_streams() {
        let mut r1 = derive_rng(42, &[stream::REGRESSOR, 0]);
        let mut r2 = derive_rng(42, &[stream::ERROR, 0]);
        let x1: u64 = r1.gen();
        let x2: u64 = r2.gen();
        assert_ne!(x1, x2);
    }

    #[test]
    fn tag_order_matters() {
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
    }
}
