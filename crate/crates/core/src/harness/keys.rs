//! Correlated key pairs over a binary symmetric channel.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub alice: Vec<u8>,
    /// `alice` with each bit flipped independently with probability `qber`.
    pub bob: Vec<u8>,
    pub errors: usize,
}

/// Uniform key for Alice and a BSC(`qber`) copy for Bob; deterministic in
/// `seed`.
pub fn generate_key_pair(n_payload: usize, qber: f64, seed: u64) -> Result<KeyPair, HarnessError> {
    if !(0.0..0.5).contains(&qber) {
        return Err(HarnessError::Config(format!(
            "qber {qber} outside [0, 0.5)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alice: Vec<u8> = (0..n_payload).map(|_| rng.random_range(0..2u8)).collect();
    let mut errors = 0;
    let bob = alice
        .iter()
        .map(|&a| {
            let flip = rng.random_bool(qber);
            errors += flip as usize;
            a ^ flip as u8
        })
        .collect();
    Ok(KeyPair { alice, bob, errors })
}
