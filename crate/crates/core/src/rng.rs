//! Counter-based random streams.
//!
//! Every stream is a ChaCha20 keystream whose key packs `(seed, energy,
//! purpose)` and whose 64-bit stream id is the replication index. Two
//! replications never share a keystream, and a stream's output does not
//! depend on which thread consumes it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// What a stream is used for; part of the key so that, say, bootstrap
/// resampling never reuses the field amplitudes' keystream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Field = 1,
    Bootstrap = 2,
    Validation = 3,
}

/// Stream for `(seed, energy, purpose, index)`.
pub fn stream(seed: u64, energy: f64, purpose: Purpose, index: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&energy.to_bits().to_le_bytes());
    key[16..24].copy_from_slice(&(purpose as u64).to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Amplitude stream of replication `replication` at `energy`.
pub fn replication_stream(seed: u64, energy: f64, replication: u64) -> ChaCha20Rng {
    stream(seed, energy, Purpose::Field, replication)
}
