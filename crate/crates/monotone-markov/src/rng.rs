//! Reproducible randomness streams.
//!
//! Every simulation in this crate draws from a [`RandomnessStream`], which
//! is identified by a `(master_seed, stream_id)` pair. The pair determines
//! the whole draw sequence, so any run can be replayed bit for bit, and
//! distinct stream ids give statistically independent streams. Batch
//! operations hand each work item its own substream derived from the parent
//! id and the item index; the derivation never touches the parent's draw
//! position, so results do not depend on scheduling order.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded, replayable stream of randomness.
#[derive(Clone, Debug)]
pub struct RandomnessStream {
    master_seed: u64,
    stream_id: u64,
    draws: u64,
    rng: ChaCha8Rng,
}

impl RandomnessStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        RandomnessStream {
            master_seed,
            stream_id,
            draws: 0,
            rng,
        }
    }

    /// Child stream for work item `index`. Depends only on
    /// `(master_seed, stream_id, index)`, never on how much the parent has
    /// already been consumed.
    pub fn substream(&self, index: u64) -> Self {
        let child = mix64(self.stream_id ^ mix64(index ^ 0xa076_1d64_78bd_642f));
        RandomnessStream::new(self.master_seed, child)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of raw 64-bit words drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        // 53 random bits, same construction as rand's Standard f64.
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RandomnessStream {
    fn next_u32(&mut self) -> u32 {
        self.draws += 1;
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.draws += 1;
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand_chacha::rand_core::Error> {
        self.draws += 1;
        self.rng.try_fill_bytes(dest)
    }
}

/// SplitMix64 finalizer, used to spread substream indices over the id space.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
