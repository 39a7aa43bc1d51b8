//! Deterministic, splittable random-number streams.
//!
//! Every sampler in this crate is a pure function of its parameters and an
//! [`RngStream`]. A stream is identified by a 64-bit seed plus a 64-bit
//! stream id; the same pair always reproduces the same sample sequence and
//! distinct stream ids give statistically independent streams (ChaCha
//! counter-based streams). Replicas of a Monte-Carlo experiment each own a
//! stream id, so replica results do not depend on scheduling or thread
//! count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of low bits of the stream id reserved for the replica index.
const REPLICA_BITS: u32 = 48;

/// A reproducible random stream: (seed, stream_id).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    /// Root stream for a seed (stream id 0).
    pub fn new(seed: u64) -> Self {
        RngStream { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Namespaced substream: `domain` selects an experiment side
    /// (matrix, sde, ...), `replica` the Monte-Carlo replica. Distinct
    /// (domain, replica) pairs never collide for replica < 2^48.
    pub fn substream(&self, domain: u16, replica: u64) -> Self {
        debug_assert!(replica < (1u64 << REPLICA_BITS));
        RngStream {
            seed: self.seed,
            stream_id: self.stream_id ^ (((domain as u64) << REPLICA_BITS) | replica),
        }
    }

    /// Instantiate the generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
