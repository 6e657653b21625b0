//! Counter-addressed random streams.
//!
//! Every replicate draws from its own ChaCha8 stream, addressed by
//! `(master seed, purpose, grid index, replicate index)`. The stream is a
//! pure function of that address, so results do not depend on how work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const REP_BITS: u32 = 40;
const GRID_BITS: u32 = 16;

/// Address of one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub purpose: u8,
    pub grid_index: u32,
    pub replicate: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, purpose: u8, grid_index: u32, replicate: u64) -> Self {
        assert!(grid_index < (1 << GRID_BITS), "grid index overflows stream layout");
        assert!(replicate < (1 << REP_BITS), "replicate index overflows stream layout");
        Self { master_seed, purpose, grid_index, replicate }
    }

    pub fn stream_id(&self) -> u64 {
        ((self.purpose as u64) << (REP_BITS + GRID_BITS))
            | ((self.grid_index as u64) << REP_BITS)
            | self.replicate
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id());
        rng
    }
}

/// Stream purposes, kept distinct so unrelated consumers never overlap.
pub mod purpose {
    pub const BINOMIAL: u8 = 1;
    pub const POISSON: u8 = 2;
    pub const LIMIT: u8 = 3;
    pub const PALM: u8 = 4;
    pub const KUBOTA: u8 = 5;
    pub const ANGLE: u8 = 6;
    pub const HULL_ORDER: u8 = 7;
    pub const DIAGNOSTIC: u8 = 8;
    pub const WINDOW: u8 = 9;
}

/// Convenience: RNG for a single replicate.
pub fn stream(master_seed: u64, purpose: u8, grid_index: u32, replicate: u64) -> StreamRng {
    StreamKey::new(master_seed, purpose, grid_index, replicate).rng()
}
