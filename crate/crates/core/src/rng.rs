//! Seeding. Every random draw in the crate comes from a ChaCha8 stream (rand_chacha 0.9)
//! keyed by a [`Seed`] and a stream number, so results do not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream numbers reserved for the simulation stages.
pub mod streams {
    pub const COMPLETE_DATA: u64 = 1;
    pub const RESPONSES: u64 = 2;
}

/// Labels used to derive independent seeds per estimator.
pub mod labels {
    pub const CHAINED: u64 = 0x4d49;
    pub const CHAINED_WITH_INDICATORS: u64 = 0x4d495249;
    pub const DECOMPOSABLE: u64 = 0x4445434f;
    pub const PLUG_IN: u64 = 0x504c5547;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self, stream: u64) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }

    /// Seed for a sub-task, mixed with the SplitMix64 finalizer.
    pub fn derive(self, label: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(label.wrapping_mul(0x9e37_79b9_7f4a_7c15))
            .wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        Seed(z ^ (z >> 31))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}
