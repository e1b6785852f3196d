//! Deterministic random streams.
//!
//! Every draw in a simulation comes from a stream addressed by
//! (master seed, SNR point, frame, link). The first three select a ChaCha8
//! key and the link selects the ChaCha stream, so adding a link or
//! reordering frames never shifts any other stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one SNR point of a sweep.
pub fn point_seed(master: u64, point: usize) -> u64 {
    splitmix(master ^ splitmix(point as u64 ^ 0x5EED_0000_0000_0000))
}

/// Identifies one link's stream within a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StreamId(pub u64);

/// The streams of one frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameStreams {
    key: [u8; 32],
}

impl FrameStreams {
    pub fn new(point_seed: u64, frame: u64) -> Self {
        let a = splitmix(point_seed);
        let b = splitmix(a ^ frame.wrapping_mul(GOLDEN));
        let c = splitmix(b);
        let d = splitmix(c ^ a);
        let mut key = [0u8; 32];
        for (chunk, word) in key.chunks_exact_mut(8).zip([a, b, c, d]) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        FrameStreams { key }
    }

    pub fn stream(&self, id: StreamId) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(id.0);
        rng
    }
}
