//! Reproducible random streams.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`). A run seed keys the
//! generator and each shot owns two streams, so a shot's draws depend only on
//! `(seed, shot index)` and never on scheduling:
//!
//! * stream `2·shot` drives the measurement draw (inverse CDF),
//! * stream `2·shot + 1` drives fault and readout-flip draws.
//!
//! Keeping faults on their own stream means a noise model with all
//! probabilities zero reproduces ideal sampling bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Factory for the per-shot streams of one run.
#[derive(Clone, Debug)]
pub struct ShotStreams {
    base: ChaCha8Rng,
}

impl ShotStreams {
    pub fn new(seed: u64) -> Self {
        ShotStreams {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn measurement(&self, shot: u64) -> ChaCha8Rng {
        self.stream(shot.wrapping_mul(2))
    }

    pub fn faults(&self, shot: u64) -> ChaCha8Rng {
        self.stream(shot.wrapping_mul(2).wrapping_add(1))
    }

    fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(id);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for sub-experiment `label` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    splitmix64(seed ^ splitmix64(label.wrapping_add(0x5851_F42D_4C95_7F2D)))
}
