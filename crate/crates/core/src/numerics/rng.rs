//! Counter-based random streams: stream k of a master seed is independent of
//! how many other streams were consumed first.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

#[derive(Debug, Clone)]
pub struct RandomStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self { master_seed, stream_index, rng }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Draw from [lo, hi); returns lo when the interval is empty.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite()) {
            return invalid("uniform bounds must be finite");
        }
        if lo > hi {
            return invalid(format!("uniform bounds reversed: {lo} > {hi}"));
        }
        if lo == hi {
            return Ok(lo);
        }
        Ok(Uniform::new(lo, hi).sample(&mut self.rng))
    }
}
