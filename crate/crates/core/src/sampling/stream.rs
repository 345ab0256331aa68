//! Counter-based random streams keyed by (master seed, stream id).
//!
//! A stream is ChaCha8 seeded from the master seed with the ChaCha stream
//! word set to the stream id, so streams are independent and reproducible
//! across platforms. Harness code derives stream ids with [`stream_id`].

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Purpose tags mixed into stream ids.
pub mod purpose {
    pub const SAMPLE: u64 = 0x01;
    pub const REFERENCE: u64 = 0x02;
    pub const BROWNIAN: u64 = 0x03;
    pub const SMALL_JUMPS: u64 = 0x04;
    pub const BIG_JUMPS: u64 = 0x05;
    pub const SURROGATE: u64 = 0x06;
    pub const BOOTSTRAP: u64 = 0x07;
    pub const PROBE: u64 = 0x08;
    pub const NULL_REFERENCE: u64 = 0x09;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream id for one (replicate, step, purpose) triple.
pub fn stream_id(replicate: u64, step: u64, purpose_tag: u64) -> u64 {
    let a = splitmix64(replicate);
    let b = splitmix64(a ^ step.rotate_left(21));
    splitmix64(b ^ purpose_tag.rotate_left(42))
}

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        RngStream { master_seed, stream_id, rng }
    }

    pub fn for_task(master_seed: u64, replicate: u64, step: u64, purpose_tag: u64) -> Self {
        Self::new(master_seed, stream_id(replicate, step, purpose_tag))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.normal();
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
