//! Seed discipline.
//!
//! Every replication derives its generators from `(master seed, replication)`
//! and a [`Substream`] tag. ChaCha is counter based, so each tag maps to a
//! disjoint stream of the same key: environment noise, covariates and policy
//! exploration never share draws, and two policies run on the same
//! replication face the same customers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Substream {
    Covariates,
    MarketNoise,
    PolicyExploration,
    PolicyInternal,
    Adversary,
    Sampling,
    Data,
}

impl Substream {
    fn id(self) -> u64 {
        match self {
            Substream::Covariates => 1,
            Substream::MarketNoise => 2,
            Substream::PolicyExploration => 3,
            Substream::PolicyInternal => 4,
            Substream::Adversary => 5,
            Substream::Sampling => 6,
            Substream::Data => 7,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-replication key: `hash(master, replication)`.
pub fn replication_seed(master: u64, replication: usize) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(replication as u64 ^ 0xD1B5_4A32_D192_ED03))
}

pub fn stream(master: u64, replication: usize, substream: Substream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(master, replication));
    rng.set_stream(substream.id());
    rng
}

/// Uniform draw on the open interval (0, 1).
pub fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
