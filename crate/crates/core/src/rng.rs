use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Portable, seed-deterministic generator used everywhere in the crate.
pub type Rng = ChaCha8Rng;

/// Independent streams derived from one seed, one per purpose.
pub mod stream {
    pub const SPLIT: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const GENERATOR: u64 = 3;
    pub const INIT_PREDICTOR: u64 = 4;
    pub const INIT_CLASSIFIER: u64 = 5;
    pub const NEGATIVES: u64 = 6;
    pub const DROPOUT: u64 = 7;
    pub const SWEEP: u64 = 8;
}

pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
