//! Deterministic random streams for partitioned Monte-Carlo work.
//!
//! Every partition of a scan draws from its own ChaCha stream keyed by
//! `(seed, domain)` and selected by the partition index, so results do not
//! depend on how partitions are scheduled across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Stream domains. Distinct scans never share a key.
pub mod domain {
    pub const LETTER_B: u64 = 1;
    pub const LETTER_B_PRIME: u64 = 2;
    pub const CHANNEL: u64 = 3;
    pub const AFFINITY: u64 = 4;
    pub const AFFINE_EXTENSION: u64 = 5;
    pub const GLEASON: u64 = 6;
    pub const SEARCH: u64 = 7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for partition `index` of `domain`.
    pub fn stream(&self, domain: u64, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&domain.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }
}

/// Maps `f` over `0..count`, in parallel when `workers > 1`. Output order is
/// always index order.
pub fn par_map<T, F>(workers: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        Err(_) => (0..count).map(f).collect(),
    }
}

/// Splits `total` items into consecutive `(start, len)` partitions of at most
/// `size` items.
pub fn partitions(total: usize, size: usize) -> Vec<(usize, usize)> {
    let size = size.max(1);
    (0..total)
        .step_by(size)
        .map(|start| (start, size.min(total - start)))
        .collect()
}
