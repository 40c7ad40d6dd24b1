//! Seeded sampling with a documented, stable sequence.
//!
//! Every draw comes from ChaCha8 seeded with `seed_from_u64(seed)` and then
//! switched to a per-purpose stream ([`Stream`]), so changing one pool size
//! never shifts the draws made for another pool.
//!
//! * `below(n)` takes `next_u64()` values, rejecting those at or above the
//!   largest multiple of `n`, and returns the value modulo `n`.
//! * `sample_indices(n, k)` runs a partial Fisher-Yates shuffle over
//!   `0..n` (swap position `i` with `i + below(n - i)` for `i in 0..k`) and
//!   returns the first `k` entries sorted ascending, i.e. in document order.
//!
//! The sequence is part of the suite compatibility contract: changing it
//! changes every generated suite.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Independent draw streams, one per sampling purpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Drugs = 1,
    Ades = 2,
    MildAdes = 3,
    SingleTime = 4,
    RelationalPairs = 5,
    Variations = 6,
}

pub struct SeededSampler {
    rng: ChaCha8Rng,
}

impl SeededSampler {
    pub fn new(seed: u64, stream: Stream) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64);
        SeededSampler { rng }
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "cannot sample below 0");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.rng.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// `k` distinct indices from `0..n`, ascending. Panics if `k > n`.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "sample of {k} from {n}");
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx.sort_unstable();
        idx
    }

    /// A uniformly shuffled order of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..n.saturating_sub(1) {
            let j = i + self.below((n - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx
    }

    /// `k` items of `pool` without replacement, in pool order.
    pub fn sample<T: Clone>(&mut self, pool: &[T], k: usize) -> Vec<T> {
        self.sample_indices(pool.len(), k)
            .into_iter()
            .map(|i| pool[i].clone())
            .collect()
    }
}
