//! Seeded draw stream shared by stochastic baselines and fault injection.
//!
//! Contract, so other implementations can reproduce outputs bit for bit:
//! the generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`
//! (PCG32 seed expansion, rand_core 0.10), and an index in `0..len` is
//! `(next_u64() as u128 * len as u128) >> 64`.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct DrawStream(ChaCha8Rng);

impl DrawStream {
    pub fn new(seed: u64) -> Self {
        DrawStream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform index in `0..len`. `len` must be non-zero.
    pub fn index(&mut self, len: usize) -> usize {
        debug_assert!(len > 0);
        ((self.0.next_u64() as u128 * len as u128) >> 64) as usize
    }

    /// First `k` entries of a seeded partial Fisher-Yates shuffle of `0..n`, sorted.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index(n - i);
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx.sort_unstable();
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = DrawStream::new(7);
        let mut b = DrawStream::new(7);
        let xa: Vec<usize> = (0..100).map(|_| a.index(13)).collect();
        let xb: Vec<usize> = (0..100).map(|_| b.index(13)).collect();
        assert_eq!(xa, xb);
        assert!(xa.iter().all(|&i| i < 13));
    }

    #[test]
    fn subset_is_distinct_and_sized() {
        let s = DrawStream::new(1).subset(50, 10);
        assert_eq!(s.len(), 10);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(DrawStream::new(1).subset(5, 9), vec![0, 1, 2, 3, 4]);
    }
}
