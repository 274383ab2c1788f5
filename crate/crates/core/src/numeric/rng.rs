use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic random stream backed by ChaCha8.
///
/// Child streams are derived from the seed and a string label, never from the
/// parent's draw position, so `split` gives the same child no matter how much
/// of the parent has been consumed.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream identified by `label`.
    pub fn split(&self, label: &str) -> SeededRng {
        SeededRng::new(derive_seed(self.seed, label))
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.inner);
    }

    /// `amount` distinct indices from `0..n`, in draw order.
    pub fn sample_indices(&mut self, n: usize, amount: usize) -> Vec<usize> {
        let mut all: Vec<usize> = (0..n).collect();
        let amount = amount.min(n);
        let (chosen, _) = all.partial_shuffle(&mut self.inner, amount);
        chosen.to_vec()
    }
}

// FNV-1a over the parent seed and label, finished with the SplitMix64 mixer.
fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in seed.to_le_bytes().iter().chain(label.as_bytes()) {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
            assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
    }

    #[test]
    fn split_ignores_parent_position() {
        let root = SeededRng::new(9);
        let mut used = root.clone();
        used.uniform();
        assert_eq!(
            root.split("member-0").uniform(),
            used.split("member-0").uniform()
        );
    }

    #[test]
    fn distinct_labels_give_distinct_streams() {
        let root = SeededRng::new(0);
        let labels = ["a", "b", "member-0", "member-1", "shuffle", "init"];
        let seeds: std::collections::BTreeSet<u64> =
            labels.iter().map(|l| root.split(l).seed()).collect();
        assert_eq!(seeds.len(), labels.len());
        let mut a = root.split("a");
        let mut b = root.split("b");
        let da: Vec<f64> = (0..8).map(|_| a.uniform()).collect();
        let db: Vec<f64> = (0..8).map(|_| b.uniform()).collect();
        assert_ne!(da, db);
    }

    #[test]
    fn sample_indices_distinct() {
        let mut rng = SeededRng::new(5);
        let mut s = rng.sample_indices(40, 30);
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), 30);
        assert_eq!(rng.sample_indices(3, 30).len(), 3);
    }
}
