//! Seeded train/validation split.

use crate::nn::rng::RngStream;

/// Shuffle `0..n` with a stream derived from `seed` and cut after
/// `floor(ratio * n)`: the prefix trains, the suffix validates. The same
/// inputs always produce the same split.
pub fn split_indices(n: usize, ratio: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    debug_assert!((0.0..=1.0).contains(&ratio), "split ratio {ratio}");
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = RngStream::new(seed).derive("split");
    rng.shuffle(&mut idx);
    let cut = (ratio * n as f64).floor() as usize;
    let val = idx.split_off(cut);
    (idx, val)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_the_index_range() {
        let (train, val) = split_indices(103, 0.8, 7);
        assert_eq!(train.len(), 82); // floor(0.8 * 103)
        assert_eq!(val.len(), 21);
        let mut all: Vec<usize> = train.iter().chain(val.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..103).collect::<Vec<_>>());
    }

    #[test]
    fn is_deterministic_and_seed_sensitive() {
        assert_eq!(split_indices(50, 0.8, 3), split_indices(50, 0.8, 3));
        assert_ne!(split_indices(50, 0.8, 3).0, split_indices(50, 0.8, 4).0);
    }

    #[test]
    fn boundary_ratios() {
        let (train, val) = split_indices(10, 1.0, 0);
        assert_eq!((train.len(), val.len()), (10, 0));
        let (train, val) = split_indices(10, 0.0, 0);
        assert_eq!((train.len(), val.len()), (0, 10));
        // floor, not round: 0.85 * 7 = 5.95 -> 5.
        let (train, _) = split_indices(7, 0.85, 0);
        assert_eq!(train.len(), 5);
    }
}
