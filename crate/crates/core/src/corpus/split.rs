use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Shuffle with a seeded generator, then put the first `ceil(n/2)` items in
/// the training half and the rest in the test half.
pub fn split_dataset<T: Clone>(items: &[T], seed: u64) -> (Vec<T>, Vec<T>) {
    let mut shuffled = items.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = shuffled.split_off(items.len().div_ceil(2));
    (shuffled, test)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves() {
        let items: Vec<u32> = (0..1500).collect();
        let (train, test) = split_dataset(&items, 3);
        assert_eq!((train.len(), test.len()), (750, 750));

        let (train, test) = split_dataset(&[7], 3);
        assert_eq!((train, test), (vec![7], vec![]));

        let (train, test) = split_dataset(&[1, 2, 3], 3);
        assert_eq!((train.len(), test.len()), (2, 1));
    }

    #[test]
    fn same_seed_same_split() {
        let items: Vec<u32> = (0..100).collect();
        assert_eq!(split_dataset(&items, 9), split_dataset(&items, 9));
        assert_ne!(split_dataset(&items, 9), split_dataset(&items, 10));
    }
}
