//! Seeded random streams.
//!
//! Topologies use `ChaCha8Rng::seed_from_u64(seed)`. Sweep draws use one
//! independent ChaCha8 stream per `(seed, e_index, node, attempt)`: the four
//! words are written little-endian into the 32-byte key, so a stream depends
//! only on its coordinates and never on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn substream(seed: u64, e_index: u64, node: u64, attempt: u64) -> StreamRng {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([seed, e_index, node, attempt]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn head(mut rng: StreamRng) -> Vec<u64> {
        (0..4).map(|_| rng.gen()).collect()
    }

    #[test]
    fn substreams_are_reproducible() {
        assert_eq!(head(substream(7, 1, 2, 3)), head(substream(7, 1, 2, 3)));
    }

    #[test]
    fn every_coordinate_matters() {
        let base = head(substream(7, 1, 2, 3));
        assert_ne!(base, head(substream(8, 1, 2, 3)));
        assert_ne!(base, head(substream(7, 0, 2, 3)));
        assert_ne!(base, head(substream(7, 1, 5, 3)));
        assert_ne!(base, head(substream(7, 1, 2, 0)));
        // no aliasing between swapped coordinates
        assert_ne!(head(substream(7, 2, 1, 3)), base);
    }

    #[test]
    fn seeded_is_stable() {
        let mut a = seeded(42);
        let mut b = seeded(42);
        assert_eq!(a.gen::<u64>(), b.gen::<u64>());
    }
}
