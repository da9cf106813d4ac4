//! Seeded, block-partitioned random streams.
//!
//! A run of `n` draws is cut into fixed blocks of [`BLOCK_LEN`] values. Block
//! `i` is produced by a ChaCha20 generator keyed from the run seed with its
//! stream id set to `i`, so the output is a pure function of `(seed, n)` no
//! matter how many threads generate it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

/// Values per independently-seeded block.
pub const BLOCK_LEN: usize = 1 << 16;

/// Identifier of the generator layout, recorded in every manifest.
pub const PRNG_ID: &str = "chacha20-seed_from_u64-stream-per-65536-block";

/// Generator for block `stream` of the run keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform variate on the open interval (0, 1) with 53 random bits.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Fills `n` values by calling `draw` on the per-block generators in
/// parallel.
pub fn generate<F>(seed: u64, n: usize, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha20Rng) -> f64 + Sync,
{
    let mut out = vec![0.0; n];
    out.par_chunks_mut(BLOCK_LEN)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut rng = stream_rng(seed, block as u64);
            for slot in chunk.iter_mut() {
                *slot = draw(&mut rng);
            }
        });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_unit_stays_inside() {
        let mut rng = stream_rng(7, 0);
        for _ in 0..100_000 {
            let u = open_unit(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn blocks_are_prefix_stable() {
        let a = generate(42, BLOCK_LEN + 10, open_unit);
        let b = generate(42, 2 * BLOCK_LEN, open_unit);
        assert_eq!(a[..], b[..BLOCK_LEN + 10]);
    }

    #[test]
    fn independent_of_thread_count() {
        let n = 3 * BLOCK_LEN + 5;
        let par = generate(9, n, open_unit);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| generate(9, n, open_unit));
        assert_eq!(par, single);
    }

    #[test]
    fn streams_differ() {
        let a: Vec<u64> = {
            let mut r = stream_rng(1, 0);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = stream_rng(1, 1);
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_ne!(a, b);
    }
}
