//! Keyed random streams and index resampling.
//!
//! Resample `r` always draws from the ChaCha8 stream `(seed, r)`, so the set
//! of replicates does not depend on how the work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Generator for one resample.
pub fn keyed_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Fills `out` with `n` unit indices drawn uniformly with replacement.
pub fn draw_indices<R: Rng>(rng: &mut R, n: usize, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..n).map(|_| rng.gen_range(0..n)));
}

/// Statistic evaluated on each of `resamples` index resamples of `0..n`.
/// Output order is resample order.
pub fn replicates<F>(n: usize, resamples: usize, seed: u64, statistic: F) -> Vec<f64>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    (0..resamples)
        .into_par_iter()
        .map_init(Vec::new, |idx, r| {
            let mut rng = keyed_stream(seed, r as u64);
            draw_indices(&mut rng, n, idx);
            statistic(idx)
        })
        .collect()
}

/// Leave-one-out values of the statistic, in unit order.
pub fn jackknife<F>(n: usize, statistic: F) -> Vec<f64>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|left_out| {
            let idx: Vec<usize> = (0..n).filter(|&i| i != left_out).collect();
            statistic(&idx)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_keyed() {
        let a: Vec<u32> = (0..4).map(|_| keyed_stream(7, 3).gen()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = keyed_stream(7, 3).gen();
        let y: u64 = keyed_stream(7, 4).gen();
        let z: u64 = keyed_stream(8, 3).gen();
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn replicate_order_is_resample_order() {
        let reps = replicates(5, 50, 1, |idx| idx.iter().sum::<usize>() as f64);
        for (r, v) in reps.iter().enumerate() {
            let mut rng = keyed_stream(1, r as u64);
            let mut idx = Vec::new();
            draw_indices(&mut rng, 5, &mut idx);
            assert_eq!(*v, idx.iter().sum::<usize>() as f64);
        }
    }

    #[test]
    fn jackknife_leaves_each_unit_out() {
        let jk = jackknife(4, |idx| idx.iter().sum::<usize>() as f64);
        assert_eq!(jk, vec![6.0, 5.0, 4.0, 3.0]);
    }
}
