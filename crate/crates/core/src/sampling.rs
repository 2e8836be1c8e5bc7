//! Reproducible sample points for numeric identity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::VarSpace;

pub const DEFAULT_SAMPLE_COUNT: usize = 64;
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// `count` points drawn uniformly from `[-1, 1]^{2n+1}`, ordered `(x, p, t)`.
pub fn sample_points(space: VarSpace, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..space.var_count())
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect()
        })
        .collect()
}

/// Sample `hbar` values in `[0.1, 1]`, one per point, from the same seed stream.
pub fn sample_hbars(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..count).map(|_| rng.random_range(0.1..=1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let sp = VarSpace::new(2);
        let a = sample_points(sp, 16, 7);
        assert_eq!(a, sample_points(sp, 16, 7));
        assert_ne!(a, sample_points(sp, 16, 8));
        assert!(a.iter().all(|p| p.len() == 5 && p.iter().all(|v| v.abs() <= 1.0)));
    }
}
