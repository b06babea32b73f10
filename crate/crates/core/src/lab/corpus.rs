//! Seeded random sets and matrices for the property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lexcore::Point;
use crate::setrep::{FiniteSet, VPolytope};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Finite set in `R^n`, `1 ≤ n ≤ max_dim`, with up to `max_points` points.
/// Every other draw uses small integers so sorted views tie often.
pub fn random_finite_set(rng: &mut ChaCha8Rng, max_dim: usize, max_points: usize) -> FiniteSet {
    let n = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(1..=max_points);
    let integer = rng.gen_bool(0.5);
    let points = (0..count)
        .map(|_| {
            let coords = (0..n)
                .map(|_| {
                    if integer {
                        rng.gen_range(-3i32..=3) as f64
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect();
            Point::from_finite(coords)
        })
        .collect();
    FiniteSet::dedup(points).expect("at least one point survives deduplication")
}

/// Matrix with `rows`, `cols` drawn from `min..=max` and entries uniform
/// in `[−1, 1]`, returned as the polytope spanned by its columns.
pub fn random_polytope(
    rng: &mut ChaCha8Rng,
    rows: (usize, usize),
    cols: (usize, usize),
) -> VPolytope {
    let m = rng.gen_range(rows.0..=rows.1);
    let n = rng.gen_range(cols.0..=cols.1);
    let columns = (0..n)
        .map(|_| Point::from_finite((0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect()))
        .collect();
    VPolytope::new(columns).expect("nonempty uniform columns")
}

/// Largest simplex-lattice resolution (capped at `max_resolution`) whose
/// lattice holds at most `max_points` points.
pub fn lattice_resolution(cols: usize, max_points: u128, max_resolution: usize) -> usize {
    let count = |r: usize| -> u128 {
        let k = cols as u128 - 1;
        (0..k).fold(1u128, |acc, i| acc * (r as u128 + k - i) / (i + 1))
    };
    let mut r = 1;
    while r < max_resolution && count(r + 1) <= max_points {
        r += 1;
    }
    r
}
