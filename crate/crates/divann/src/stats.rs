//! Dataset spread statistics: max/min pairwise distance and their ratio,
//! exhaustive at small scale and sampled above it.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::parallel;

/// Pairwise-distance summary of a dataset. `aspect_ratio` is the spread
/// d_max / d_min that sizes iteration budgets for the provable searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetStats {
    pub d_max: f64,
    pub d_min: f64,
    pub aspect_ratio: f64,
    /// True when every pair was examined; false for sampled estimates.
    pub exact: bool,
}

/// Computes [`DatasetStats`]. Datasets with at most `sample_size` points get
/// an exhaustive pairwise scan (duplicate points are an error); larger ones
/// get max/min over a seeded point sample plus a two-sweep farthest-point
/// pass over all points, whose result lower-bounds the true diameter within
/// a factor of two.
pub fn estimate_stats(ds: &VectorDataset, sample_size: usize, seed: u64) -> Result<DatasetStats> {
    let n = ds.n();
    if n < 2 {
        return Err(Error::usage("spread statistics need at least 2 points"));
    }
    if sample_size < 2 {
        return Err(Error::usage("sample_size must be at least 2"));
    }
    if n <= sample_size {
        return exhaustive_stats(ds);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let sample: Vec<u32> = rand::seq::index::sample(&mut rng, n, sample_size)
        .into_iter()
        .map(|i| i as u32)
        .collect();

    let (mut d_max, mut d_min) = (0.0f64, f64::INFINITY);
    for (i, &a) in sample.iter().enumerate() {
        for &b in &sample[i + 1..] {
            let d = ds.dist(a, b);
            if d > d_max {
                d_max = d;
            }
            if d > 0.0 && d < d_min {
                d_min = d;
            }
        }
    }
    if !d_min.is_finite() {
        return Err(Error::degenerate(
            "all sampled point pairs coincide; cannot estimate minimum spread",
        ));
    }

    // Two-sweep farthest-point pass over the full dataset: the resulting
    // distance is at least half the true diameter.
    let a = farthest_from(ds, 0);
    let b = farthest_from(ds, a);
    d_max = d_max.max(ds.dist(a, b));

    Ok(DatasetStats {
        d_max,
        d_min,
        aspect_ratio: d_max / d_min,
        exact: false,
    })
}

fn farthest_from(ds: &VectorDataset, p: u32) -> u32 {
    let n = ds.n();
    let best = parallel::map_indexed(n, |i| (ds.dist(p, i as u32), i as u32));
    best.into_iter()
        .max_by(|(da, ia), (db, ib)| da.total_cmp(db).then(ib.cmp(ia)))
        .map(|(_, i)| i)
        .unwrap()
}

fn exhaustive_stats(ds: &VectorDataset) -> Result<DatasetStats> {
    let n = ds.n();
    // Per-row scan of the upper triangle; rows are independent.
    let rows = parallel::map_indexed(n, |i| {
        let mut row_max = 0.0f64;
        let mut row_min = f64::INFINITY;
        let mut dup: Option<(u32, u32)> = None;
        for j in (i + 1)..n {
            let d = ds.dist(i as u32, j as u32);
            if d == 0.0 {
                dup.get_or_insert((i as u32, j as u32));
            }
            if d > row_max {
                row_max = d;
            }
            if d < row_min {
                row_min = d;
            }
        }
        (row_max, row_min, dup)
    });

    let (mut d_max, mut d_min) = (0.0f64, f64::INFINITY);
    for (row_max, row_min, dup) in rows {
        if let Some((a, b)) = dup {
            return Err(Error::degenerate(format!(
                "duplicate points {a} and {b} (distance 0)"
            )));
        }
        d_max = d_max.max(row_max);
        d_min = d_min.min(row_min);
    }
    Ok(DatasetStats {
        d_max,
        d_min,
        aspect_ratio: d_max / d_min,
        exact: true,
    })
}
