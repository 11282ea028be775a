//! Color files and the synthetic color generators.
//!
//! Binary color files are `n` little-endian u32 ids; files ending in `.txt`
//! hold one decimal id per line instead.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::ops::RangeInclusive;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};

fn is_text(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "txt")
}

/// Writes one color per point; text or binary according to the extension.
pub fn save_colors(colors: &[u32], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    if is_text(path) {
        for c in colors {
            writeln!(w, "{c}")?;
        }
    } else {
        for c in colors {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads exactly `n` colors; a count mismatch is a format error.
pub fn load_colors(path: &Path, n: usize) -> Result<Vec<u32>> {
    if is_text(path) {
        let r = BufReader::new(File::open(path)?);
        let mut out = Vec::with_capacity(n);
        let mut offset: u64 = 0;
        for line in r.lines() {
            let line = line?;
            let line_len = line.len() as u64 + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                offset += line_len;
                continue;
            }
            let c: u32 = trimmed.parse().map_err(|_| {
                Error::format(offset, format!("not a color id: {trimmed:?}"))
            })?;
            out.push(c);
            offset += line_len;
        }
        if out.len() != n {
            return Err(Error::format(
                offset,
                format!("file holds {} colors, dataset has {n} points", out.len()),
            ));
        }
        Ok(out)
    } else {
        let mut r = BufReader::new(File::open(path)?);
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != n * 4 {
            return Err(Error::format(
                bytes.len() as u64,
                format!(
                    "file holds {} bytes, expected {} for {n} colors",
                    bytes.len(),
                    n * 4
                ),
            ));
        }
        Ok(bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Draws `n` colors i.i.d. from a two-tier mixture: each `(set, prob)` tier
/// picks uniformly from its explicit set, and the tail tier picks uniformly
/// from its range. Probabilities must sum to 1.
pub fn gen_colors_skewed(
    n: usize,
    dominant: &[(Vec<u32>, f64)],
    tail: (RangeInclusive<u32>, f64),
    seed: u64,
) -> Result<Vec<u32>> {
    let (tail_range, tail_prob) = tail;
    let mut mass = tail_prob;
    for (set, p) in dominant {
        if set.is_empty() {
            return Err(Error::usage("empty color set in dominant tier"));
        }
        if !(0.0..=1.0).contains(p) {
            return Err(Error::usage(format!("tier probability {p} outside [0, 1]")));
        }
        mass += p;
    }
    if !(0.0..=1.0).contains(&tail_prob) {
        return Err(Error::usage(format!(
            "tail probability {tail_prob} outside [0, 1]"
        )));
    }
    if tail_range.is_empty() {
        return Err(Error::usage("empty tail color range"));
    }
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::usage(format!("tier probabilities sum to {mass}, not 1")));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut u: f64 = rng.random();
        let mut color = None;
        for (set, p) in dominant {
            if u < *p {
                color = Some(set[rng.random_range(0..set.len())]);
                break;
            }
            u -= p;
        }
        let c = match color {
            Some(c) => c,
            None => rng.random_range(*tail_range.start()..=*tail_range.end()),
        };
        out.push(c);
    }
    Ok(out)
}

/// The reference-corpus scheme: 90% uniform over colors {1,2,3}, 10%
/// uniform over {4..1000}.
pub fn arxiv_colors(n: usize, seed: u64) -> Vec<u32> {
    gen_colors_skewed(n, &[(vec![1, 2, 3], 0.9)], (4..=1000, 0.1), seed)
        .expect("fixed scheme is valid")
}

/// The skewed scheme for vector corpora without natural labels: one
/// dominant color with probability 0.8, otherwise uniform over 999 others.
pub fn sift_skewed_colors(n: usize, seed: u64) -> Vec<u32> {
    gen_colors_skewed(n, &[(vec![1], 0.8)], (2..=1000, 0.2), seed)
        .expect("fixed scheme is valid")
}

/// Partitions space with ⌈log2 buckets⌉ seeded Gaussian hyperplanes (bucket
/// id = sign pattern, so the bucket count rounds up to a power of two) and
/// gives each point its bucket id as color with probability `primary_prob`,
/// else a uniformly random other color.
pub fn gen_colors_hyperplane(
    ds: &VectorDataset,
    buckets: usize,
    primary_prob: f64,
    seed: u64,
) -> Result<Vec<u32>> {
    if buckets < 2 {
        return Err(Error::usage(format!("need at least 2 buckets, got {buckets}")));
    }
    if !(0.0..=1.0).contains(&primary_prob) {
        return Err(Error::usage(format!(
            "primary probability {primary_prob} outside [0, 1]"
        )));
    }
    let planes = (buckets as f64).log2().ceil() as usize;
    let rounded = 1usize << planes;
    let dim = ds.dim();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normals: Vec<Vec<f64>> = (0..planes)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect();

    let mut out = Vec::with_capacity(ds.n());
    for i in 0..ds.n() {
        let p = ds.point(i as u32);
        let mut bucket = 0u32;
        for (b, normal) in normals.iter().enumerate() {
            let dot: f64 = normal.iter().zip(p).map(|(w, &x)| w * x as f64).sum();
            if dot >= 0.0 {
                bucket |= 1 << b;
            }
        }
        let c = if rng.random::<f64>() < primary_prob {
            bucket
        } else {
            // Uniform over the other rounded-1 colors.
            let r = rng.random_range(0..rounded as u32 - 1);
            if r >= bucket {
                r + 1
            } else {
                r
            }
        };
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_and_size() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.colors");
        save_colors(&[0, 0, 5], &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 12);
        assert_eq!(load_colors(&path, 3).unwrap(), vec![0, 0, 5]);
    }

    #[test]
    fn text_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        std::fs::write(&path, "0\n0\n5\n").unwrap();
        assert_eq!(load_colors(&path, 3).unwrap(), vec![0, 0, 5]);
        save_colors(&[7, 8], &dir.path().join("d.txt")).unwrap();
        assert_eq!(
            std::fs::read_to_string(dir.path().join("d.txt")).unwrap(),
            "7\n8\n"
        );
    }

    #[test]
    fn count_mismatch_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.colors");
        save_colors(&[1, 2], &path).unwrap();
        assert!(matches!(
            load_colors(&path, 3),
            Err(Error::Format { .. })
        ));
        let txt = dir.path().join("c.txt");
        std::fs::write(&txt, "1\n2\n").unwrap();
        assert!(matches!(load_colors(&txt, 3), Err(Error::Format { .. })));
    }

    #[test]
    fn garbage_text_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let txt = dir.path().join("bad.txt");
        std::fs::write(&txt, "1\nbanana\n").unwrap();
        assert!(matches!(load_colors(&txt, 2), Err(Error::Format { .. })));
    }

    #[test]
    fn skewed_generator_hits_tier_frequencies() {
        let n = 100_000;
        let colors = arxiv_colors(n, 42);
        let mut per_color = std::collections::HashMap::new();
        for &c in &colors {
            *per_color.entry(c).or_insert(0usize) += 1;
        }
        for c in 1..=3u32 {
            let share = per_color[&c] as f64 / n as f64;
            assert!(
                (share - 0.3).abs() < 0.01,
                "color {c} share {share} outside 0.30 ± 0.01"
            );
        }
        let tail: usize = per_color
            .iter()
            .filter(|&(&c, _)| c >= 4)
            .map(|(_, &cnt)| cnt)
            .sum();
        assert!((tail as f64 / n as f64 - 0.1).abs() < 0.01);
        assert!(colors.iter().all(|&c| (1..=1000).contains(&c)));
    }

    #[test]
    fn skewed_generator_is_seed_deterministic() {
        assert_eq!(arxiv_colors(500, 9), arxiv_colors(500, 9));
        assert_ne!(arxiv_colors(500, 9), arxiv_colors(500, 10));
    }

    #[test]
    fn sift_scheme_has_one_dominant_color() {
        let n = 50_000;
        let colors = sift_skewed_colors(n, 3);
        let dominant = colors.iter().filter(|&&c| c == 1).count() as f64 / n as f64;
        assert!((dominant - 0.8).abs() < 0.01);
    }

    #[test]
    fn bad_probability_mass_rejected() {
        assert!(gen_colors_skewed(10, &[(vec![1], 0.5)], (2..=9, 0.4), 0).is_err());
        assert!(gen_colors_skewed(10, &[(vec![], 0.5)], (2..=9, 0.5), 0).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        {
            assert!(gen_colors_skewed(10, &[(vec![1], 0.5)], (9..=2, 0.5), 0).is_err());
        }
    }

    #[test]
    fn hyperplane_pure_labels_with_two_buckets() {
        // primary_prob = 1: colors are exactly the half-space labels, so
        // points on the same side share a color.
        let ds = VectorDataset::new(
            2,
            vec![1.0, 1.0, 2.0, 2.0, -1.0, -1.0, -2.0, -2.0],
            vec![0; 4],
        )
        .unwrap();
        let colors = gen_colors_hyperplane(&ds, 2, 1.0, 5).unwrap();
        assert!(colors.iter().all(|&c| c < 2));
        assert_eq!(colors[0], colors[1]);
        assert_eq!(colors[2], colors[3]);
        assert_ne!(colors[0], colors[2]);
    }

    #[test]
    fn hyperplane_bucket_count_rounds_up() {
        let data: Vec<f32> = (0..64).map(|i| i as f32 - 32.0).collect();
        let ds = VectorDataset::new(1, data, vec![0; 64]).unwrap();
        let colors = gen_colors_hyperplane(&ds, 1000, 0.8, 1).unwrap();
        assert!(colors.iter().all(|&c| c < 1024));
    }

    #[test]
    fn hyperplane_rejects_bad_args() {
        let ds = VectorDataset::new(1, vec![0.0, 1.0], vec![0, 0]).unwrap();
        assert!(gen_colors_hyperplane(&ds, 1, 0.8, 0).is_err());
        assert!(gen_colors_hyperplane(&ds, 4, 1.5, 0).is_err());
    }

    #[test]
    fn hyperplane_primary_share_matches_probability() {
        // With enough points per bucket, ≈80% of a bucket's points carry the
        // bucket id as color.
        let mut data = Vec::new();
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..20_000 {
            data.push(rng.random_range(-1.0..1.0f32));
            data.push(rng.random_range(-1.0..1.0f32));
        }
        let ds = VectorDataset::new(2, data, vec![0; 20_000]).unwrap();
        let colors = gen_colors_hyperplane(&ds, 4, 0.8, 13).unwrap();
        // Recompute bucket ids with the same seed to compare.
        let primary = gen_colors_hyperplane(&ds, 4, 1.0, 13).unwrap();
        let agree = colors
            .iter()
            .zip(&primary)
            .filter(|(a, b)| a == b)
            .count() as f64
            / 20_000.0;
        assert!((agree - 0.8).abs() < 0.02, "primary share {agree}");
    }
}
