//! Reference answers: greedy diverse ground truth at scale, exhaustive
//! optima at desk scale, and recall against either.

use crate::dataset::VectorDataset;
use crate::diversity::{diversity_level, is_diverse, DiversityConstraint};
use crate::error::{Error, Result};
use crate::parallel;
use crate::result::QueryResult;

/// Ground truth for a query batch: per query the ids and distances of the
/// best diverse k-set under a per-color cap of k'.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub k: usize,
    pub k_prime: usize,
    pub entries: Vec<GtEntry>,
}

/// One query's truth; `ids.len() < k` when the constraint ran out of colors.
#[derive(Debug, Clone, PartialEq)]
pub struct GtEntry {
    pub ids: Vec<u32>,
    pub dists: Vec<f32>,
}

/// Scans all points ascending by (distance, id) and keeps each one whose
/// color has appeared fewer than `k_prime` times among the kept, stopping at
/// `k`. For the per-color-cap constraint this greedy scan is exactly optimal:
/// it minimizes the k-th distance over all feasible k-sets.
pub fn greedy_diverse_ground_truth(
    ds: &VectorDataset,
    q: &[f32],
    k: usize,
    k_prime: usize,
) -> Result<QueryResult> {
    validate_k(ds, q, k, k_prime)?;
    let n = ds.n();
    let mut order: Vec<(f64, u32)> = (0..n).map(|i| (ds.dist_to(q, i as u32), i as u32)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut counts: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    let mut hits = Vec::with_capacity(k);
    for &(d, id) in &order {
        let c = counts.entry(ds.color(id)).or_insert(0);
        if *c < k_prime {
            *c += 1;
            hits.push((id, d));
            if hits.len() == k {
                break;
            }
        }
    }
    let underfull = hits.len() < k;
    Ok(QueryResult::from_hits(hits, 0, n as u64, underfull))
}

/// Greedy ground truth for a whole query batch, one worker per query.
pub fn ground_truth_all(
    ds: &VectorDataset,
    queries: &[Vec<f32>],
    k: usize,
    k_prime: usize,
    threads: usize,
) -> Result<GroundTruth> {
    let results: Vec<Result<QueryResult>> = parallel::run_pooled(threads, || {
        parallel::map_slice(queries, |q| greedy_diverse_ground_truth(ds, q, k, k_prime))
    });
    let mut entries = Vec::with_capacity(results.len());
    for r in results {
        let r = r?;
        entries.push(GtEntry {
            dists: r.hits.iter().map(|&(_, d)| d as f32).collect(),
            ids: r.ids(),
        });
    }
    Ok(GroundTruth {
        k,
        k_prime,
        entries,
    })
}

const EXHAUSTIVE_MAX_N: usize = 20;
const EXHAUSTIVE_MAX_K: usize = 6;

/// Exhaustively enumerates all k-subsets and returns the feasible one whose
/// sorted distance profile is lexicographically smallest — which in
/// particular minimizes the k-th distance, and with distinct distances is
/// the unique set the greedy scan finds under a pure color cap (ties beyond
/// that: lexicographically smallest id set). Desk-scale only: n <= 20 and
/// k <= 6.
pub fn exhaustive_primal_optimum(
    ds: &VectorDataset,
    q: &[f32],
    constraint: &DiversityConstraint,
) -> Result<QueryResult> {
    validate_k(ds, q, constraint.k, constraint.k_prime)?;
    let n = ds.n();
    let k = constraint.k;
    if n > EXHAUSTIVE_MAX_N || k > EXHAUSTIVE_MAX_K {
        return Err(Error::usage(format!(
            "exhaustive enumeration is limited to n <= {EXHAUSTIVE_MAX_N}, k <= {EXHAUSTIVE_MAX_K} (got n = {n}, k = {k})"
        )));
    }
    if k > n {
        return Err(Error::infeasible(format!(
            "no {k}-subset exists among {n} points"
        )));
    }
    let dists: Vec<f64> = (0..n).map(|i| ds.dist_to(q, i as u32)).collect();

    let mut best: Option<(Vec<f64>, Vec<u32>)> = None;
    for_each_combination(n, k, |subset| {
        let ids: Vec<u32> = subset.iter().map(|&i| i as u32).collect();
        if !is_diverse(ds, &ids, constraint) {
            return;
        }
        // Profile: distances sorted descending, compared lexicographically —
        // smallest furthest distance first, then the next-furthest, and so
        // on.
        let mut profile: Vec<f64> = subset.iter().map(|&i| dists[i]).collect();
        profile.sort_by(|a, b| b.total_cmp(a));
        let better = match &best {
            None => true,
            Some((b, _)) => {
                // Lexicographic enumeration order makes "ties keep the
                // incumbent" equivalent to the smallest-id-set tie-break.
                profile
                    .iter()
                    .zip(b.iter())
                    .find_map(|(x, y)| match x.total_cmp(y) {
                        std::cmp::Ordering::Less => Some(true),
                        std::cmp::Ordering::Greater => Some(false),
                        std::cmp::Ordering::Equal => None,
                    })
                    .unwrap_or(false)
            }
        };
        if better {
            best = Some((profile, ids));
        }
    });

    match best {
        Some((_, ids)) => {
            let hits = ids.iter().map(|&id| (id, dists[id as usize])).collect();
            Ok(QueryResult::from_hits(hits, 0, 0, false))
        }
        None => Err(Error::infeasible(format!(
            "no (k' = {}, C = {}) diverse {k}-subset exists",
            constraint.k_prime, constraint.c
        ))),
    }
}

/// Exhaustive dual optimum: the largest C such that some k*-subset of the
/// radius-`radius` ball around `q` is (k', C)-diverse, where
/// k* = min(k, ball size). Returns the level (infinite when k* <= k') and a
/// witness subset. Desk-scale only.
pub fn exhaustive_dual_optimum(
    ds: &VectorDataset,
    q: &[f32],
    k: usize,
    k_prime: usize,
    radius: f64,
    rho_mode: crate::metric::RhoMode,
) -> Result<(f64, Vec<u32>)> {
    validate_k(ds, q, k, k_prime)?;
    if !(radius >= 0.0) {
        return Err(Error::usage(format!("radius must be >= 0, got {radius}")));
    }
    let n = ds.n();
    if n > EXHAUSTIVE_MAX_N || k > EXHAUSTIVE_MAX_K {
        return Err(Error::usage(format!(
            "exhaustive enumeration is limited to n <= {EXHAUSTIVE_MAX_N}, k <= {EXHAUSTIVE_MAX_K} (got n = {n}, k = {k})"
        )));
    }
    let ball: Vec<u32> = (0..n as u32)
        .filter(|&i| ds.dist_to(q, i) <= radius)
        .collect();
    if ball.is_empty() {
        return Err(Error::infeasible(format!(
            "no points within distance {radius} of the query"
        )));
    }
    let k_star = k.min(ball.len());

    let mut best: Option<(f64, Vec<u32>)> = None;
    for_each_combination(ball.len(), k_star, |subset| {
        let ids: Vec<u32> = subset.iter().map(|&i| ball[i]).collect();
        let level = diversity_level(ds, &ids, k_prime, rho_mode);
        if best.as_ref().is_none_or(|(b, _)| level > *b) {
            best = Some((level, ids));
        }
    });
    let (level, ids) = best.expect("ball is nonempty so some subset exists");
    Ok((level, ids))
}

/// |result ∩ truth| / |truth|. Both sides must be duplicate-free.
pub fn recall_at_k(result_ids: &[u32], truth_ids: &[u32]) -> Result<f64> {
    if truth_ids.is_empty() {
        return Err(Error::usage("recall against an empty truth set"));
    }
    let truth: std::collections::HashSet<u32> = truth_ids.iter().copied().collect();
    debug_assert_eq!(truth.len(), truth_ids.len());
    let hit = result_ids.iter().filter(|id| truth.contains(id)).count();
    debug_assert!({
        let s: std::collections::HashSet<u32> = result_ids.iter().copied().collect();
        s.len() == result_ids.len()
    });
    Ok(hit as f64 / truth_ids.len() as f64)
}

fn validate_k(ds: &VectorDataset, q: &[f32], k: usize, k_prime: usize) -> Result<()> {
    if q.len() != ds.dim() {
        return Err(Error::usage(format!(
            "query dimension {} does not match dataset dimension {}",
            q.len(),
            ds.dim()
        )));
    }
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    if k_prime == 0 || k_prime > k {
        return Err(Error::usage(format!(
            "k' must satisfy 1 <= k' <= k (got k' = {k_prime}, k = {k})"
        )));
    }
    Ok(())
}

/// Calls `f` with each size-`k` index subset of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::RhoMode;

    /// Five points on a line with colors A, A, B, B, C.
    fn line5() -> VectorDataset {
        VectorDataset::new(1, vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0, 0, 1, 1, 2]).unwrap()
    }

    #[test]
    fn combinations_count_and_order() {
        let mut all = Vec::new();
        for_each_combination(5, 3, |c| all.push(c.to_vec()));
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[1], vec![0, 1, 3]);
        assert_eq!(all[9], vec![2, 3, 4]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn greedy_skips_saturated_colors() {
        let ds = line5();
        let r = greedy_diverse_ground_truth(&ds, &[-1.0], 3, 1).unwrap();
        assert_eq!(r.ids(), vec![0, 2, 4]);
        assert!(!r.underfull);
    }

    #[test]
    fn greedy_with_full_cap_is_plain_knn() {
        let ds = line5();
        let r = greedy_diverse_ground_truth(&ds, &[-1.0], 3, 3).unwrap();
        assert_eq!(r.ids(), vec![0, 1, 2]);
    }

    #[test]
    fn greedy_underfull_when_colors_run_out() {
        let ds = VectorDataset::new(1, vec![0.0, 1.0, 2.0], vec![0, 0, 1]).unwrap();
        let r = greedy_diverse_ground_truth(&ds, &[0.0], 3, 1).unwrap();
        assert_eq!(r.ids(), vec![0, 2]);
        assert!(r.underfull);
    }

    #[test]
    fn exhaustive_primal_matches_greedy_on_random_colorful_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for case in 0..300 {
            let n = rng.random_range(4..=12);
            let k = rng.random_range(1..=3usize);
            let k_prime = rng.random_range(1..=k);
            let data: Vec<f32> = (0..n * 2).map(|_| rng.random::<f32>()).collect();
            let colors: Vec<u32> = (0..n).map(|_| rng.random_range(0..4)).collect();
            let ds = VectorDataset::new(2, data, colors).unwrap();
            let q = vec![rng.random::<f32>(), rng.random::<f32>()];
            let greedy = greedy_diverse_ground_truth(&ds, &q, k, k_prime).unwrap();
            let con = DiversityConstraint::new(k, k_prime, 1.0, RhoMode::BinaryColor).unwrap();
            match exhaustive_primal_optimum(&ds, &q, &con) {
                Ok(opt) => {
                    assert!(!greedy.underfull, "case {case}: greedy underfull but optimum exists");
                    assert!(
                        (opt.radius - greedy.radius).abs() <= 1e-12,
                        "case {case}: S_k mismatch {} vs {}",
                        opt.radius,
                        greedy.radius
                    );
                    let mut a = opt.ids();
                    let mut b = greedy.ids();
                    a.sort_unstable();
                    b.sort_unstable();
                    assert_eq!(a, b, "case {case}: id sets differ");
                }
                Err(Error::Infeasible(_)) => {
                    assert!(greedy.underfull, "case {case}: infeasible but greedy filled k");
                }
                Err(e) => panic!("case {case}: unexpected error {e}"),
            }
        }
    }

    #[test]
    fn exhaustive_primal_set_is_diverse() {
        let ds = line5();
        let con = DiversityConstraint::new(3, 1, 1.0, RhoMode::BinaryColor).unwrap();
        let r = exhaustive_primal_optimum(&ds, &[0.0], &con).unwrap();
        assert!(is_diverse(&ds, &r.ids(), &con));
        assert_eq!(r.ids(), vec![0, 2, 4]);
    }

    #[test]
    fn exhaustive_primal_infeasible_single_color() {
        let ds = VectorDataset::new(1, vec![0.0, 1.0], vec![3, 3]).unwrap();
        let con = DiversityConstraint::new(2, 1, 1.0, RhoMode::BinaryColor).unwrap();
        assert!(matches!(
            exhaustive_primal_optimum(&ds, &[0.0], &con),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn primal_with_zero_threshold_is_plain_knn() {
        let ds = line5();
        let con = DiversityConstraint::new(3, 1, 0.0, RhoMode::Euclidean).unwrap();
        let r = exhaustive_primal_optimum(&ds, &[-1.0], &con).unwrap();
        assert_eq!(r.ids(), vec![0, 1, 2]);
    }

    #[test]
    fn primal_euclidean_line_prefers_spread() {
        // Points 0, 0.1, 5 with k = 2, k' = 1, C = 1: {0, 0.1} is too tight,
        // so the optimum pairs 0 with 5 and S_2 = 5 (query at 0).
        let ds = VectorDataset::new(1, vec![0.0, 0.1, 5.0], vec![0, 1, 2]).unwrap();
        let con = DiversityConstraint::new(2, 1, 1.0, RhoMode::Euclidean).unwrap();
        let r = exhaustive_primal_optimum(&ds, &[0.0], &con).unwrap();
        assert_eq!(r.ids(), vec![0, 2]);
        assert!((r.radius - 5.0).abs() < 1e-12);
    }

    #[test]
    fn dual_vacuous_when_k_star_below_cap() {
        let ds = VectorDataset::new(1, vec![0.0, 1.0], vec![0, 1]).unwrap();
        let (c, ids) =
            exhaustive_dual_optimum(&ds, &[0.0], 2, 2, 10.0, RhoMode::Euclidean).unwrap();
        assert!(c.is_infinite());
        assert_eq!(ids.len(), 2);
    }

    #[test]
    fn dual_binary_level_is_one_iff_colorful_subset_exists() {
        let ds = line5();
        let (c, ids) = exhaustive_dual_optimum(&ds, &[0.0], 3, 1, 10.0, RhoMode::BinaryColor)
            .unwrap();
        assert_eq!(c, 1.0);
        assert!(is_k_colorful_ids(&ds, &ids, 1));

        // Two colors only: no 1-colorful 3-subset, so the best level is 0.
        let ds2 = VectorDataset::new(1, vec![0.0, 1.0, 2.0], vec![0, 0, 1]).unwrap();
        let (c2, _) =
            exhaustive_dual_optimum(&ds2, &[0.0], 3, 1, 10.0, RhoMode::BinaryColor).unwrap();
        assert_eq!(c2, 0.0);
    }

    fn is_k_colorful_ids(ds: &VectorDataset, ids: &[u32], k_prime: usize) -> bool {
        crate::diversity::is_k_colorful(&ds.colors_of(ids), k_prime)
    }

    #[test]
    fn dual_euclidean_pair_level_is_max_pairwise() {
        // Four in-ball points; with k = 2, k' = 1 the level of a pair is its
        // distance, so the optimum is the farthest in-ball pair.
        let ds = VectorDataset::new(1, vec![0.0, 0.3, 0.7, 1.0], vec![0, 1, 2, 3]).unwrap();
        let (c, ids) = exhaustive_dual_optimum(&ds, &[0.5], 2, 1, 0.6, RhoMode::Euclidean).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        assert_eq!(ids, vec![0, 3]);
    }

    #[test]
    fn dual_empty_ball_is_infeasible() {
        let ds = line5();
        assert!(matches!(
            exhaustive_dual_optimum(&ds, &[100.0], 2, 1, 1.0, RhoMode::Euclidean),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn recall_identities() {
        assert_eq!(recall_at_k(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(recall_at_k(&[7, 8], &[1, 2]).unwrap(), 0.0);
        assert_eq!(recall_at_k(&[1, 9], &[1, 2]).unwrap(), 0.5);
        assert!(recall_at_k(&[1], &[]).is_err());
    }

    #[test]
    fn recall_symmetric_at_equal_sizes() {
        let a = [1u32, 2, 3, 4];
        let b = [3u32, 4, 5, 6];
        assert_eq!(
            recall_at_k(&a, &b).unwrap(),
            recall_at_k(&b, &a).unwrap()
        );
    }

    #[test]
    fn batch_ground_truth_matches_single(){
        let ds = line5();
        let queries = vec![vec![-1.0f32], vec![5.0]];
        let gt = ground_truth_all(&ds, &queries, 2, 1, 1).unwrap();
        assert_eq!(gt.entries.len(), 2);
        let single = greedy_diverse_ground_truth(&ds, &queries[1], 2, 1).unwrap();
        assert_eq!(gt.entries[1].ids, single.ids());
    }
}
