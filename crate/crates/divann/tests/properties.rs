//! Randomized structural properties: metric laws, agreement between the
//! diversity predicates, queue/prune/search invariants, byte-stable format
//! round trips, and a degree-growth sanity check for the quadratic builder.

use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use divann::fast::{build_fast, diverse_prune, diverse_search, BuildParams, DiverseQueue};
use divann::io::{
    gt_from_bytes, gt_to_bytes, index_from_bytes, index_to_bytes, load_colors, load_fvecs,
    save_colors, save_fvecs,
};
use divann::oracle::{exhaustive_primal_optimum, greedy_diverse_ground_truth, GroundTruth, GtEntry};
use divann::theory::build_colorful_slow;
use divann::{
    distance, estimate_stats, is_diverse_at, is_k_colorful, rho, BuilderKind, DiverseGraph,
    DiversityConstraint, GraphMeta, RhoMode, VectorDataset,
};

/// Random dataset with bounded size, dimension, and color alphabet.
fn dataset(max_n: usize, max_dim: usize, max_color: u32) -> impl Strategy<Value = VectorDataset> {
    (1usize..=max_dim, 1usize..=max_n)
        .prop_flat_map(move |(dim, n)| {
            (
                Just(dim),
                prop::collection::vec(-100.0f32..100.0, dim * n),
                prop::collection::vec(0..max_color, n),
            )
        })
        .prop_map(|(dim, data, colors)| VectorDataset::new(dim, data, colors).unwrap())
}

/// Dataset plus a duplicate-free id subset.
fn dataset_with_ids(
    max_n: usize,
    max_dim: usize,
    max_color: u32,
) -> impl Strategy<Value = (VectorDataset, Vec<u32>)> {
    dataset(max_n, max_dim, max_color).prop_flat_map(|ds| {
        let n = ds.n();
        let pool: Vec<u32> = (0..n as u32).collect();
        (Just(ds), prop::sample::subsequence(pool, 0..=n))
    })
}

fn rho_mode() -> impl Strategy<Value = RhoMode> {
    prop_oneof![Just(RhoMode::BinaryColor), Just(RhoMode::Euclidean)]
}

/// Dataset, a valid graph over it (random edges, no self-loops or
/// duplicates), and a query of matching dimension.
fn graph_case() -> impl Strategy<Value = (VectorDataset, DiverseGraph, Vec<f32>)> {
    dataset(16, 2, 5)
        .prop_flat_map(|ds| {
            let n = ds.n();
            let dim = ds.dim();
            (
                Just(ds),
                prop::collection::vec((0..n as u32, 0..n as u32), 0..3 * n),
                0..n as u32,
                prop::collection::vec(-100.0f32..100.0, dim),
            )
        })
        .prop_map(|(ds, edges, start, q)| {
            let mut adj = vec![std::collections::BTreeSet::new(); ds.n()];
            for (a, b) in edges {
                if a != b {
                    adj[a as usize].insert(b);
                }
            }
            let adj: Vec<Vec<u32>> = adj.into_iter().map(|s| s.into_iter().collect()).collect();
            let meta = GraphMeta {
                builder: BuilderKind::Fast,
                alpha: 1.2,
                k: 0,
                k_prime: 0,
                rho_mode: None,
                degree_cap: None,
                build_beam: None,
                m: None,
                start_node: Some(start),
            };
            let g = DiverseGraph::new(adj, meta).unwrap();
            (ds, g, q)
        })
}

proptest! {
    #[test]
    fn distance_is_symmetric_and_triangular(
        (a, b, c) in (1usize..=8).prop_flat_map(|dim| {
            let coords = prop::collection::vec(-100.0f32..100.0, dim);
            (coords.clone(), coords.clone(), coords)
        })
    ) {
        let ab = distance(&a, &b).unwrap();
        let ba = distance(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        let ac = distance(&a, &c).unwrap();
        let bc = distance(&b, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-6 * (1.0 + ab + bc));
    }

    #[test]
    fn binary_unit_threshold_diversity_is_colorfulness(
        (ds, ids) in dataset_with_ids(12, 2, 5),
        k_prime in 1usize..=4,
    ) {
        let diverse = is_diverse_at(&ds, &ids, k_prime, 1.0, RhoMode::BinaryColor);
        let colorful = is_k_colorful(&ds.colors_of(&ids), k_prime);
        prop_assert_eq!(diverse, colorful);
    }

    #[test]
    fn any_subset_of_a_diverse_set_is_diverse(
        (ds, ids, subset) in dataset_with_ids(14, 2, 6).prop_flat_map(|(ds, ids)| {
            let len = ids.len();
            (Just(ds), Just(ids.clone()), prop::sample::subsequence(ids, 0..=len))
        }),
        k_prime in 1usize..=3,
        c in 0.0f64..4.0,
        mode in rho_mode(),
    ) {
        if is_diverse_at(&ds, &ids, k_prime, c, mode) {
            prop_assert!(is_diverse_at(&ds, &subset, k_prime, c, mode));
        }
    }

    #[test]
    fn single_multiplicity_diversity_is_min_pairwise_rho(
        (ds, ids) in dataset_with_ids(10, 2, 4),
        c in 0.01f64..4.0,
        mode in rho_mode(),
    ) {
        let mut naive = true;
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if rho(&ds, a, b, mode).unwrap() < c {
                    naive = false;
                }
            }
        }
        prop_assert_eq!(is_diverse_at(&ds, &ids, 1, c, mode), naive);
    }

    #[test]
    fn queue_invariants_hold_through_random_programs(
        capacity in 1usize..=12,
        per_color_cap in 1usize..=4,
        ops in prop::collection::vec((0u32..30, 0.0f64..100.0, 0u32..5, any::<bool>()), 0..150),
    ) {
        let mut q = DiverseQueue::new(capacity, per_color_cap).unwrap();
        let mut expanded = HashSet::new();
        for (id, dist, color, do_pop) in ops {
            q.insert(id, dist, color);
            q.check_invariants().unwrap();
            prop_assert!(q.len() <= capacity);
            if do_pop {
                if let Some((pid, _)) = q.pop_closest_unexpanded() {
                    prop_assert!(expanded.insert(pid), "id {} expanded twice", pid);
                    prop_assert!(q.contains(pid), "expansion must not remove the entry");
                }
            }
        }
    }

    #[test]
    fn prune_keeps_the_closest_within_cap_without_duplicates(
        (ds, candidates) in dataset_with_ids(24, 3, 6),
        p in 0u32..24,
        alpha in 1.05f64..3.0,
        r_cap in 1usize..=8,
        m in 1usize..=3,
    ) {
        let p = p % ds.n() as u32;
        let kept = diverse_prune(&ds, p, &candidates, alpha, r_cap, m).unwrap();
        prop_assert!(kept.len() <= r_cap);
        prop_assert!(!kept.contains(&p));
        let mut seen = HashSet::new();
        for &v in &kept {
            prop_assert!(candidates.contains(&v));
            prop_assert!(seen.insert(v));
        }
        let closest = candidates
            .iter()
            .filter(|&&v| v != p)
            .map(|&v| (ds.dist(p, v), v))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let Some((_, v)) = closest {
            prop_assert_eq!(kept[0], v, "the closest candidate is always kept first");
        }
    }

    #[test]
    fn prune_with_unreachable_blocker_count_is_pure_truncation(
        (ds, candidates) in dataset_with_ids(16, 2, 4),
        p in 0u32..16,
        alpha in 1.05f64..3.0,
        r_cap in 1usize..=6,
    ) {
        // All-distinct colors and m > |candidates|: no same-color rule, no
        // blocker set can fill, so nothing is ever dropped and the output is
        // the closest candidates in order.
        let p = p % ds.n() as u32;
        let n = ds.n();
        let ds = ds.with_colors((0..n as u32).collect()).unwrap();
        let kept =
            diverse_prune(&ds, p, &candidates, alpha, r_cap, candidates.len() + 1).unwrap();
        let mut expected: Vec<(f64, u32)> = candidates
            .iter()
            .filter(|&&v| v != p)
            .map(|&v| (ds.dist(p, v), v))
            .collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        expected.truncate(r_cap);
        let expected: Vec<u32> = expected.into_iter().map(|(_, v)| v).collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn beam_search_outputs_are_colorful_offered_and_deterministic(
        (ds, g, q) in graph_case(),
        k_prime in 1usize..=3,
        k in 1usize..=4,
        extra_beam in 0usize..8,
    ) {
        let beam = k + extra_beam;
        let (r1, v1) = diverse_search(&g, &ds, &q, k_prime, k, beam).unwrap();
        prop_assert!(is_k_colorful(&ds.colors_of(&r1.ids()), k_prime));
        prop_assert!(r1.hits.len() <= k);
        let start = g.meta().start_node.unwrap();
        for id in r1.ids() {
            let offered = id == start || v1.iter().any(|&p| g.out(p).contains(&id));
            prop_assert!(offered, "hit {} was never offered to the queue", id);
        }
        let (r2, v2) = diverse_search(&g, &ds, &q, k_prime, k, beam).unwrap();
        prop_assert_eq!(r1.hits, r2.hits);
        prop_assert_eq!(v1, v2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_scan_matches_exhaustive_optimum_under_color_caps(
        (ds, q) in dataset(14, 2, 4).prop_flat_map(|ds| {
            let dim = ds.dim();
            (Just(ds), prop::collection::vec(-100.0f32..100.0, dim))
        }),
        k in 1usize..=4,
        k_prime in 1usize..=4,
    ) {
        prop_assume!(k <= ds.n());
        let k_prime = k_prime.min(k);
        let greedy = greedy_diverse_ground_truth(&ds, &q, k, k_prime).unwrap();
        let constraint = DiversityConstraint::new(k, k_prime, 1.0, RhoMode::BinaryColor).unwrap();
        match exhaustive_primal_optimum(&ds, &q, &constraint) {
            Ok(opt) => {
                prop_assert!(!greedy.underfull);
                prop_assert_eq!(greedy.ids(), opt.ids());
                prop_assert!((greedy.radius - opt.radius).abs() <= 1e-12);
            }
            Err(divann::Error::Infeasible(_)) => prop_assert!(greedy.underfull),
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }

    #[test]
    fn incremental_builds_respect_the_degree_cap(
        ds in dataset(40, 3, 6),
        degree_cap in 1usize..=8,
        extra_beam in 0usize..12,
        m in 1usize..=3,
        passes in 1usize..=2,
        seed in 0u64..1000,
    ) {
        let params = BuildParams {
            alpha: 1.2,
            degree_cap,
            build_beam: degree_cap + extra_beam,
            m,
            passes,
            seed,
        };
        let g = build_fast(&ds, &params, 1).unwrap();
        prop_assert!(g.max_out_degree() <= degree_cap);
        prop_assert_eq!(g.n(), ds.n());
    }

    #[test]
    fn vector_files_round_trip_byte_stably(ds in dataset(20, 8, 3)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("points.fvecs");
        save_fvecs(&ds, &path).unwrap();
        let loaded = load_fvecs(&path).unwrap();
        prop_assert_eq!(loaded.dim(), ds.dim());
        let bits = |v: &[f32]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(loaded.raw_data()), bits(ds.raw_data()));
        let path2 = dir.path().join("again.fvecs");
        save_fvecs(&loaded, &path2).unwrap();
        prop_assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn color_files_round_trip_in_both_encodings(
        colors in prop::collection::vec(any::<u32>(), 1..60),
    ) {
        let dir = tempfile::tempdir().unwrap();
        for name in ["colors.bin", "colors.txt"] {
            let path = dir.path().join(name);
            save_colors(&colors, &path).unwrap();
            let loaded = load_colors(&path, colors.len()).unwrap();
            prop_assert_eq!(&loaded, &colors);
        }
    }

    #[test]
    fn ground_truth_files_round_trip_byte_stably(
        gt in (1usize..=6, 0usize..=5).prop_flat_map(|(k, qn)| {
            let entry = (0usize..=k).prop_flat_map(|len| {
                (
                    prop::collection::btree_set(0u32..1000, len)
                        .prop_map(|s| s.into_iter().collect::<Vec<u32>>()),
                    prop::collection::vec(0.0f32..1e6, len),
                )
            })
            .prop_map(|(ids, dists)| GtEntry { ids, dists });
            (Just(k), 1usize..=k, prop::collection::vec(entry, qn))
        })
        .prop_map(|(k, k_prime, entries)| GroundTruth { k, k_prime, entries })
    ) {
        let bytes = gt_to_bytes(&gt).unwrap();
        let parsed = gt_from_bytes(&bytes).unwrap();
        prop_assert_eq!(&parsed, &gt);
        prop_assert_eq!(gt_to_bytes(&parsed).unwrap(), bytes);
    }

    #[test]
    fn index_snapshots_round_trip_byte_stably((ds, g, _q) in graph_case()) {
        let bytes = index_to_bytes(&g, ds.colors(), ds.dim()).unwrap();
        let (g2, colors2, dim2) = index_from_bytes(&bytes).unwrap();
        prop_assert_eq!(g2.adjacency(), g.adjacency());
        prop_assert_eq!(g2.meta(), g.meta());
        prop_assert_eq!(colors2.as_slice(), ds.colors());
        prop_assert_eq!(dim2, ds.dim());
        prop_assert_eq!(index_to_bytes(&g2, &colors2, dim2).unwrap(), bytes);
    }
}

/// Max out-degree of the quadratic colorful builder should grow at most
/// about linearly in k · log(spread): the per-k coefficient stays within a
/// small factor of the k = 1 coefficient on uniform 2-D data.
#[test]
fn slow_build_degree_grows_at_most_linearly_in_k_times_log_spread() {
    for &n in &[250usize, 500, 1000] {
        let mut rng = ChaCha12Rng::seed_from_u64(n as u64);
        let data: Vec<f32> = (0..n * 2).map(|_| rng.random::<f32>()).collect();
        let colors: Vec<u32> = (0..n).map(|_| rng.random_range(0..16u32)).collect();
        let ds = VectorDataset::new(2, data, colors).unwrap();
        let aspect = estimate_stats(&ds, n, 0).unwrap().aspect_ratio;
        let coeff = |k: usize| {
            let (g, _) = build_colorful_slow(&ds, k, 2.0, 0).unwrap();
            g.max_out_degree() as f64 / (k as f64 * aspect.log2())
        };
        let c1 = coeff(1);
        assert!(c1 > 0.0);
        for k in [2usize, 4, 8] {
            let ck = coeff(k);
            assert!(
                ck <= 3.0 * c1 + 1e-9,
                "n={n}, k={k}: coefficient {ck} vs baseline {c1}"
            );
        }
    }
}
