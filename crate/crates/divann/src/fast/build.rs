//! Incremental degree-capped index construction.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::fast::prune::{diverse_prune_traced, PruneTrace};
use crate::fast::search::beam_search_core;
use crate::graph::{BuilderKind, DiverseGraph, GraphMeta};
use crate::parallel;

/// Parameters of the incremental builder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildParams {
    /// Pruning slack; must be > 1.
    pub alpha: f64,
    /// Out-degree cap R.
    pub degree_cap: usize,
    /// Beam width L of the insertion searches; must be ≥ R.
    pub build_beam: usize,
    /// Distinct blocker colors needed to drop an edge. 1 recovers the
    /// standard color-oblivious build.
    pub m: usize,
    /// Full passes over the point set.
    pub passes: usize,
    /// Seed for the insertion shuffle and the medoid sample.
    pub seed: u64,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams {
            alpha: 1.2,
            degree_cap: 64,
            build_beam: 200,
            m: 1,
            passes: 2,
            seed: 0,
        }
    }
}

impl BuildParams {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return Err(Error::usage(format!("alpha must be > 1, got {}", self.alpha)));
        }
        if self.degree_cap == 0 {
            return Err(Error::usage("degree cap must be at least 1"));
        }
        if self.build_beam < self.degree_cap {
            return Err(Error::usage(format!(
                "build beam {} must be at least the degree cap {}",
                self.build_beam, self.degree_cap
            )));
        }
        if self.m == 0 {
            return Err(Error::usage("blocker count m must be at least 1"));
        }
        if self.passes == 0 {
            return Err(Error::usage("pass count must be at least 1"));
        }
        Ok(())
    }
}

/// Points per parallel batch. Searches within a batch run against a frozen
/// snapshot of the graph and their edits are committed sequentially in batch
/// order, so the result is identical for every worker count.
const BUILD_BATCH: usize = 64;

/// Sample size for the entry-point estimate.
const MEDOID_SAMPLE: usize = 10_000;

/// Builds the navigable graph by inserting points in seeded-shuffled order.
///
/// Each insertion searches the current graph for the point itself with a
/// per-color cap of ⌈L/m⌉, prunes the visited nodes down to at most R
/// out-neighbors, installs them, and mirrors each edge back — re-pruning any
/// node the mirror pushed over R. The entry point is the point nearest the
/// coordinate mean of a sample. Same seed and parameters give the same graph
/// regardless of `threads`.
pub fn build_fast(ds: &VectorDataset, params: &BuildParams, threads: usize) -> Result<DiverseGraph> {
    params.validate()?;
    parallel::run_pooled(threads, || build_fast_pooled(ds, params))
}

fn build_fast_pooled(ds: &VectorDataset, params: &BuildParams) -> Result<DiverseGraph> {
    let n = ds.n();
    let start = estimate_medoid(ds, params.seed);
    let mut order: Vec<u32> = (0..n as u32).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
    order.shuffle(&mut rng);

    let insert_k_prime = params.build_beam.div_ceil(params.m);
    let beam = params.build_beam;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut traces: Vec<Option<EdgeTrace>> = (0..n).map(|_| None).collect();

    for _pass in 0..params.passes {
        for batch in order.chunks(BUILD_BATCH) {
            let planned: Vec<(u32, PruneTrace)> = {
                let frozen = &adj;
                parallel::try_map_indexed(batch.len(), |i| {
                    let p = batch[i];
                    let (_, visited) = beam_search_core(
                        ds,
                        frozen,
                        start,
                        ds.point(p),
                        insert_k_prime,
                        beam,
                        beam,
                    )?;
                    let pruned = diverse_prune_traced(
                        ds,
                        p,
                        &visited,
                        params.alpha,
                        params.degree_cap,
                        params.m,
                    )?;
                    Ok::<_, Error>((p, pruned))
                })?
            };
            for (p, trace) in planned {
                let PruneTrace { kept, dists, blockers } = trace;
                adj[p as usize] = kept.clone();
                traces[p as usize] = Some(EdgeTrace { dists, blockers });
                for j in kept {
                    add_reverse_edge(ds, params, &mut adj, &mut traces, j, p)?;
                }
            }
        }
    }

    let meta = GraphMeta {
        builder: BuilderKind::Fast,
        alpha: params.alpha,
        k: 0,
        k_prime: 0,
        rho_mode: None,
        degree_cap: Some(params.degree_cap),
        build_beam: Some(params.build_beam),
        m: Some(params.m),
        start_node: Some(start),
    };
    DiverseGraph::new(adj, meta)
}

/// Distances from the owner and blocker sets parallel to a node's out-list;
/// valid only while the list is exactly what the last prune kept, in its
/// (distance, id) order.
struct EdgeTrace {
    dists: Vec<f64>,
    blockers: Vec<Vec<u32>>,
}

/// Strict (distance, id) order used throughout pruning.
#[inline]
fn key_lt(a: (f64, u32), b: (f64, u32)) -> bool {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).is_lt()
}

/// Mirrors the edge p → j as j → p, re-pruning j's out-list when that pushes
/// it over the cap. A list still carrying the trace of its last prune is
/// re-pruned incrementally; one that was appended to below the cap lost its
/// trace and takes the full prune on its next overflow.
fn add_reverse_edge(
    ds: &VectorDataset,
    params: &BuildParams,
    adj: &mut [Vec<u32>],
    traces: &mut [Option<EdgeTrace>],
    j: u32,
    p: u32,
) -> Result<()> {
    let ju = j as usize;
    if adj[ju].contains(&p) {
        return Ok(());
    }
    if adj[ju].len() < params.degree_cap {
        adj[ju].push(p);
        traces[ju] = None;
        return Ok(());
    }
    if let Some(tr) = traces[ju].as_mut() {
        match incremental_reprune(ds, params, &mut adj[ju], tr, j, p) {
            Incremental::Settled => return Ok(()),
            Incremental::Bail => {}
        }
    }
    adj[ju].push(p);
    let candidates = std::mem::take(&mut adj[ju]);
    let trace = diverse_prune_traced(
        ds,
        j,
        &candidates,
        params.alpha,
        params.degree_cap,
        params.m,
    )?;
    adj[ju] = trace.kept;
    traces[ju] = Some(EdgeTrace {
        dists: trace.dists,
        blockers: trace.blockers,
    });
    Ok(())
}

enum Incremental {
    /// The outcome is decided: the list and its trace already match what a
    /// full re-prune would have produced.
    Settled,
    /// An incumbent would be dropped; only the full prune replays that.
    Bail,
}

/// Replays the prune of `out ∪ {x}` against the trace of the prune that kept
/// `out`. A full prune of that union walks candidates in (distance, id)
/// order, and every incumbent-vs-incumbent decision repeats the recorded
/// run, so only x's row and column are new: the incumbents before x decide
/// x's fate, and if x joins it can only add one blocker color to each later
/// incumbent. The moment x would evict an incumbent — by color, or by
/// completing one's m-th blocker — we give up and let the caller re-prune
/// from scratch; otherwise the union's prune is exactly "insert x, drop the
/// overflow off the far end".
fn incremental_reprune(
    ds: &VectorDataset,
    params: &BuildParams,
    out: &mut Vec<u32>,
    tr: &mut EdgeTrace,
    j: u32,
    x: u32,
) -> Incremental {
    let cap = params.degree_cap;
    debug_assert_eq!(out.len(), cap);
    debug_assert_eq!(tr.dists.len(), cap);
    let d_jx = ds.dist(j, x);
    let x_key = (d_jx, x);
    let t = (0..cap)
        .position(|i| !key_lt((tr.dists[i], out[i]), x_key))
        .unwrap_or(cap);
    if t == cap {
        // The cap is reached before x would even be considered.
        return Incremental::Settled;
    }
    let x_color = ds.color(x);
    // Do the incumbents ahead of x kill it?
    let mut x_blockers: Vec<u32> = Vec::new();
    for i in 0..t {
        let u = out[i];
        if ds.dist(u, x) <= d_jx / params.alpha {
            let u_color = ds.color(u);
            if u_color == x_color {
                return Incremental::Settled;
            }
            if !x_blockers.contains(&u_color) {
                x_blockers.push(u_color);
                if x_blockers.len() == params.m {
                    return Incremental::Settled;
                }
            }
        }
    }
    // x joins. Find the later incumbents it covers, bailing out if any of
    // them would die of it.
    let mut covered: Vec<usize> = Vec::new();
    for i in t..cap {
        let w = out[i];
        if ds.dist(x, w) <= tr.dists[i] / params.alpha {
            if ds.color(w) == x_color {
                return Incremental::Bail;
            }
            let b = &tr.blockers[i];
            if !b.contains(&x_color) {
                if b.len() + 1 == params.m {
                    return Incremental::Bail;
                }
                covered.push(i);
            }
        }
    }
    out.insert(t, x);
    tr.dists.insert(t, d_jx);
    tr.blockers.insert(t, x_blockers);
    for &i in &covered {
        tr.blockers[i + 1].push(x_color);
    }
    out.pop();
    tr.dists.pop();
    tr.blockers.pop();
    Incremental::Settled
}

/// Point nearest the coordinate mean of a seeded sample (the whole set when
/// it is small).
fn estimate_medoid(ds: &VectorDataset, seed: u64) -> u32 {
    let n = ds.n();
    let dim = ds.dim();
    let mut mean = vec![0.0f64; dim];
    let sample: Vec<u32> = if n <= MEDOID_SAMPLE {
        (0..n as u32).collect()
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x6d65_646f_6964);
        rand::seq::index::sample(&mut rng, n, MEDOID_SAMPLE)
            .into_iter()
            .map(|i| i as u32)
            .collect()
    };
    for &id in &sample {
        for (acc, &v) in mean.iter_mut().zip(ds.point(id)) {
            *acc += v as f64;
        }
    }
    let inv = 1.0 / sample.len() as f64;
    let mean_f32: Vec<f32> = mean.iter().map(|&v| (v * inv) as f32).collect();
    let dists = parallel::map_indexed(n, |i| ds.dist_to(&mean_f32, i as u32));
    let mut best = (f64::INFINITY, 0u32);
    for (i, &d) in dists.iter().enumerate() {
        if d < best.0 {
            best = (d, i as u32);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fast::search::diverse_search;
    use crate::oracle;
    use rand::Rng;

    /// Four overlapping clusters along the first axis. The spacing keeps the
    /// inter-cluster hops about as long as ordinary nearest-neighbor edges:
    /// with well-separated clusters and a small degree cap the relative-gain
    /// prune discards every long edge and the start cluster becomes a sink.
    /// Many distinct tail colors keep a small per-color cap from shrinking
    /// the whole queue below the beam width.
    fn clustered_dataset(n: usize, dim: usize, seed: u64) -> VectorDataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(n * dim);
        let mut colors = Vec::with_capacity(n);
        for _ in 0..n {
            let cluster = rng.random_range(0..4u32);
            for d in 0..dim {
                let center = if d == 0 { cluster as f32 * 3.0 } else { 0.0 };
                data.push(center + rng.random_range(-1.0..1.0f32));
            }
            colors.push(if rng.random_bool(0.8) { 0 } else { rng.random_range(1..80) });
        }
        VectorDataset::new(dim, data, colors).unwrap()
    }

    fn small_params() -> BuildParams {
        BuildParams {
            alpha: 1.2,
            degree_cap: 12,
            build_beam: 36,
            m: 2,
            passes: 2,
            seed: 7,
        }
    }

    #[test]
    fn single_point_builds_trivial_graph() {
        let ds = VectorDataset::new(2, vec![1.0, 2.0], vec![0]).unwrap();
        let g = build_fast(&ds, &BuildParams::default(), 1).unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.total_edges(), 0);
        assert_eq!(g.meta().start_node, Some(0));
    }

    #[test]
    fn degree_cap_holds_everywhere() {
        let ds = clustered_dataset(300, 4, 3);
        let g = build_fast(&ds, &small_params(), 0).unwrap();
        assert!(g.max_out_degree() <= 12);
        assert!(g.total_edges() > 0);
    }

    #[test]
    fn same_seed_same_graph_across_thread_counts() {
        let ds = clustered_dataset(200, 4, 5);
        let p = small_params();
        let a = build_fast(&ds, &p, 1).unwrap();
        let b = build_fast(&ds, &p, 4).unwrap();
        assert_eq!(a.adjacency(), b.adjacency());
        let c = build_fast(&ds, &p, 2).unwrap();
        assert_eq!(a.adjacency(), c.adjacency());
    }

    #[test]
    fn different_seed_changes_the_graph() {
        let ds = clustered_dataset(200, 4, 5);
        let mut p2 = small_params();
        p2.seed = 99;
        let a = build_fast(&ds, &small_params(), 1).unwrap();
        let b = build_fast(&ds, &p2, 1).unwrap();
        assert_ne!(a.adjacency(), b.adjacency());
    }

    #[test]
    fn searches_on_built_graph_reach_good_recall() {
        let ds = clustered_dataset(400, 4, 11);
        let g = build_fast(&ds, &small_params(), 0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let mut hits = 0usize;
        let mut total = 0usize;
        for _ in 0..40 {
            let q: Vec<f32> = (0..4)
                .map(|d| {
                    if d == 0 {
                        rng.random_range(-1.5..10.5f32)
                    } else {
                        rng.random_range(-1.0..1.0f32)
                    }
                })
                .collect();
            let truth = oracle::greedy_diverse_ground_truth(&ds, &q, 5, 4).unwrap();
            let (got, _) = diverse_search(&g, &ds, &q, 4, 5, 40).unwrap();
            let t = truth.ids();
            hits += got.ids().iter().filter(|id| t.contains(id)).count();
            total += t.len();
        }
        let recall = hits as f64 / total as f64;
        assert!(recall > 0.9, "recall {recall} too low for an easy instance");
    }

    #[test]
    fn rejects_bad_params() {
        let ds = clustered_dataset(10, 2, 1);
        let mut p = BuildParams::default();
        p.alpha = 1.0;
        assert!(build_fast(&ds, &p, 1).is_err());
        let mut p = BuildParams::default();
        p.build_beam = 10;
        p.degree_cap = 20;
        assert!(build_fast(&ds, &p, 1).is_err());
        let mut p = BuildParams::default();
        p.passes = 0;
        assert!(build_fast(&ds, &p, 1).is_err());
    }

    #[test]
    fn medoid_of_tight_cluster_is_the_central_point() {
        let ds = VectorDataset::new(
            1,
            vec![0.0, 10.0, 5.0, 4.9, 9.0],
            vec![0; 5],
        )
        .unwrap();
        // Mean = 5.78; id 2 at 5.0 is nearest (0.78 vs 0.88 for id 3).
        assert_eq!(estimate_medoid(&ds, 0), 2);
    }
}
