//! Beam search with a per-color result cap, and the rerank-style baseline
//! that filters an unconstrained beam afterwards.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::fast::queue::DiverseQueue;
use crate::graph::DiverseGraph;
use crate::result::QueryResult;

thread_local! {
    // Per-thread distance memo (stamp, value) reused across searches: a slot
    // is valid only when its stamp equals the current epoch, so resetting
    // between searches is one counter bump instead of an O(n) refill.
    static DIST_MEMO: RefCell<(Vec<u32>, Vec<f64>, u32)> =
        const { RefCell::new((Vec::new(), Vec::new(), 0)) };
}

/// Greedy beam search whose working queue enforces the per-color cap while
/// it runs: starting from the graph's entry point, repeatedly expands the
/// closest unexpanded queue entry and offers all its out-neighbors to the
/// queue, until every queue entry is expanded. Returns the best `k` entries
/// (always k'-colorful) and the expansion order.
///
/// Graphs without a recorded entry point are searched from node 0.
pub fn diverse_search(
    g: &DiverseGraph,
    ds: &VectorDataset,
    q: &[f32],
    k_prime: usize,
    k: usize,
    beam: usize,
) -> Result<(QueryResult, Vec<u32>)> {
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    if beam < k {
        return Err(Error::usage(format!(
            "beam width {beam} must be at least k = {k}"
        )));
    }
    if g.n() != ds.n() {
        return Err(Error::usage(format!(
            "index holds {} nodes but dataset has {} points",
            g.n(),
            ds.n()
        )));
    }
    if q.len() != ds.dim() {
        return Err(Error::usage(format!(
            "query dimension {} does not match dataset dimension {}",
            q.len(),
            ds.dim()
        )));
    }

    let start = g.meta().start_node.unwrap_or(0);
    beam_search_core(ds, g.adjacency(), start, q, k_prime, k, beam)
}

/// The expansion loop itself, over raw adjacency lists so the incremental
/// builder can search its partially built graph without re-validating it.
pub(crate) fn beam_search_core(
    ds: &VectorDataset,
    adj: &[Vec<u32>],
    start: u32,
    q: &[f32],
    k_prime: usize,
    k: usize,
    beam: usize,
) -> Result<(QueryResult, Vec<u32>)> {
    let mut evals: u64 = 0;
    DIST_MEMO.with(|cell| {
        let mut memo = cell.borrow_mut();
        let (stamps, vals, epoch) = &mut *memo;
        if stamps.len() < ds.n() {
            stamps.resize(ds.n(), 0);
            vals.resize(ds.n(), 0.0);
        }
        if *epoch == u32::MAX {
            stamps.fill(0);
            *epoch = 0;
        }
        *epoch += 1;
        let tag = *epoch;
        let mut dist_q = |v: u32, evals: &mut u64| -> f64 {
            let i = v as usize;
            if stamps[i] != tag {
                *evals += 1;
                vals[i] = ds.dist_to(q, v);
                stamps[i] = tag;
            }
            vals[i]
        };

        let mut queue = DiverseQueue::new(beam, k_prime)?;
        queue.insert(start, dist_q(start, &mut evals), ds.color(start));
        let mut visited = Vec::new();
        while let Some((p, _)) = queue.pop_closest_unexpanded() {
            visited.push(p);
            for &v in &adj[p as usize] {
                queue.insert(v, dist_q(v, &mut evals), ds.color(v));
            }
        }
        let hits = queue.top_k(k);
        let underfull = hits.len() < k;
        Ok((
            QueryResult::from_hits(hits, visited.len(), evals, underfull),
            visited,
        ))
    })
}

/// Unconstrained beam search for `r` candidates followed by a greedy filter:
/// candidates are taken ascending by distance, skipping any whose color
/// already holds k' picks, until `k` survive (or the candidates run out,
/// setting the underfull flag).
pub fn baseline_postprocess_search(
    g: &DiverseGraph,
    ds: &VectorDataset,
    q: &[f32],
    k: usize,
    k_prime: usize,
    r: usize,
) -> Result<QueryResult> {
    if r < k {
        return Err(Error::usage(format!(
            "candidate count r = {r} must be at least k = {k}"
        )));
    }
    if k_prime == 0 {
        return Err(Error::usage("k' must be at least 1"));
    }
    // Cap disabled: with per-color cap = r the queue can never hit it.
    let (candidates, _) = diverse_search(g, ds, q, r, r, r)?;
    let mut counts: HashMap<u32, usize> = HashMap::new();
    let mut hits = Vec::with_capacity(k);
    for &(id, d) in &candidates.hits {
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
    Ok(QueryResult::from_hits(
        hits,
        candidates.hops,
        candidates.distance_evals,
        underfull,
    ))
}
