//! Color-aware α-pruning of candidate edge lists.

use std::collections::HashSet;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};

/// What a prune call kept, with the per-entry data the incremental re-prune
/// in the builder needs: each kept id's distance from `p` and the blocker
/// colors it had accumulated when it was kept (always fewer than `m`). All
/// three vectors are parallel and ordered by (distance, id).
#[derive(Debug, Clone, Default)]
pub(crate) struct PruneTrace {
    pub kept: Vec<u32>,
    pub dists: Vec<f64>,
    pub blockers: Vec<Vec<u32>>,
}

/// Prunes `candidates` down to at most `r_cap` out-neighbors for node `p`.
///
/// Candidates are processed ascending by distance from `p`. Each keeper `u`
/// then covers every remaining candidate `w` with `D(u,w) ≤ D(p,w)/alpha`:
/// `u`'s color joins `w`'s blocker set, and `w` is dropped once it has `m`
/// distinct blocker colors or shares `u`'s color. With `m = 1` this is the
/// classic single-blocker α-prune; larger `m` keeps α-covered candidates
/// alive until several colors vouch for the coverage, which preserves
/// color-diverse edges.
///
/// `p` itself and duplicate ids are ignored if present in `candidates`.
pub fn diverse_prune(
    ds: &VectorDataset,
    p: u32,
    candidates: &[u32],
    alpha: f64,
    r_cap: usize,
    m: usize,
) -> Result<Vec<u32>> {
    Ok(diverse_prune_traced(ds, p, candidates, alpha, r_cap, m)?.kept)
}

/// [`diverse_prune`] that also reports each kept id's distance from `p` and
/// its blocker colors, so callers that reshape an already-pruned list can
/// replay the decision incrementally.
pub(crate) fn diverse_prune_traced(
    ds: &VectorDataset,
    p: u32,
    candidates: &[u32],
    alpha: f64,
    r_cap: usize,
    m: usize,
) -> Result<PruneTrace> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::usage(format!("alpha must be > 1, got {alpha}")));
    }
    if r_cap == 0 {
        return Err(Error::usage("degree cap must be at least 1"));
    }
    if m == 0 {
        return Err(Error::usage("blocker count m must be at least 1"));
    }
    if p as usize >= ds.n() {
        return Err(Error::usage(format!("node {p} out of range")));
    }

    let mut seen = HashSet::with_capacity(candidates.len());
    let mut order: Vec<(f64, u32)> = candidates
        .iter()
        .copied()
        .filter(|&v| v != p && seen.insert(v))
        .map(|v| (ds.dist(p, v), v))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let cap = r_cap.min(order.len());
    let mut alive = vec![true; order.len()];
    let mut blockers: Vec<Vec<u32>> = vec![Vec::new(); order.len()];
    let mut trace = PruneTrace {
        kept: Vec::with_capacity(cap),
        dists: Vec::with_capacity(cap),
        blockers: Vec::with_capacity(cap),
    };
    for i in 0..order.len() {
        if !alive[i] {
            continue;
        }
        let (d_pu, u) = order[i];
        let u_color = ds.color(u);
        trace.kept.push(u);
        trace.dists.push(d_pu);
        trace.blockers.push(std::mem::take(&mut blockers[i]));
        if trace.kept.len() == r_cap {
            break;
        }
        for j in i + 1..order.len() {
            if !alive[j] {
                continue;
            }
            let (d_pw, w) = order[j];
            if ds.dist(u, w) <= d_pw / alpha {
                let b = &mut blockers[j];
                if !b.contains(&u_color) {
                    b.push(u_color);
                }
                if b.len() == m || u_color == ds.color(w) {
                    alive[j] = false;
                }
            }
        }
    }
    Ok(trace)
}
