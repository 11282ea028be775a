//! Searches over the slow-built graphs, with their initialization
//! procedures and iteration-budget helper.

use crate::dataset::VectorDataset;
use crate::diversity::{is_diverse_at, DiversityConstraint};
use crate::error::{Error, Result};
use crate::graph::{BuilderKind, DiverseGraph};
use crate::metric::{rho_unchecked, RhoMode};
use crate::result::QueryResult;

/// Default iteration budget: k · ⌈log_α(aspect_ratio / ε)⌉, at least 1.
///
/// # Panics
/// On non-finite inputs, α <= 1, ε <= 0, or aspect_ratio < 1.
pub fn default_steps(k: usize, alpha: f64, aspect_ratio: f64, epsilon: f64) -> usize {
    assert!(alpha.is_finite() && alpha > 1.0, "alpha must be > 1");
    assert!(epsilon > 0.0, "epsilon must be > 0");
    assert!(
        aspect_ratio.is_finite() && aspect_ratio >= 1.0,
        "aspect ratio must be >= 1"
    );
    let per_k = ((aspect_ratio / epsilon).ln() / alpha.ln()).ceil().max(1.0);
    k.saturating_mul(per_k as usize).max(1)
}

/// First id of each distinct color, scanning ids ascending, until k are held.
pub fn init_colorful(ds: &VectorDataset, k: usize) -> Result<Vec<u32>> {
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(k);
    for id in 0..ds.n() as u32 {
        if seen.insert(ds.color(id)) {
            out.push(id);
            if out.len() == k {
                return Ok(out);
            }
        }
    }
    Err(Error::infeasible(format!(
        "dataset has {} distinct colors, need {k} for a colorful result",
        seen.len()
    )))
}

/// Diverse seeding: while some live point p (scanned ascending by id) has
/// more than k' live points inside its open ρ-ball of radius C/4, the k'
/// lowest ids of that ball join the solution and everything within C/2 of p
/// dies. Survivors join at the end. Succeeds whenever a (k', C)-diverse
/// k-subset exists, and its output is (k', C/4)-diverse.
pub fn init_diverse(ds: &VectorDataset, constraint: &DiversityConstraint) -> Result<Vec<u32>> {
    let (k, k_prime, c, mode) = (
        constraint.k,
        constraint.k_prime,
        constraint.c,
        constraint.rho_mode,
    );
    let quarter = c / 4.0;
    let half = c / 2.0;
    let mut live: Vec<u32> = (0..ds.n() as u32).collect();
    let mut sol: Vec<u32> = Vec::new();
    loop {
        let mut trigger: Option<(u32, Vec<u32>)> = None;
        for &p in &live {
            let ball: Vec<u32> = live
                .iter()
                .copied()
                .filter(|&v| rho_unchecked(ds, p, v, mode) < quarter)
                .collect();
            if ball.len() > k_prime {
                trigger = Some((p, ball));
                break;
            }
        }
        let Some((p, ball)) = trigger else { break };
        sol.extend_from_slice(&ball[..k_prime]);
        live.retain(|&v| rho_unchecked(ds, p, v, mode) >= half);
    }
    sol.extend_from_slice(&live);
    if sol.len() < k {
        return Err(Error::infeasible(format!(
            "diverse seeding found only {} of {k} points at threshold C = {c}",
            sol.len()
        )));
    }
    sol.sort_unstable();
    sol.truncate(k);
    debug_assert!(is_diverse_at(ds, &sol, k_prime, quarter, mode));
    Ok(sol)
}

/// Colorful search: starting from one point per color, repeatedly takes the
/// member furthest from the query and swaps it for the first out-neighbor
/// (ascending by distance to the query) that keeps the set colorful. Runs
/// exactly `steps` iterations. `monotone` restricts swaps to strictly closer
/// candidates and exits early once no swap applies.
pub fn search_colorful(
    g: &DiverseGraph,
    ds: &VectorDataset,
    q: &[f32],
    k: usize,
    steps: usize,
    monotone: bool,
) -> Result<QueryResult> {
    validate_graph(g, ds, q)?;
    let meta = g.meta();
    if meta.builder != BuilderKind::SlowColorful {
        return Err(Error::usage(format!(
            "colorful search needs a slow-colorful index, got {}",
            meta.builder.name()
        )));
    }
    if meta.k != k {
        return Err(Error::usage(format!(
            "index was built for k = {}, query asks k = {k}",
            meta.k
        )));
    }
    let mut evals: u64 = 0;
    let init = init_colorful(ds, k)?;
    let mut alg: Vec<(u32, f64)> = init
        .iter()
        .map(|&id| {
            evals += 1;
            (id, ds.dist_to(q, id))
        })
        .collect();
    let mut members: std::collections::HashSet<u32> = init.iter().copied().collect();
    let mut colors: std::collections::HashSet<u32> =
        init.iter().map(|&id| ds.color(id)).collect();
    debug_assert_eq!(colors.len(), k);

    let mut hops = 0usize;
    for _ in 0..steps {
        hops += 1;
        let far_idx = alg
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .unwrap();
        let (far_id, far_d) = alg[far_idx];
        let far_color = ds.color(far_id);
        let mut candidates: Vec<(f64, u32)> = g
            .out(far_id)
            .iter()
            .map(|&v| {
                evals += 1;
                (ds.dist_to(q, v), v)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut swapped = false;
        for &(d, u) in &candidates {
            if members.contains(&u) {
                continue;
            }
            let u_color = ds.color(u);
            if u_color != far_color && colors.contains(&u_color) {
                continue;
            }
            if monotone && !(d < far_d) {
                // Candidates are in ascending distance order; no later one
                // can be strictly closer either.
                break;
            }
            alg[far_idx] = (u, d);
            members.remove(&far_id);
            members.insert(u);
            colors.remove(&far_color);
            colors.insert(u_color);
            swapped = true;
            break;
        }
        debug_assert_eq!(colors.len(), k);
        if monotone && !swapped {
            break;
        }
    }
    Ok(QueryResult::from_hits(alg, hops, evals, false))
}

/// Diverse search at a fixed threshold: each round pools the out-neighbors
/// of the current set (plus the set itself), keeps the closest k−1 members,
/// and refills to k with the closest pooled candidate that keeps the set
/// (k', C/12)-diverse. Seeded by [`init_diverse`] at threshold C/3, whose
/// output guarantee is exactly (k', C/12).
pub fn search_primal(
    g: &DiverseGraph,
    ds: &VectorDataset,
    q: &[f32],
    constraint: &DiversityConstraint,
    steps: usize,
) -> Result<QueryResult> {
    validate_graph(g, ds, q)?;
    validate_diverse_graph(g, constraint.k, constraint.k_prime, constraint.rho_mode)?;
    let seed_constraint = DiversityConstraint::new(
        constraint.k,
        constraint.k_prime,
        constraint.c / 3.0,
        constraint.rho_mode,
    )?;
    let init = init_diverse(ds, &seed_constraint)?;
    let mut evals = init.len() as u64;
    let mut alg: Vec<(u32, f64)> = init.iter().map(|&id| (id, ds.dist_to(q, id))).collect();

    let c12 = constraint.c / 12.0;
    for _ in 0..steps {
        primal_round(
            g,
            ds,
            q,
            &mut alg,
            constraint.k_prime,
            c12,
            constraint.rho_mode,
            &mut evals,
        );
        debug_assert!({
            let ids: Vec<u32> = alg.iter().map(|&(id, _)| id).collect();
            is_diverse_at(ds, &ids, constraint.k_prime, c12, constraint.rho_mode)
        });
    }
    Ok(QueryResult::from_hits(alg, steps, evals, false))
}

/// Outcome of the radius-constrained diversity-maximizing search.
#[derive(Debug, Clone)]
pub struct DualOutcome {
    pub result: QueryResult,
    /// Diversity level the returned set is guaranteed to satisfy.
    pub certificate_c: f64,
    /// Set when the threshold ladder bottomed out before the radius target
    /// was met; the result is the best set found at the floor threshold.
    pub best_effort: bool,
}

/// Radius-constrained search: finds the largest seeding threshold on a
/// geometric grid, then repeatedly halves the working threshold C̄ and runs
/// c_loop · k · ⌈log_α(Δ/ε)⌉ refill rounds at C̄/12 until the set's radius
/// drops below ((α+1)/(α−1) + ε) · R or the grid floor is reached.
#[allow(clippy::too_many_arguments)]
pub fn search_dual(
    g: &DiverseGraph,
    ds: &VectorDataset,
    q: &[f32],
    k: usize,
    k_prime: usize,
    radius: f64,
    epsilon: f64,
    rho_mode: RhoMode,
    c_loop: usize,
) -> Result<DualOutcome> {
    validate_graph(g, ds, q)?;
    validate_diverse_graph(g, k, k_prime, rho_mode)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::usage(format!("radius must be > 0, got {radius}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::usage(format!("epsilon must be > 0, got {epsilon}")));
    }
    if c_loop == 0 {
        return Err(Error::usage("c_loop must be at least 1"));
    }
    let alpha = g.meta().alpha;

    // Geometric threshold grid over the observed ρ range.
    let (rho_floor, rho_max) = rho_range(ds, rho_mode);
    let grid: Vec<f64> = if rho_max > 0.0 && rho_floor > 0.0 {
        let mut v = Vec::new();
        let mut c = rho_max;
        while c >= rho_floor {
            v.push(c);
            c /= 2.0;
        }
        v.push(c); // one value below the floor so the floor itself is usable
        v
    } else {
        vec![1.0]
    };

    let mut seeded: Option<(f64, Vec<u32>)> = None;
    let mut last_err = None;
    for &c in &grid {
        let con = DiversityConstraint::new(k, k_prime, c, rho_mode)?;
        match init_diverse(ds, &con) {
            Ok(ids) => {
                seeded = Some((c, ids));
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let Some((c_init, init_ids)) = seeded else {
        return Err(last_err.unwrap_or_else(|| {
            Error::infeasible("no seeding threshold on the grid is feasible")
        }));
    };

    let mut evals = init_ids.len() as u64;
    let mut alg: Vec<(u32, f64)> = init_ids.iter().map(|&id| (id, ds.dist_to(q, id))).collect();

    let aspect = if ds.n() < 2 {
        1.0
    } else {
        crate::stats::estimate_stats(ds, 5000, 0)?.aspect_ratio
    };
    let rounds_per_level = c_loop
        .saturating_mul(default_steps(k, alpha, aspect, epsilon))
        .max(1);
    let target = ((alpha + 1.0) / (alpha - 1.0) + epsilon) * radius;
    let floor = grid.last().copied().unwrap_or(rho_floor);

    let mut cbar = 4.0 * c_init;
    let mut certificate = (c_init / 4.0).min(cbar / 12.0);
    let mut best_effort = false;
    let mut hops = 0usize;
    loop {
        let current_radius = alg
            .iter()
            .map(|&(_, d)| d)
            .fold(f64::NEG_INFINITY, f64::max);
        if current_radius <= target {
            break;
        }
        if cbar / 2.0 < floor {
            best_effort = true;
            break;
        }
        cbar /= 2.0;
        certificate = cbar / 12.0;
        for _ in 0..rounds_per_level {
            hops += 1;
            primal_round(g, ds, q, &mut alg, k_prime, cbar / 12.0, rho_mode, &mut evals);
        }
    }
    let result = QueryResult::from_hits(alg, hops, evals, false);
    debug_assert!({
        let ids = result.ids();
        is_diverse_at(ds, &ids, k_prime, certificate, rho_mode)
    });
    Ok(DualOutcome {
        result,
        certificate_c: certificate,
        best_effort,
    })
}

/// One trim-and-refill round shared by the fixed-threshold and
/// radius-constrained searches.
#[allow(clippy::too_many_arguments)]
fn primal_round(
    g: &DiverseGraph,
    ds: &VectorDataset,
    q: &[f32],
    alg: &mut Vec<(u32, f64)>,
    k_prime: usize,
    c_thresh: f64,
    mode: RhoMode,
    evals: &mut u64,
) {
    // Pool the out-neighborhood of the current set, including the set itself.
    let mut pool_ids: std::collections::HashSet<u32> = alg.iter().map(|&(id, _)| id).collect();
    let known: std::collections::HashMap<u32, f64> = alg.iter().map(|&(id, d)| (id, d)).collect();
    for &(id, _) in alg.iter() {
        for &v in g.out(id) {
            pool_ids.insert(v);
        }
    }
    let mut pool: Vec<(f64, u32)> = pool_ids
        .into_iter()
        .map(|v| {
            let d = known.get(&v).copied().unwrap_or_else(|| {
                *evals += 1;
                ds.dist_to(q, v)
            });
            (d, v)
        })
        .collect();
    pool.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Keep the closest k−1 members.
    alg.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let dropped = alg.pop().expect("set is nonempty");
    let kept: Vec<u32> = alg.iter().map(|&(id, _)| id).collect();

    // Open-ball member counts within the kept set.
    let mut counts: Vec<usize> = kept
        .iter()
        .map(|&s| {
            kept.iter()
                .filter(|&&t| rho_unchecked(ds, s, t, mode) < c_thresh)
                .count()
        })
        .collect();

    for &(d, u) in &pool {
        if kept.contains(&u) {
            continue;
        }
        // Admission: adding u keeps every open C-ball within k'.
        let mut u_ball = 1usize;
        let mut ok = true;
        for (i, &s) in kept.iter().enumerate() {
            if rho_unchecked(ds, u, s, mode) < c_thresh {
                u_ball += 1;
                if u_ball > k_prime || counts[i] + 1 > k_prime {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            for (i, &s) in kept.iter().enumerate() {
                if rho_unchecked(ds, u, s, mode) < c_thresh {
                    counts[i] += 1;
                }
            }
            alg.push((u, d));
            return;
        }
    }
    // The dropped member is always re-admissible; reaching here means the
    // pool scan missed it, which cannot happen.
    debug_assert!(false, "refill failed to restore the set to size k");
    alg.push(dropped);
}

/// Smallest nonzero and largest ρ value over a seeded sample of pairs
/// (exhaustive at small n).
fn rho_range(ds: &VectorDataset, mode: RhoMode) -> (f64, f64) {
    use rand::SeedableRng;
    let n = ds.n();
    let ids: Vec<u32> = if n <= 512 {
        (0..n as u32).collect()
    } else {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x5eed);
        rand::seq::index::sample(&mut rng, n, 512)
            .into_iter()
            .map(|i| i as u32)
            .collect()
    };
    let mut min_nz = f64::INFINITY;
    let mut max = 0.0f64;
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            let r = rho_unchecked(ds, a, b, mode);
            if r > 0.0 {
                min_nz = min_nz.min(r);
            }
            max = max.max(r);
        }
    }
    if !min_nz.is_finite() {
        (0.0, max)
    } else {
        (min_nz, max)
    }
}

fn validate_graph(g: &DiverseGraph, ds: &VectorDataset, q: &[f32]) -> Result<()> {
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
    Ok(())
}

fn validate_diverse_graph(
    g: &DiverseGraph,
    k: usize,
    k_prime: usize,
    mode: RhoMode,
) -> Result<()> {
    let meta = g.meta();
    if meta.builder != BuilderKind::SlowDiverse {
        return Err(Error::usage(format!(
            "diverse search needs a slow-diverse index, got {}",
            meta.builder.name()
        )));
    }
    if meta.k != k || meta.k_prime != k_prime {
        return Err(Error::usage(format!(
            "index was built for (k = {}, k' = {}), query asks (k = {k}, k' = {k_prime})",
            meta.k, meta.k_prime
        )));
    }
    if meta.rho_mode != Some(mode) {
        return Err(Error::usage(format!(
            "index was built under {} similarity, query asks {}",
            meta.rho_mode.map(|m| m.name()).unwrap_or("unknown"),
            mode.name()
        )));
    }
    Ok(())
}
