//! All-pairs index builders. For every point p the other points are swept in
//! distance order; each sweep anchor u absorbs the points within
//! D(p, u) / (2α) of itself, and p gets edges to a small representative
//! subset of each anchor's absorbed group.

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::graph::{BuilderKind, DiverseGraph, GraphMeta};
use crate::metric::{rho_unchecked, RhoMode};
use crate::parallel;

/// Point count above which the CLI refuses slow builds without --force.
pub const SLOW_BUILD_GUARD: usize = 20_000;

/// Instrumentation from a slow build. `anticover_violations` stays zero by
/// construction; it is surfaced so test suites can assert the representative
/// anti-cover property was actually checked.
#[derive(Debug, Clone, Copy, Default)]
pub struct SlowBuildReport {
    pub max_out_degree: usize,
    pub total_edges: usize,
    /// Absorption tests performed across all sweeps.
    pub absorption_checks: u64,
    /// Anti-cover audits of (absorbed member, representative set) pairs.
    pub anticover_checks: u64,
    pub anticover_violations: u64,
    pub max_rep_size: usize,
}

/// Builds the colorful-search index: each anchor's representatives are its
/// first k distinctly-colored absorbed points (including the anchor).
pub fn build_colorful_slow(
    ds: &VectorDataset,
    k: usize,
    alpha: f64,
    threads: usize,
) -> Result<(DiverseGraph, SlowBuildReport)> {
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    validate_alpha(alpha)?;
    let meta = GraphMeta {
        builder: BuilderKind::SlowColorful,
        alpha,
        k,
        k_prime: 1,
        rho_mode: None,
        degree_cap: None,
        build_beam: None,
        m: None,
        start_node: None,
    };
    sweep_build(ds, alpha, threads, meta, |_, anchor, absorbed, report| {
        let mut rep = vec![anchor];
        let mut rep_colors = std::collections::HashSet::with_capacity(k);
        rep_colors.insert(ds.color(anchor));
        for &v in absorbed {
            if rep.len() >= k {
                break;
            }
            if rep_colors.insert(ds.color(v)) {
                rep.push(v);
            }
        }
        debug_assert!(rep.len() <= k);
        report.max_rep_size = report.max_rep_size.max(rep.len());
        rep
    })
}

/// Builds the diverse-search index: each anchor's representatives are a
/// farthest-point selection (under ρ) of max(1, ⌊k / k'⌋) points from its
/// absorbed group, seeded at the anchor itself.
pub fn build_diverse_slow(
    ds: &VectorDataset,
    k: usize,
    k_prime: usize,
    alpha: f64,
    rho_mode: RhoMode,
    threads: usize,
) -> Result<(DiverseGraph, SlowBuildReport)> {
    if k == 0 || k_prime == 0 || k_prime > k {
        return Err(Error::usage(format!(
            "need 1 <= k' <= k, got k = {k}, k' = {k_prime}"
        )));
    }
    validate_alpha(alpha)?;
    let m_rep = (k / k_prime).max(1);
    let meta = GraphMeta {
        builder: BuilderKind::SlowDiverse,
        alpha,
        k,
        k_prime,
        rho_mode: Some(rho_mode),
        degree_cap: None,
        build_beam: None,
        m: None,
        start_node: None,
    };
    sweep_build(ds, alpha, threads, meta, move |_, anchor, absorbed, report| {
        let mut bag = Vec::with_capacity(absorbed.len() + 1);
        bag.push(anchor);
        bag.extend_from_slice(absorbed);
        let rho = |a: u32, b: u32| rho_unchecked(ds, a, b, rho_mode);
        let rep = gonzalez_select_seeded(&bag, m_rep, &rho, Some(anchor));
        audit_anticover(&bag, &rep, &rho, report);
        report.max_rep_size = report.max_rep_size.max(rep.len());
        rep
    })
}

/// Verifies that every unpicked group member sits at least as close to the
/// representatives as the representatives sit to each other. This holds by
/// construction of the farthest-point selection; a violation is a bug.
fn audit_anticover(
    bag: &[u32],
    rep: &[u32],
    rho: &impl Fn(u32, u32) -> f64,
    report: &mut SlowBuildReport,
) {
    if rep.len() < 2 {
        // A single representative covers its group at any scale.
        report.anticover_checks += bag.len().saturating_sub(rep.len()) as u64;
        return;
    }
    let mut rep_min_pairwise = f64::INFINITY;
    for (i, &a) in rep.iter().enumerate() {
        for &b in &rep[i + 1..] {
            rep_min_pairwise = rep_min_pairwise.min(rho(a, b));
        }
    }
    for &v in bag {
        if rep.contains(&v) {
            continue;
        }
        report.anticover_checks += 1;
        let d_to_rep = rep
            .iter()
            .map(|&r| rho(v, r))
            .fold(f64::INFINITY, f64::min);
        if d_to_rep > rep_min_pairwise {
            report.anticover_violations += 1;
            panic!(
                "anti-cover violation: member {v} is {d_to_rep} from its representatives, \
                 which are only {rep_min_pairwise} apart"
            );
        }
    }
}

/// Farthest-point selection: first pick is the lowest id, each next pick
/// maximizes the minimum ρ to the picks so far (ties: lowest id). Returns
/// min(m, |ids|) points in pick order.
pub fn gonzalez_select(ids: &[u32], m: usize, rho: impl Fn(u32, u32) -> f64) -> Vec<u32> {
    gonzalez_select_seeded(ids, m, &rho, None)
}

pub(crate) fn gonzalez_select_seeded(
    ids: &[u32],
    m: usize,
    rho: &impl Fn(u32, u32) -> f64,
    first: Option<u32>,
) -> Vec<u32> {
    if ids.is_empty() || m == 0 {
        return Vec::new();
    }
    let first = first
        .filter(|f| ids.contains(f))
        .unwrap_or_else(|| *ids.iter().min().unwrap());
    let target = m.min(ids.len());
    let mut picks = Vec::with_capacity(target);
    picks.push(first);
    // Minimum distance from each candidate to the current picks.
    let mut min_d: Vec<(u32, f64)> = ids
        .iter()
        .filter(|&&v| v != first)
        .map(|&v| (v, rho(v, first)))
        .collect();
    while picks.len() < target {
        let (best_idx, _) = min_d
            .iter()
            .enumerate()
            .max_by(|(_, (ia, da)), (_, (ib, db))| da.total_cmp(db).then(ib.cmp(ia)))
            .expect("candidates remain while picks < target");
        let (chosen, _) = min_d.swap_remove(best_idx);
        picks.push(chosen);
        for (v, d) in min_d.iter_mut() {
            *d = d.min(rho(*v, chosen));
        }
    }
    picks
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::usage(format!("alpha must be > 1, got {alpha}")));
    }
    Ok(())
}

/// The shared all-pairs sweep. For each point p, anchors are taken in
/// ascending distance from p; each anchor absorbs the still-live points
/// within D(p, anchor) / (2α) of itself, and `select_rep` turns one
/// (anchor, absorbed) group into p's edges for that group.
fn sweep_build(
    ds: &VectorDataset,
    alpha: f64,
    threads: usize,
    meta: GraphMeta,
    select_rep: impl Fn(u32, u32, &[u32], &mut SlowBuildReport) -> Vec<u32> + Sync,
) -> Result<(DiverseGraph, SlowBuildReport)> {
    let n = ds.n();
    let per_point: Vec<Result<(Vec<u32>, SlowBuildReport)>> = parallel::run_pooled(threads, || {
        parallel::map_indexed(n, |p| {
            let p = p as u32;
            let mut report = SlowBuildReport::default();
            let mut alive: Vec<(f64, u32)> = (0..n as u32)
                .filter(|&v| v != p)
                .map(|v| (ds.dist(p, v), v))
                .collect();
            alive.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if let Some(&(d, v)) = alive.first() {
                if d == 0.0 {
                    return Err(Error::degenerate(format!(
                        "duplicate points {p} and {v} (distance 0)"
                    )));
                }
            }
            let mut edges = Vec::new();
            let mut absorbed = Vec::new();
            while let Some(&(d_pu, u)) = alive.first() {
                let radius = d_pu / (2.0 * alpha);
                absorbed.clear();
                let mut survivors = Vec::with_capacity(alive.len());
                for &(d_pv, v) in &alive[1..] {
                    report.absorption_checks += 1;
                    let d_uv = ds.dist(u, v);
                    if d_uv <= radius {
                        debug_assert!(d_uv <= d_pu / (2.0 * alpha));
                        absorbed.push(v);
                    } else {
                        survivors.push((d_pv, v));
                    }
                }
                let rep = select_rep(p, u, &absorbed, &mut report);
                debug_assert!(rep.contains(&u));
                edges.extend(rep);
                alive = survivors;
            }
            debug_assert!({
                let mut seen = std::collections::HashSet::new();
                edges.iter().all(|e| seen.insert(*e))
            });
            report.total_edges = edges.len();
            report.max_out_degree = edges.len();
            Ok((edges, report))
        })
    });

    let mut adj = Vec::with_capacity(n);
    let mut report = SlowBuildReport::default();
    for item in per_point {
        let (edges, local) = item?;
        report.max_out_degree = report.max_out_degree.max(local.max_out_degree);
        report.total_edges += local.total_edges;
        report.absorption_checks += local.absorption_checks;
        report.anticover_checks += local.anticover_checks;
        report.anticover_violations += local.anticover_violations;
        report.max_rep_size = report.max_rep_size.max(local.max_rep_size);
        adj.push(edges);
    }
    let graph = DiverseGraph::new(adj, meta)?;
    Ok((graph, report))
}
