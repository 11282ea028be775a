//! Recall-vs-latency sweeps across search configurations, and the builder
//! ablation over the blocker count m.

use std::time::Instant;

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::fast::{baseline_postprocess_search, build_fast, diverse_search, BuildParams};
use crate::graph::DiverseGraph;
use crate::oracle::{recall_at_k, GroundTruth};
use crate::parallel;

/// The three search configurations the sweep compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigLabel {
    /// Unconstrained beam search for r = L candidates, color cap applied
    /// afterwards.
    Baseline,
    /// Color-oblivious build (m = 1), cap enforced inside the search.
    StdBuildDivSearch,
    /// Color-aware build, cap enforced inside the search.
    DivBuildDivSearch,
}

impl ConfigLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConfigLabel::Baseline => "baseline",
            ConfigLabel::StdBuildDivSearch => "std-build+div-search",
            ConfigLabel::DivBuildDivSearch => "div-build+div-search",
        }
    }
}

impl std::fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One configuration to sweep: a label and the graph it searches.
pub struct SweepConfig<'a> {
    pub label: ConfigLabel,
    pub graph: &'a DiverseGraph,
}

/// One (config, L) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub config: ConfigLabel,
    pub l: usize,
    pub k: usize,
    pub k_prime: usize,
    /// Blocker count of the build behind this row (1 for color-oblivious).
    pub m: usize,
    pub recall: f64,
    pub mean_us: f64,
    pub p95_us: f64,
    /// Mean distance evaluations per query — the hardware-independent cost.
    pub dist_evals: f64,
}

/// Runs every query through every (config, L) cell and aggregates recall
/// against the ground truth, wall-clock latency (mean and p95), and mean
/// distance evaluations. Queries run in parallel; per-query results are
/// gathered in query order, so recall and dist_evals are deterministic.
pub fn run_sweep(
    ds: &VectorDataset,
    queries: &[Vec<f32>],
    gt: &GroundTruth,
    configs: &[SweepConfig<'_>],
    l_values: &[usize],
    threads: usize,
) -> Result<Vec<SweepRow>> {
    if queries.len() != gt.entries.len() {
        return Err(Error::usage(format!(
            "{} queries but ground truth holds {} entries",
            queries.len(),
            gt.entries.len()
        )));
    }
    if queries.is_empty() {
        return Err(Error::usage("no queries to sweep"));
    }
    for l in l_values {
        if *l < gt.k {
            return Err(Error::usage(format!("L = {l} below k = {}", gt.k)));
        }
    }
    let mut rows = Vec::with_capacity(configs.len() * l_values.len());
    parallel::run_pooled(threads, || -> Result<()> {
        for config in configs {
            for &l in l_values {
                rows.push(measure_cell(ds, queries, gt, config, l)?);
            }
        }
        Ok(())
    })?;
    Ok(rows)
}

fn measure_cell(
    ds: &VectorDataset,
    queries: &[Vec<f32>],
    gt: &GroundTruth,
    config: &SweepConfig<'_>,
    l: usize,
) -> Result<SweepRow> {
    let (k, k_prime) = (gt.k, gt.k_prime);
    let per_query: Vec<Result<(f64, f64, u64)>> = parallel::map_indexed(queries.len(), |qi| {
        let q = &queries[qi];
        let t0 = Instant::now();
        let result = match config.label {
            ConfigLabel::Baseline => baseline_postprocess_search(config.graph, ds, q, k, k_prime, l)?,
            ConfigLabel::StdBuildDivSearch | ConfigLabel::DivBuildDivSearch => {
                diverse_search(config.graph, ds, q, k_prime, k, l)?.0
            }
        };
        let us = t0.elapsed().as_secs_f64() * 1e6;
        let recall = recall_at_k(&result.ids(), &gt.entries[qi].ids)?;
        Ok((recall, us, result.distance_evals))
    });

    let mut recalls = Vec::with_capacity(queries.len());
    let mut lats = Vec::with_capacity(queries.len());
    let mut evals_sum = 0u64;
    for r in per_query {
        let (recall, us, evals) = r?;
        recalls.push(recall);
        lats.push(us);
        evals_sum += evals;
    }
    let nq = queries.len() as f64;
    lats.sort_by(|a, b| a.total_cmp(b));
    let p95_idx = ((0.95 * (lats.len() as f64 - 1.0)).round() as usize).min(lats.len() - 1);
    Ok(SweepRow {
        config: config.label,
        l,
        k,
        k_prime,
        m: config.graph.meta().m.unwrap_or(1),
        recall: recalls.iter().sum::<f64>() / nq,
        mean_us: lats.iter().sum::<f64>() / nq,
        p95_us: lats[p95_idx],
        dist_evals: evals_sum as f64 / nq,
    })
}

/// Builds one index per m (same α, R, L, seed), sweeps search L on each, and
/// reports the build seconds next to the rows.
#[allow(clippy::too_many_arguments)]
pub fn run_ablation_m(
    ds: &VectorDataset,
    queries: &[Vec<f32>],
    gt: &GroundTruth,
    base: &BuildParams,
    m_values: &[usize],
    l_values: &[usize],
    threads: usize,
) -> Result<(Vec<SweepRow>, Vec<(usize, f64)>)> {
    let mut rows = Vec::new();
    let mut build_seconds = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let mut params = *base;
        params.m = m;
        let t0 = Instant::now();
        let graph = build_fast(ds, &params, threads)?;
        build_seconds.push((m, t0.elapsed().as_secs_f64()));
        let config = SweepConfig {
            label: ConfigLabel::DivBuildDivSearch,
            graph: &graph,
        };
        rows.extend(run_sweep(ds, queries, gt, &[config], l_values, threads)?);
    }
    Ok((rows, build_seconds))
}

/// The CSV header every sweep file starts with.
pub const CSV_HEADER: &str = "config,L,k,kprime,m,recall,mean_us,p95_us,dist_evals";

/// Renders rows as CSV with the fixed header.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.1},{:.1},{:.1}\n",
            r.config, r.l, r.k, r.k_prime, r.m, r.recall, r.mean_us, r.p95_us, r.dist_evals
        ));
    }
    out
}

/// Fraction of adjacent (config, increasing-L) row pairs with nondecreasing
/// recall; beam search is usually but not provably monotone in L, so the
/// harness reports this instead of asserting it.
pub fn recall_monotonicity(rows: &[SweepRow]) -> f64 {
    let mut ok = 0usize;
    let mut total = 0usize;
    for w in rows.windows(2) {
        if w[0].config == w[1].config && w[0].l < w[1].l && w[0].m == w[1].m {
            total += 1;
            if w[1].recall >= w[0].recall - 1e-12 {
                ok += 1;
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        ok as f64 / total as f64
    }
}
