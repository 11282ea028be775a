//! Argument structs and implementations for the five subcommands.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use divann::fast::{baseline_postprocess_search, build_fast, diverse_search, BuildParams};
use divann::io::{
    arxiv_colors, gen_colors_hyperplane, load_colors, load_fvecs, load_gt, load_index,
    save_colors, save_gt, save_index, sift_skewed_colors,
};
use divann::oracle::{ground_truth_all, recall_at_k};
use divann::sweep::{rows_to_csv, run_ablation_m, run_sweep, ConfigLabel, SweepConfig};
use divann::theory::{
    build_colorful_slow, build_diverse_slow, default_steps, search_colorful, search_dual,
    search_primal, SLOW_BUILD_GUARD,
};
use divann::{
    estimate_stats, is_k_colorful, parallel, DiverseGraph, DiversityConstraint, Error,
    QueryResult, Result, RhoMode, VectorDataset,
};

use crate::config::{self, pick, FileConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    /// One dominant color with probability 0.8, tail uniform over 999 others.
    SiftSkewed,
    /// Three dominant colors with total probability 0.9, tail over 997 others.
    Arxiv,
    /// Bucket space with seeded random hyperplanes and color by bucket.
    Hyperplane,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Builder {
    /// Incremental graph build with diversity-aware pruning.
    Fast,
    /// Quadratic all-pairs build carrying the colorful search guarantee.
    SlowColorful,
    /// Quadratic all-pairs build carrying the diverse search guarantees.
    SlowDiverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Plain beam search, then a greedy color-cap filter on the pool.
    Baseline,
    /// Beam search with the per-color cap enforced inside the queue.
    Diverse,
    /// Furthest-member swap search on a slow-colorful index.
    TheoryColorful,
    /// Fixed-threshold refill search on a slow-diverse index.
    TheoryPrimal,
    /// Radius-constrained diversity-maximizing search on a slow-diverse index.
    TheoryDual,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

/// Prints the one-line resolved configuration every command emits before
/// doing any work.
fn echo(cmd: &str, fields: &[(&str, String)]) {
    let mut line = format!("config: command={cmd}");
    for (key, value) in fields {
        let _ = write!(line, " {key}={value}");
    }
    println!("{line}");
}

fn join_list(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_rho(flag: Option<&str>) -> Result<Option<RhoMode>> {
    flag.map(str::parse).transpose()
}

fn load_dataset(vectors: &Path, colors: &Path) -> Result<VectorDataset> {
    let ds = load_fvecs(vectors)?;
    let colors = load_colors(colors, ds.n())?;
    ds.with_colors(colors)
}

fn load_queries(path: &Path, dim: usize) -> Result<Vec<Vec<f32>>> {
    let qs = load_fvecs(path)?;
    if qs.dim() != dim {
        return Err(Error::usage(format!(
            "query dimension {} does not match dataset dimension {dim}",
            qs.dim()
        )));
    }
    Ok((0..qs.n()).map(|i| qs.point(i as u32).to_vec()).collect())
}

// ---------------------------------------------------------------------------
// gen-colors

#[derive(Args)]
pub struct GenColorsArgs {
    /// Color scheme to draw from.
    #[arg(long, value_enum)]
    pub scheme: Scheme,
    /// Number of colors to generate (sift-skewed and arxiv).
    #[arg(long)]
    pub n: Option<usize>,
    /// Vector file whose points get bucketed (hyperplane).
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Bucket count, rounded up to a power of two (hyperplane).
    #[arg(long)]
    pub buckets: Option<usize>,
    /// Probability a point keeps its bucket color (hyperplane).
    #[arg(long)]
    pub primary_prob: Option<f64>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output color file; a `.txt` extension writes the text encoding.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn gen_colors(a: GenColorsArgs, cfg: &FileConfig) -> Result<()> {
    let seed = pick(a.seed, cfg.seed, 0);
    let colors = match a.scheme {
        Scheme::SiftSkewed | Scheme::Arxiv => {
            let n = a
                .n
                .ok_or_else(|| Error::usage("--n is required for this scheme"))?;
            echo(
                "gen-colors",
                &[
                    ("scheme", value_name(&a.scheme)),
                    ("n", n.to_string()),
                    ("seed", seed.to_string()),
                    ("out", a.out.display().to_string()),
                ],
            );
            match a.scheme {
                Scheme::SiftSkewed => sift_skewed_colors(n, seed),
                _ => arxiv_colors(n, seed),
            }
        }
        Scheme::Hyperplane => {
            let vectors = a
                .vectors
                .ok_or_else(|| Error::usage("--vectors is required for the hyperplane scheme"))?;
            let buckets = a
                .buckets
                .ok_or_else(|| Error::usage("--buckets is required for the hyperplane scheme"))?;
            let primary_prob = a.primary_prob.ok_or_else(|| {
                Error::usage("--primary-prob is required for the hyperplane scheme")
            })?;
            echo(
                "gen-colors",
                &[
                    ("scheme", value_name(&a.scheme)),
                    ("vectors", vectors.display().to_string()),
                    ("buckets", buckets.to_string()),
                    ("primary_prob", primary_prob.to_string()),
                    ("seed", seed.to_string()),
                    ("out", a.out.display().to_string()),
                ],
            );
            let ds = load_fvecs(&vectors)?;
            gen_colors_hyperplane(&ds, buckets, primary_prob, seed)?
        }
    };
    save_colors(&colors, &a.out)?;
    print_histogram(&colors);
    println!("wrote {}", a.out.display());
    Ok(())
}

fn print_histogram(colors: &[u32]) {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for &c in colors {
        *counts.entry(c).or_insert(0) += 1;
    }
    let mut by_count: Vec<(u32, usize)> = counts.into_iter().collect();
    by_count.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    println!("colors: {} points, {} distinct", colors.len(), by_count.len());
    let total = colors.len() as f64;
    for &(color, count) in by_count.iter().take(5) {
        println!(
            "  color {color}: {count} ({:.1}%)",
            100.0 * count as f64 / total
        );
    }
    if by_count.len() > 5 {
        let rest: usize = by_count[5..].iter().map(|&(_, c)| c).sum();
        println!(
            "  other {} colors: {rest} ({:.1}%)",
            by_count.len() - 5,
            100.0 * rest as f64 / total
        );
    }
}

// ---------------------------------------------------------------------------
// build

#[derive(Args)]
pub struct BuildArgs {
    /// Input vector file.
    #[arg(long)]
    pub vectors: PathBuf,
    /// Input color file (binary u32s, or one decimal per line with `.txt`).
    #[arg(long)]
    pub colors: PathBuf,
    /// Output index snapshot.
    #[arg(long)]
    pub out: PathBuf,
    /// Index construction algorithm.
    #[arg(long, value_enum, default_value = "fast")]
    pub builder: Builder,
    /// Pruning slack; must be > 1.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Out-degree cap of the fast build.
    #[arg(long)]
    pub degree_cap: Option<usize>,
    /// Beam width of the fast build's insertion searches.
    #[arg(long)]
    pub build_beam: Option<usize>,
    /// Distinct blocker colors needed to drop an edge in the fast build.
    #[arg(long)]
    pub m: Option<usize>,
    /// Full passes over the point set in the fast build.
    #[arg(long)]
    pub passes: Option<usize>,
    /// Seed for the insertion shuffle and the medoid sample.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Result-set size the slow builders prepare for.
    #[arg(long)]
    pub k: Option<usize>,
    /// Per-color multiplicity for the slow-diverse builder.
    #[arg(long)]
    pub k_prime: Option<usize>,
    /// Diversity measure for the slow-diverse builder: binary or euclidean.
    #[arg(long)]
    pub rho: Option<String>,
    /// Run a slow builder past the point-count guard anyway.
    #[arg(long)]
    pub force: bool,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn build(a: BuildArgs, cfg: &FileConfig) -> Result<()> {
    let threads = pick(a.threads, cfg.threads, 0);
    let alpha = pick(a.alpha, cfg.alpha, config::DEFAULT_ALPHA);
    let seed = pick(a.seed, cfg.seed, 0);
    let k = pick(a.k, cfg.k, config::DEFAULT_K);
    let k_prime = pick(a.k_prime, cfg.k_prime, config::DEFAULT_K_PRIME);
    let rho = parse_rho(a.rho.as_deref())?.unwrap_or(RhoMode::BinaryColor);
    let params = BuildParams {
        alpha,
        degree_cap: pick(a.degree_cap, cfg.degree_cap, config::DEFAULT_DEGREE_CAP),
        build_beam: pick(a.build_beam, cfg.build_beam, config::DEFAULT_BUILD_BEAM),
        m: pick(a.m, cfg.m, config::DEFAULT_M),
        passes: pick(a.passes, cfg.passes, config::DEFAULT_PASSES),
        seed,
    };

    let mut fields = vec![
        ("builder", value_name(&a.builder)),
        ("vectors", a.vectors.display().to_string()),
        ("colors", a.colors.display().to_string()),
        ("out", a.out.display().to_string()),
        ("alpha", alpha.to_string()),
    ];
    match a.builder {
        Builder::Fast => fields.extend([
            ("degree_cap", params.degree_cap.to_string()),
            ("build_beam", params.build_beam.to_string()),
            ("m", params.m.to_string()),
            ("passes", params.passes.to_string()),
            ("seed", seed.to_string()),
        ]),
        Builder::SlowColorful => fields.push(("k", k.to_string())),
        Builder::SlowDiverse => fields.extend([
            ("k", k.to_string()),
            ("k_prime", k_prime.to_string()),
            ("rho", rho.name().to_string()),
        ]),
    }
    fields.push(("threads", threads.to_string()));
    echo("build", &fields);

    let ds = load_dataset(&a.vectors, &a.colors)?;
    if a.builder != Builder::Fast && ds.n() > SLOW_BUILD_GUARD && !a.force {
        return Err(Error::usage(format!(
            "slow builders scan all pairs; {} points exceeds the {SLOW_BUILD_GUARD}-point guard \
             (pass --force to run anyway)",
            ds.n()
        )));
    }

    let t0 = Instant::now();
    let (g, passes) = match a.builder {
        Builder::Fast => (build_fast(&ds, &params, threads)?, params.passes),
        Builder::SlowColorful => (build_colorful_slow(&ds, k, alpha, threads)?.0, 1),
        Builder::SlowDiverse => (
            build_diverse_slow(&ds, k, k_prime, alpha, rho, threads)?.0,
            1,
        ),
    };
    let seconds = t0.elapsed().as_secs_f64();
    save_index(&g, ds.colors(), ds.dim(), &a.out)?;
    println!(
        "built index: n={} max_out_degree={} total_edges={} passes={passes} seconds={seconds:.2}",
        ds.n(),
        g.max_out_degree(),
        g.total_edges()
    );
    println!("wrote {}", a.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// gt

#[derive(Args)]
pub struct GtArgs {
    /// Input vector file.
    #[arg(long)]
    pub vectors: PathBuf,
    /// Input color file.
    #[arg(long)]
    pub colors: PathBuf,
    /// Query vector file.
    #[arg(long)]
    pub queries: PathBuf,
    /// Output ground-truth file.
    #[arg(long)]
    pub out: PathBuf,
    /// Results per query.
    #[arg(long)]
    pub k: Option<usize>,
    /// Per-color cap.
    #[arg(long)]
    pub k_prime: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn gt(a: GtArgs, cfg: &FileConfig) -> Result<()> {
    let k = pick(a.k, cfg.k, config::DEFAULT_K);
    let k_prime = pick(a.k_prime, cfg.k_prime, config::DEFAULT_K_PRIME);
    let threads = pick(a.threads, cfg.threads, 0);
    echo(
        "gt",
        &[
            ("vectors", a.vectors.display().to_string()),
            ("colors", a.colors.display().to_string()),
            ("queries", a.queries.display().to_string()),
            ("out", a.out.display().to_string()),
            ("k", k.to_string()),
            ("k_prime", k_prime.to_string()),
            ("threads", threads.to_string()),
        ],
    );
    let ds = load_dataset(&a.vectors, &a.colors)?;
    let queries = load_queries(&a.queries, ds.dim())?;
    let t0 = Instant::now();
    let truth = ground_truth_all(&ds, &queries, k, k_prime, threads)?;
    let underfull = truth.entries.iter().filter(|e| e.ids.len() < k).count();
    save_gt(&truth, &a.out)?;
    println!(
        "ground truth: queries={} k={k} k_prime={k_prime} underfull={underfull} seconds={:.2}",
        truth.entries.len(),
        t0.elapsed().as_secs_f64()
    );
    println!("wrote {}", a.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// search

#[derive(Args)]
pub struct SearchArgs {
    /// Saved index snapshot.
    #[arg(long)]
    pub index: PathBuf,
    /// Vector file the index was built from.
    #[arg(long)]
    pub vectors: PathBuf,
    /// Query vector file.
    #[arg(long)]
    pub queries: PathBuf,
    /// Search algorithm.
    #[arg(long, value_enum, default_value = "diverse")]
    pub mode: Mode,
    /// Results per query (theory modes default to the index's k).
    #[arg(long)]
    pub k: Option<usize>,
    /// Per-color cap (theory modes default to the index's k').
    #[arg(long)]
    pub k_prime: Option<usize>,
    /// Beam width (diverse) or candidate pool size (baseline).
    #[arg(long)]
    pub l: Option<usize>,
    /// Iteration budget for theory-colorful and theory-primal.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Restrict theory-colorful swaps to strictly improving ones.
    #[arg(long)]
    pub monotone: bool,
    /// Diversity threshold (theory-primal).
    #[arg(long)]
    pub c: Option<f64>,
    /// Target radius (theory-dual).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Slack for iteration budgets and the dual radius target.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Refill-round multiplier for theory-dual.
    #[arg(long)]
    pub c_loop: Option<usize>,
    /// Ground-truth file; adds a recall line to the summary.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// Write per-query results here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

struct PerQuery {
    result: QueryResult,
    certificate_c: Option<f64>,
    best_effort: bool,
}

fn plain(result: QueryResult) -> PerQuery {
    PerQuery {
        result,
        certificate_c: None,
        best_effort: false,
    }
}

pub fn search(a: SearchArgs, cfg: &FileConfig) -> Result<()> {
    let threads = pick(a.threads, cfg.threads, 0);
    let epsilon = pick(a.epsilon, cfg.epsilon, config::DEFAULT_EPSILON);

    let (g, colors, dim) = load_index(&a.index)?;
    let ds = load_fvecs(&a.vectors)?;
    if ds.dim() != dim {
        return Err(Error::usage(format!(
            "index stores dimension {dim} but {} has dimension {}",
            a.vectors.display(),
            ds.dim()
        )));
    }
    let ds = ds.with_colors(colors)?;
    let queries = load_queries(&a.queries, dim)?;

    let meta = g.meta();
    let theory = matches!(
        a.mode,
        Mode::TheoryColorful | Mode::TheoryPrimal | Mode::TheoryDual
    );
    let k = pick(a.k, cfg.k, if theory { meta.k } else { config::DEFAULT_K });
    let k_prime = pick(
        a.k_prime,
        cfg.k_prime,
        if theory { meta.k_prime } else { config::DEFAULT_K_PRIME },
    );
    let l = pick(a.l, cfg.l, config::DEFAULT_L);
    let rho = meta.rho_mode.unwrap_or(RhoMode::BinaryColor);

    let mut fields = vec![
        ("mode", value_name(&a.mode)),
        ("index", a.index.display().to_string()),
        ("queries", a.queries.display().to_string()),
        ("k", k.to_string()),
        ("k_prime", k_prime.to_string()),
    ];

    let steps = match a.mode {
        Mode::TheoryColorful | Mode::TheoryPrimal => match a.steps.or(cfg.steps) {
            Some(s) => s,
            None => {
                let stats = estimate_stats(&ds, 2000, 0)?;
                default_steps(k, meta.alpha, stats.aspect_ratio, epsilon)
            }
        },
        _ => 0,
    };
    let constraint = match a.mode {
        Mode::TheoryPrimal => {
            let c = a
                .c
                .or(cfg.c)
                .ok_or_else(|| Error::usage("--c is required for theory-primal"))?;
            Some(DiversityConstraint::new(k, k_prime, c, rho)?)
        }
        _ => None,
    };
    let radius = match a.mode {
        Mode::TheoryDual => Some(
            a.radius
                .or(cfg.radius)
                .ok_or_else(|| Error::usage("--radius is required for theory-dual"))?,
        ),
        _ => None,
    };
    let c_loop = pick(a.c_loop, cfg.c_loop, config::DEFAULT_C_LOOP);

    match a.mode {
        Mode::Baseline | Mode::Diverse => fields.push(("l", l.to_string())),
        Mode::TheoryColorful => fields.extend([
            ("steps", steps.to_string()),
            ("monotone", a.monotone.to_string()),
        ]),
        Mode::TheoryPrimal => fields.extend([
            ("steps", steps.to_string()),
            ("c", constraint.as_ref().map(|c| c.c).unwrap_or(0.0).to_string()),
            ("rho", rho.name().to_string()),
        ]),
        Mode::TheoryDual => fields.extend([
            ("radius", radius.unwrap_or(0.0).to_string()),
            ("epsilon", epsilon.to_string()),
            ("c_loop", c_loop.to_string()),
            ("rho", rho.name().to_string()),
        ]),
    }
    fields.push(("threads", threads.to_string()));
    echo("search", &fields);

    let run_one = |q: &Vec<f32>| -> Result<PerQuery> {
        match a.mode {
            Mode::Baseline => baseline_postprocess_search(&g, &ds, q, k, k_prime, l).map(plain),
            Mode::Diverse => diverse_search(&g, &ds, q, k_prime, k, l).map(|(r, _)| plain(r)),
            Mode::TheoryColorful => search_colorful(&g, &ds, q, k, steps, a.monotone).map(plain),
            Mode::TheoryPrimal => {
                let constraint = constraint.as_ref().expect("set for this mode");
                search_primal(&g, &ds, q, constraint, steps).map(plain)
            }
            Mode::TheoryDual => {
                let radius = radius.expect("set for this mode");
                search_dual(&g, &ds, q, k, k_prime, radius, epsilon, rho, c_loop).map(|o| {
                    PerQuery {
                        result: o.result,
                        certificate_c: Some(o.certificate_c),
                        best_effort: o.best_effort,
                    }
                })
            }
        }
    };
    let t0 = Instant::now();
    let outcomes: Vec<Result<PerQuery>> =
        parallel::run_pooled(threads, || parallel::map_slice(&queries, run_one));
    let seconds = t0.elapsed().as_secs_f64();
    let mut results = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        results.push(o?);
    }

    let mut out_text = String::new();
    for (i, pq) in results.iter().enumerate() {
        let _ = write!(out_text, "q{i}");
        for &(id, d) in &pq.result.hits {
            let _ = write!(out_text, " {id}:{d:.6}");
        }
        out_text.push('\n');
    }
    match &a.out {
        Some(path) => std::fs::write(path, &out_text)?,
        None => print!("{out_text}"),
    }

    let nq = results.len().max(1) as f64;
    let mean_evals: f64 =
        results.iter().map(|p| p.result.distance_evals as f64).sum::<f64>() / nq;
    let mean_radius: f64 = results.iter().map(|p| p.result.radius).sum::<f64>() / nq;
    let colorful = results
        .iter()
        .filter(|p| is_k_colorful(&ds.colors_of(&p.result.ids()), k_prime))
        .count();
    let underfull = results.iter().filter(|p| p.result.underfull).count();
    println!(
        "summary: queries={} mean_dist_evals={mean_evals:.1} mean_radius={mean_radius:.4} \
         colorful={colorful}/{} underfull={underfull} seconds={seconds:.2}",
        results.len(),
        results.len()
    );
    if a.mode == Mode::TheoryDual {
        let min_certificate = results
            .iter()
            .filter_map(|p| p.certificate_c)
            .fold(f64::INFINITY, f64::min);
        let best_effort = results.iter().filter(|p| p.best_effort).count();
        println!(
            "dual: min_certificate_c={min_certificate:.6} best_effort={best_effort}/{}",
            results.len()
        );
    }
    if let Some(gt_path) = &a.gt {
        let truth = load_gt(gt_path)?;
        if truth.entries.len() != results.len() {
            return Err(Error::usage(format!(
                "ground truth has {} queries, ran {}",
                truth.entries.len(),
                results.len()
            )));
        }
        let mut total = 0.0;
        for (pq, entry) in results.iter().zip(&truth.entries) {
            total += recall_at_k(&pq.result.ids(), &entry.ids)?;
        }
        println!("recall@{}: {:.4}", truth.k, total / nq);
    }
    if let Some(path) = &a.out {
        println!("wrote {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench

#[derive(Args)]
pub struct BenchArgs {
    /// Input vector file.
    #[arg(long)]
    pub vectors: PathBuf,
    /// Input color file.
    #[arg(long)]
    pub colors: PathBuf,
    /// Query vector file.
    #[arg(long)]
    pub queries: PathBuf,
    /// Ground-truth file; recall is measured against it.
    #[arg(long)]
    pub gt: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Beam widths to sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub l_values: Option<Vec<usize>>,
    /// Run the build-parameter ablation over these m values instead of the
    /// three-configuration sweep.
    #[arg(long, value_delimiter = ',')]
    pub ablate_m: Option<Vec<usize>>,
    /// Pruning slack; must be > 1.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Out-degree cap.
    #[arg(long)]
    pub degree_cap: Option<usize>,
    /// Beam width of the insertion searches.
    #[arg(long)]
    pub build_beam: Option<usize>,
    /// Distinct blocker colors for the diversity-aware build.
    #[arg(long)]
    pub m: Option<usize>,
    /// Full passes over the point set.
    #[arg(long)]
    pub passes: Option<usize>,
    /// Seed for the insertion shuffle and the medoid sample.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn bench(a: BenchArgs, cfg: &FileConfig) -> Result<()> {
    let threads = pick(a.threads, cfg.threads, 0);
    let l_values = a
        .l_values
        .clone()
        .or_else(|| cfg.l_values.clone())
        .unwrap_or_else(|| vec![config::DEFAULT_L]);
    let params = BuildParams {
        alpha: pick(a.alpha, cfg.alpha, config::DEFAULT_ALPHA),
        degree_cap: pick(a.degree_cap, cfg.degree_cap, config::DEFAULT_DEGREE_CAP),
        build_beam: pick(a.build_beam, cfg.build_beam, config::DEFAULT_BUILD_BEAM),
        m: pick(a.m, cfg.m, config::DEFAULT_M),
        passes: pick(a.passes, cfg.passes, config::DEFAULT_PASSES),
        seed: pick(a.seed, cfg.seed, 0),
    };

    let mut fields = vec![
        ("vectors", a.vectors.display().to_string()),
        ("colors", a.colors.display().to_string()),
        ("queries", a.queries.display().to_string()),
        ("gt", a.gt.display().to_string()),
        ("out", a.out.display().to_string()),
        ("l_values", join_list(&l_values)),
    ];
    if let Some(ms) = &a.ablate_m {
        fields.push(("ablate_m", join_list(ms)));
    }
    fields.extend([
        ("alpha", params.alpha.to_string()),
        ("degree_cap", params.degree_cap.to_string()),
        ("build_beam", params.build_beam.to_string()),
        ("m", params.m.to_string()),
        ("passes", params.passes.to_string()),
        ("seed", params.seed.to_string()),
        ("threads", threads.to_string()),
    ]);
    echo("bench", &fields);

    let ds = load_dataset(&a.vectors, &a.colors)?;
    let queries = load_queries(&a.queries, ds.dim())?;
    let truth = load_gt(&a.gt)?;

    let csv = if let Some(ms) = &a.ablate_m {
        let (rows, times) = run_ablation_m(&ds, &queries, &truth, &params, ms, &l_values, threads)?;
        println!("build times:");
        println!("  m  seconds");
        for (m, seconds) in &times {
            println!("  {m}  {seconds:.2}");
        }
        rows_to_csv(&rows)
    } else {
        let t0 = Instant::now();
        let std_params = BuildParams { m: 1, ..params };
        let g_std = build_fast(&ds, &std_params, threads)?;
        let std_seconds = t0.elapsed().as_secs_f64();
        let (g_div, div_seconds) = if params.m == 1 {
            (None, std_seconds)
        } else {
            let t1 = Instant::now();
            let g = build_fast(&ds, &params, threads)?;
            (Some(g), t1.elapsed().as_secs_f64())
        };
        println!(
            "built standard graph (m=1) in {std_seconds:.2}s, \
             diversity-aware graph (m={}) in {div_seconds:.2}s",
            params.m
        );
        let div_ref: &DiverseGraph = g_div.as_ref().unwrap_or(&g_std);
        let configs = [
            SweepConfig {
                label: ConfigLabel::Baseline,
                graph: &g_std,
            },
            SweepConfig {
                label: ConfigLabel::StdBuildDivSearch,
                graph: &g_std,
            },
            SweepConfig {
                label: ConfigLabel::DivBuildDivSearch,
                graph: div_ref,
            },
        ];
        let rows = run_sweep(&ds, &queries, &truth, &configs, &l_values, threads)?;
        rows_to_csv(&rows)
    };
    std::fs::write(&a.out, &csv)?;
    println!(
        "wrote {} ({} data rows)",
        a.out.display(),
        csv.lines().count().saturating_sub(1)
    );
    Ok(())
}
