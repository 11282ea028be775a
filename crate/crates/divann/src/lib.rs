//! Graph-based approximate nearest neighbor search under diversity
//! constraints.
//!
//! A query does not just ask for the k closest points: it asks for the k
//! closest points such that no more than k' of them are mutually too similar
//! under a secondary metric ρ. With a categorical ρ (every point carries a
//! color, ρ is 0 for equal colors and 1 otherwise) this is colorful search —
//! at most k' results per color. With a continuous ρ it is (k', C)-diverse
//! search — no open ρ-ball of radius C holds more than k' results.
//!
//! The crate has three layers:
//!
//! * [`theory`] — quadratic-time index builders with provable approximation
//!   guarantees for the searches that run on them, including a
//!   radius-constrained variant that maximizes the diversity threshold.
//! * [`fast`] — a practical single-pass graph builder and beam search in the
//!   DiskANN family, extended so that both the candidate queue and the edge
//!   pruning rule are diversity-aware.
//! * [`oracle`] — brute-force reference implementations used to measure
//!   recall and to validate everything else.
//!
//! [`io`] holds the on-disk formats (vector files, color files, index
//! snapshots, ground-truth files) and [`sweep`] the benchmark harness that
//! compares build/search configurations on a shared query set.
//!
//! Heavy loops run data-parallel through [rayon](https://docs.rs/rayon) when
//! the default `parallel` feature is enabled; disabling it leaves sequential
//! fallbacks with identical results.

pub mod dataset;
pub mod diversity;
pub mod error;
pub mod fast;
pub mod graph;
pub mod io;
pub mod metric;
pub mod oracle;
pub mod parallel;
pub mod result;
pub mod stats;
pub mod sweep;
pub mod theory;

pub use dataset::VectorDataset;
pub use diversity::{diversity_level, is_diverse, is_diverse_at, is_k_colorful, DiversityConstraint};
pub use error::{Error, Result};
pub use graph::{BuilderKind, DiverseGraph, GraphMeta};
pub use metric::{distance, rho, RhoMode};
pub use result::QueryResult;
pub use stats::{estimate_stats, DatasetStats};
