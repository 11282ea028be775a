//! The practical layer: a bounded priority queue with per-color caps, beam
//! search and edge pruning that are both color-aware, an incremental
//! degree-capped graph builder, and the rerank-style baseline that applies
//! the color cap only after an unconstrained search.

mod build;
mod prune;
mod queue;
mod search;

pub use build::{build_fast, BuildParams};
pub use prune::diverse_prune;
pub use queue::DiverseQueue;
pub use search::{baseline_postprocess_search, diverse_search};
