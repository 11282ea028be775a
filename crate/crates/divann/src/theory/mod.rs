//! Quadratic-time index builders and the searches whose approximation and
//! diversity guarantees they carry. Desk-scale by design: the builders scan
//! all pairs, and the searches trade speed for provable output quality.

mod slow_build;
mod slow_search;

pub use slow_build::{
    build_colorful_slow, build_diverse_slow, gonzalez_select, SlowBuildReport, SLOW_BUILD_GUARD,
};
pub use slow_search::{
    default_steps, init_colorful, init_diverse, search_colorful, search_dual, search_primal,
    DualOutcome,
};
