//! The directed out-neighbor graph produced by every index builder.

use crate::error::{Error, Result};
use crate::metric::RhoMode;

/// Which algorithm produced a graph. Searches validate this before running:
/// the provable searches only operate on graphs with their guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuilderKind {
    /// Quadratic-time builder whose edges carry the colorful search guarantee.
    SlowColorful,
    /// Quadratic-time builder with representative selection under ρ.
    SlowDiverse,
    /// Incremental degree-capped builder with color-aware pruning.
    Fast,
}

impl BuilderKind {
    pub fn name(&self) -> &'static str {
        match self {
            BuilderKind::SlowColorful => "slow-colorful",
            BuilderKind::SlowDiverse => "slow-diverse",
            BuilderKind::Fast => "fast",
        }
    }
}

/// Build parameters a graph carries with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphMeta {
    pub builder: BuilderKind,
    pub alpha: f64,
    /// Result-set size the slow builders were parameterized with (0 for fast).
    pub k: usize,
    /// Per-color/ρ multiplicity bound baked into a slow-diverse build
    /// (1 for slow-colorful, 0 for fast).
    pub k_prime: usize,
    /// ρ used by a slow-diverse build.
    pub rho_mode: Option<RhoMode>,
    /// Out-degree cap R of the fast builder.
    pub degree_cap: Option<usize>,
    /// Beam width L the fast builder searched with.
    pub build_beam: Option<usize>,
    /// Distinct blocker colors needed to drop an edge in the fast builder.
    pub m: Option<usize>,
    /// Entry point for beam searches.
    pub start_node: Option<u32>,
}

/// Out-adjacency lists plus the metadata needed to validate searches
/// against the build that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct DiverseGraph {
    adj: Vec<Vec<u32>>,
    meta: GraphMeta,
}

impl DiverseGraph {
    /// Wraps adjacency lists, rejecting out-of-range or duplicate neighbors
    /// and self-loops.
    pub fn new(adj: Vec<Vec<u32>>, meta: GraphMeta) -> Result<Self> {
        let n = adj.len() as u32;
        for (p, nbrs) in adj.iter().enumerate() {
            let mut seen = std::collections::HashSet::with_capacity(nbrs.len());
            for &v in nbrs {
                if v >= n {
                    return Err(Error::usage(format!(
                        "node {p} has out-of-range neighbor {v} (n = {n})"
                    )));
                }
                if v as usize == p {
                    return Err(Error::usage(format!("node {p} has a self-loop")));
                }
                if !seen.insert(v) {
                    return Err(Error::usage(format!(
                        "node {p} lists neighbor {v} more than once"
                    )));
                }
            }
        }
        if let Some(s) = meta.start_node {
            if s >= n {
                return Err(Error::usage(format!("start node {s} out of range")));
            }
        }
        Ok(DiverseGraph { adj, meta })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn out(&self, id: u32) -> &[u32] {
        &self.adj[id as usize]
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn max_out_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> GraphMeta {
        GraphMeta {
            builder: BuilderKind::Fast,
            alpha: 1.2,
            k: 0,
            k_prime: 0,
            rho_mode: None,
            degree_cap: Some(4),
            build_beam: Some(8),
            m: Some(1),
            start_node: Some(0),
        }
    }

    #[test]
    fn accepts_valid_adjacency() {
        let g = DiverseGraph::new(vec![vec![1], vec![0, 2], vec![]], meta()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.out(1), &[0, 2]);
        assert_eq!(g.max_out_degree(), 2);
        assert_eq!(g.total_edges(), 3);
    }

    #[test]
    fn rejects_out_of_range_neighbor() {
        assert!(DiverseGraph::new(vec![vec![5], vec![]], meta()).is_err());
    }

    #[test]
    fn rejects_duplicate_neighbor() {
        assert!(DiverseGraph::new(vec![vec![1, 1], vec![]], meta()).is_err());
    }

    #[test]
    fn rejects_self_loop() {
        assert!(DiverseGraph::new(vec![vec![0], vec![]], meta()).is_err());
    }

    #[test]
    fn rejects_bad_start_node() {
        let mut m = meta();
        m.start_node = Some(9);
        assert!(DiverseGraph::new(vec![vec![], vec![]], m).is_err());
    }
}
