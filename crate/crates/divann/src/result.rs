//! Query result container shared by every search routine.

/// Hits of one query: ids with distances, ascending by (distance, id).
///
/// `hops` counts iterations for the provable searches and node expansions for
/// the beam searches; `distance_evals` is the hardware-independent cost proxy
/// used by the benchmark harness. `underfull` marks results that could not be
/// filled to the requested k under the diversity constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub hits: Vec<(u32, f64)>,
    pub radius: f64,
    pub hops: usize,
    pub distance_evals: u64,
    pub underfull: bool,
}

impl QueryResult {
    /// Builds a result from unordered hits, sorting by (distance, id) and
    /// deriving the radius from the furthest hit.
    pub fn from_hits(
        mut hits: Vec<(u32, f64)>,
        hops: usize,
        distance_evals: u64,
        underfull: bool,
    ) -> Self {
        hits.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        debug_assert!(hits.windows(2).all(|w| w[0].0 != w[1].0));
        let radius = hits.last().map(|&(_, d)| d).unwrap_or(0.0);
        QueryResult {
            hits,
            radius,
            hops,
            distance_evals,
            underfull,
        }
    }

    pub fn ids(&self) -> Vec<u32> {
        self.hits.iter().map(|&(id, _)| id).collect()
    }

    pub fn len(&self) -> usize {
        self.hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_by_distance_then_id() {
        let r = QueryResult::from_hits(vec![(5, 2.0), (1, 1.0), (3, 1.0)], 4, 10, false);
        assert_eq!(r.ids(), vec![1, 3, 5]);
        assert_eq!(r.radius, 2.0);
        assert_eq!(r.hops, 4);
        assert_eq!(r.distance_evals, 10);
        assert!(!r.underfull);
    }

    #[test]
    fn empty_result_has_zero_radius() {
        let r = QueryResult::from_hits(vec![], 0, 0, true);
        assert!(r.is_empty());
        assert_eq!(r.radius, 0.0);
        assert!(r.underfull);
    }
}
