//! Feasibility predicates for result sets: colorfulness and (k', C)-diversity.

use crate::dataset::VectorDataset;
use crate::error::{Error, Result};
use crate::metric::{rho_unchecked, RhoMode};

/// True when no color occurs more than `k_prime` times in the multiset.
pub fn is_k_colorful(colors: &[u32], k_prime: usize) -> bool {
    debug_assert!(k_prime >= 1);
    let mut counts = std::collections::HashMap::with_capacity(colors.len());
    for &c in colors {
        let cnt = counts.entry(c).or_insert(0usize);
        *cnt += 1;
        if *cnt > k_prime {
            return false;
        }
    }
    true
}

/// A (k', C)-diversity requirement under a choice of ρ: a set of k results
/// where every ρ-ball of radius `c` around a member holds at most `k_prime`
/// members (open ball, counting the member itself).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityConstraint {
    pub k: usize,
    pub k_prime: usize,
    pub c: f64,
    pub rho_mode: RhoMode,
}

impl DiversityConstraint {
    pub fn new(k: usize, k_prime: usize, c: f64, rho_mode: RhoMode) -> Result<Self> {
        if k == 0 {
            return Err(Error::usage("k must be at least 1"));
        }
        if k_prime == 0 || k_prime > k {
            return Err(Error::usage(format!(
                "k' must satisfy 1 <= k' <= k, got k' = {k_prime}, k = {k}"
            )));
        }
        if !c.is_finite() || c < 0.0 {
            return Err(Error::usage(format!(
                "diversity threshold C must be finite and >= 0, got {c}"
            )));
        }
        Ok(DiversityConstraint {
            k,
            k_prime,
            c,
            rho_mode,
        })
    }
}

/// Whether `ids` satisfies the (k', C)-diversity predicate of `constraint`.
/// Set size is not checked here; callers decide whether |ids| = k matters.
pub fn is_diverse(ds: &VectorDataset, ids: &[u32], constraint: &DiversityConstraint) -> bool {
    is_diverse_at(
        ds,
        ids,
        constraint.k_prime,
        constraint.c,
        constraint.rho_mode,
    )
}

/// (k', C)-diversity at an explicit threshold.
pub fn is_diverse_at(
    ds: &VectorDataset,
    ids: &[u32],
    k_prime: usize,
    c: f64,
    mode: RhoMode,
) -> bool {
    debug_assert!(no_duplicates(ids));
    if c <= 0.0 || ids.len() <= k_prime {
        return true;
    }
    if mode == RhoMode::BinaryColor {
        // ρ values are 0 or 1: C in (0, 1] counts only same-color members,
        // C > 1 counts everything.
        return if c <= 1.0 {
            is_k_colorful(&ds.colors_of(ids), k_prime)
        } else {
            ids.len() <= k_prime
        };
    }
    for &p in ids {
        let mut in_ball = 0usize;
        for &s in ids {
            if rho_unchecked(ds, p, s, mode) < c {
                in_ball += 1;
                if in_ball > k_prime {
                    return false;
                }
            }
        }
    }
    true
}

/// The largest C at which `ids` is (k', C)-diverse: the minimum over members
/// of the (k'+1)-th smallest in-set ρ value. Infinite when |ids| <= k'.
pub fn diversity_level(ds: &VectorDataset, ids: &[u32], k_prime: usize, mode: RhoMode) -> f64 {
    debug_assert!(no_duplicates(ids));
    if ids.len() <= k_prime {
        return f64::INFINITY;
    }
    let mut level = f64::INFINITY;
    let mut vals = Vec::with_capacity(ids.len());
    for &p in ids {
        vals.clear();
        vals.extend(ids.iter().map(|&s| rho_unchecked(ds, p, s, mode)));
        vals.sort_by(f64::total_cmp);
        level = level.min(vals[k_prime]);
    }
    level
}

fn no_duplicates(ids: &[u32]) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(ids.len());
    ids.iter().all(|id| seen.insert(*id))
}
