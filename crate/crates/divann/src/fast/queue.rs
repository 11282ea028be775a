//! Bounded priority queue with a per-color occupancy cap.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    id: u32,
    dist: f64,
    color: u32,
}

impl Entry {
    /// Ordering key: lower distance wins, then lower id — so the entry with
    /// the lexicographically largest key is the worst.
    #[inline]
    fn key(&self) -> (f64, u32) {
        (self.dist, self.id)
    }
}

/// Priority queue holding at most `capacity` entries overall and at most
/// `per_color_cap` entries of any one color, ordered by (distance, id).
///
/// Expansion marks are permanent: once an id has been handed out by
/// [`pop_closest_unexpanded`](DiverseQueue::pop_closest_unexpanded) it is
/// never handed out again, even if the entry is evicted and later
/// re-inserted.
#[derive(Debug, Clone)]
pub struct DiverseQueue {
    capacity: usize,
    per_color_cap: usize,
    entries: Vec<Entry>,
    members: HashSet<u32>,
    color_counts: HashMap<u32, usize>,
    expanded: HashSet<u32>,
    // Every entry before this index is already expanded, so expansion scans
    // can start here instead of at the front.
    scan_from: usize,
}

impl DiverseQueue {
    pub fn new(capacity: usize, per_color_cap: usize) -> Result<Self> {
        if capacity == 0 || per_color_cap == 0 {
            return Err(Error::usage(format!(
                "queue capacity and per-color cap must be at least 1, got {capacity} and {per_color_cap}"
            )));
        }
        Ok(DiverseQueue {
            capacity,
            per_color_cap,
            entries: Vec::with_capacity(capacity + 1),
            members: HashSet::new(),
            color_counts: HashMap::new(),
            expanded: HashSet::new(),
            scan_from: 0,
        })
    }

    /// Offers an entry. Duplicate ids are ignored. The entry is admitted if
    /// its color is below the cap or it beats the worst entry of its color;
    /// admission may push the color over its cap or the queue over capacity,
    /// in which case the worst entry of that color (respectively the worst
    /// entry overall) is evicted. Returns whether `id` is present afterward.
    pub fn insert(&mut self, id: u32, dist: f64, color: u32) -> bool {
        debug_assert!(dist >= 0.0);
        // A full queue cannot end up keeping an absent entry that is strictly
        // worse than its current worst: admission would either evict the
        // newcomer itself (capacity) or fail the per-color comparison against
        // a better incumbent. Rejecting here short-circuits the common case.
        if self.entries.len() >= self.capacity {
            if let Some(last) = self.entries.last() {
                if (dist, id) > last.key() && !self.members.contains(&id) {
                    return false;
                }
            }
        }
        if self.members.contains(&id) {
            return true;
        }
        let count = self.color_counts.get(&color).copied().unwrap_or(0);
        if count >= self.per_color_cap {
            match self.worst_of_color(color) {
                Some(i) if (dist, id) < self.entries[i].key() => {}
                _ => return false,
            }
        }
        let entry = Entry { id, dist, color };
        let pos = self
            .entries
            .partition_point(|e| e.key() < entry.key());
        self.entries.insert(pos, entry);
        if pos < self.scan_from {
            self.scan_from = pos;
        }
        self.members.insert(id);
        *self.color_counts.entry(color).or_insert(0) += 1;
        if self.color_counts[&color] > self.per_color_cap {
            let worst = self.worst_of_color(color).expect("color is over cap");
            self.remove_at(worst);
        }
        if self.entries.len() > self.capacity {
            self.remove_at(self.entries.len() - 1);
        }
        self.members.contains(&id)
    }

    /// Closest entry not yet expanded, marking it expanded. The entry itself
    /// stays in the queue.
    pub fn pop_closest_unexpanded(&mut self) -> Option<(u32, f64)> {
        let offset = self.entries[self.scan_from..]
            .iter()
            .position(|e| !self.expanded.contains(&e.id))?;
        let i = self.scan_from + offset;
        let (id, dist) = (self.entries[i].id, self.entries[i].dist);
        self.expanded.insert(id);
        self.scan_from = i + 1;
        Some((id, dist))
    }

    /// The closest `k` entries (fewer if the queue holds fewer).
    pub fn top_k(&self, k: usize) -> Vec<(u32, f64)> {
        self.entries
            .iter()
            .take(k)
            .map(|e| (e.id, e.dist))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.members.contains(&id)
    }

    /// Checks every structural invariant; for tests and debug audits.
    pub fn check_invariants(&self) -> Result<()> {
        if self.entries.len() > self.capacity {
            return Err(Error::degenerate(format!(
                "queue holds {} entries, capacity {}",
                self.entries.len(),
                self.capacity
            )));
        }
        let mut counts: HashMap<u32, usize> = HashMap::new();
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.id) {
                return Err(Error::degenerate(format!("duplicate id {}", e.id)));
            }
            *counts.entry(e.color).or_insert(0) += 1;
        }
        for (&c, &cnt) in &counts {
            if cnt > self.per_color_cap {
                return Err(Error::degenerate(format!(
                    "color {c} holds {cnt} entries, cap {}",
                    self.per_color_cap
                )));
            }
        }
        if seen != self.members {
            return Err(Error::degenerate("member set out of sync".to_string()));
        }
        if counts != self.color_counts
            && !(counts.is_empty() && self.color_counts.values().all(|&v| v == 0))
        {
            // Evictions may leave zero-count colors in the map; normalize.
            let nonzero: HashMap<u32, usize> = self
                .color_counts
                .iter()
                .filter(|&(_, &v)| v > 0)
                .map(|(&c, &v)| (c, v))
                .collect();
            if nonzero != counts {
                return Err(Error::degenerate("color counts out of sync".to_string()));
            }
        }
        if !self
            .entries
            .windows(2)
            .all(|w| w[0].key() < w[1].key())
        {
            return Err(Error::degenerate("entries out of order".to_string()));
        }
        if self.scan_from > self.entries.len() {
            return Err(Error::degenerate(format!(
                "scan cursor {} past {} entries",
                self.scan_from,
                self.entries.len()
            )));
        }
        if let Some(e) = self.entries[..self.scan_from]
            .iter()
            .find(|e| !self.expanded.contains(&e.id))
        {
            return Err(Error::degenerate(format!(
                "unexpanded entry {} before the scan cursor",
                e.id
            )));
        }
        Ok(())
    }

    fn worst_of_color(&self, color: u32) -> Option<usize> {
        self.entries.iter().rposition(|e| e.color == color)
    }

    fn remove_at(&mut self, i: usize) {
        let e = self.entries.remove(i);
        if i < self.scan_from {
            self.scan_from -= 1;
        }
        self.members.remove(&e.id);
        if let Some(c) = self.color_counts.get_mut(&e.color) {
            *c -= 1;
        }
    }
}
