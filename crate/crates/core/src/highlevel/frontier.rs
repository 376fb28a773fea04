use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rustc_hash::FxHashMap;

use crate::mla::focal_bound;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Popped {
    Node(usize),
    /// Heuristic mode: the assignment-cost bound of a pending root was
    /// reached before the root itself; the next root must be created now.
    SpawnMarker(usize),
}

/// Best-first OPEN keyed by (key, #collisions, id).
#[derive(Default)]
pub(crate) struct BestFirst {
    heap: BinaryHeap<Reverse<(usize, usize, usize, bool)>>,
}

impl BestFirst {
    pub fn push(&mut self, key: usize, collisions: usize, id: usize) {
        self.heap.push(Reverse((key, collisions, id, false)));
    }

    /// Markers sort after every node with the same key.
    pub fn push_marker(&mut self, key: usize, id: usize) {
        self.heap.push(Reverse((key, usize::MAX, id, true)));
    }

    pub fn pop(&mut self) -> Option<Popped> {
        self.heap.pop().map(|Reverse((_, _, id, marker))| {
            if marker {
                Popped::SpawnMarker(id)
            } else {
                Popped::Node(id)
            }
        })
    }
}

/// Two-list focal frontier. OPEN is ordered by LB; FOCAL holds every node
/// whose cost is within `omega * LB(best)`, ordered by
/// (#collisions, cost, id).
pub(crate) struct FocalLists {
    omega: f64,
    open: BTreeSet<(usize, usize)>,
    focal: BTreeSet<(usize, usize, usize)>,
    outside: BTreeSet<(usize, usize)>,
    info: FxHashMap<usize, (usize, usize, usize)>,
    bound: usize,
}

impl FocalLists {
    pub fn new(omega: f64) -> Self {
        FocalLists {
            omega,
            open: BTreeSet::new(),
            focal: BTreeSet::new(),
            outside: BTreeSet::new(),
            info: FxHashMap::default(),
            bound: 0,
        }
    }

    pub fn push(&mut self, lb: usize, cost: usize, collisions: usize, id: usize) {
        self.open.insert((lb, id));
        self.info.insert(id, (lb, cost, collisions));
        if cost <= self.bound {
            self.focal.insert((collisions, cost, id));
        } else {
            self.outside.insert((cost, id));
        }
        self.refresh();
    }

    pub fn best_lb(&self) -> Option<usize> {
        self.open.first().map(|&(lb, _)| lb)
    }

    #[cfg(test)]
    pub fn bound(&self) -> usize {
        self.bound
    }

    fn refresh(&mut self) {
        let Some(best) = self.best_lb() else {
            return;
        };
        let bound = focal_bound(self.omega, best as u64) as usize;
        if bound > self.bound {
            let entering: Vec<(usize, usize)> =
                self.outside.range(..(bound + 1, 0)).copied().collect();
            for (cost, id) in entering {
                self.outside.remove(&(cost, id));
                self.focal.insert((self.info[&id].2, cost, id));
            }
        } else if bound < self.bound {
            let leaving: Vec<(usize, usize, usize)> = self
                .focal
                .iter()
                .filter(|&&(_, cost, _)| cost > bound)
                .copied()
                .collect();
            for e in leaving {
                self.focal.remove(&e);
                self.outside.insert((e.1, e.2));
            }
        }
        self.bound = bound;
    }

    /// Pops the FOCAL head and reports LB(best) at the time of the pop.
    pub fn pop(&mut self) -> Option<(usize, usize)> {
        self.refresh();
        let best = self.best_lb()?;
        let id = match self.focal.first() {
            Some(&(_, _, id)) => id,
            None => self.open.first().expect("non-empty").1,
        };
        let (lb, cost, collisions) = self.info.remove(&id).expect("known node");
        self.open.remove(&(lb, id));
        if !self.focal.remove(&(collisions, cost, id)) {
            self.outside.remove(&(cost, id));
        }
        self.refresh();
        Some((id, best))
    }
}
