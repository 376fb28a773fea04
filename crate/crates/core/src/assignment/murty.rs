use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashSet;

use super::{best_assignment, Assignment, CostMatrix, INFINITE};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Subproblem {
    cost: u64,
    permutation: Vec<usize>,
    forced: Vec<(usize, usize)>,
    forbidden: Vec<(usize, usize)>,
}

/// Lazily emits bijections in non-decreasing cost order (ties by
/// lexicographic permutation). The first call yields the best assignment.
///
/// Each queued subproblem is the original matrix restricted by forced and
/// forbidden agent-task pairs; emitting a subproblem's optimum splits the
/// rest of its solution space into disjoint children.
#[derive(Debug, Clone)]
pub struct AssignmentEnumerator {
    matrix: CostMatrix,
    queue: BinaryHeap<Reverse<Subproblem>>,
    emitted: FxHashSet<Vec<usize>>,
}

impl AssignmentEnumerator {
    pub fn new(matrix: CostMatrix) -> Self {
        let mut queue = BinaryHeap::new();
        if let Some(root) = solve(&matrix, Vec::new(), Vec::new()) {
            queue.push(Reverse(root));
        }
        AssignmentEnumerator {
            matrix,
            queue,
            emitted: FxHashSet::default(),
        }
    }

    pub fn matrix(&self) -> &CostMatrix {
        &self.matrix
    }

    pub fn emitted(&self) -> usize {
        self.emitted.len()
    }

    /// Cost of the next assignment without consuming it.
    pub fn peek_cost(&self) -> Option<u64> {
        self.queue.peek().map(|Reverse(s)| s.cost)
    }

    pub fn next_assignment(&mut self) -> Option<Assignment> {
        let Reverse(sub) = self.queue.pop()?;
        let free: Vec<usize> = (0..self.matrix.size())
            .filter(|a| !sub.forced.iter().any(|&(fa, _)| fa == *a))
            .collect();
        let mut forced = sub.forced.clone();
        // The last free agent has a single task left once the others are
        // forced, so its child is always empty.
        for &agent in free.iter().take(free.len().saturating_sub(1)) {
            let task = sub.permutation[agent];
            let mut forbidden = sub.forbidden.clone();
            forbidden.push((agent, task));
            if let Some(child) = solve(&self.matrix, forced.clone(), forbidden) {
                self.queue.push(Reverse(child));
            }
            forced.push((agent, task));
        }
        let fresh = self.emitted.insert(sub.permutation.clone());
        debug_assert!(fresh, "assignment emitted twice");
        Some(Assignment {
            permutation: sub.permutation,
            cost: sub.cost,
        })
    }
}

impl Iterator for AssignmentEnumerator {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        self.next_assignment()
    }
}

fn solve(
    matrix: &CostMatrix,
    forced: Vec<(usize, usize)>,
    forbidden: Vec<(usize, usize)>,
) -> Option<Subproblem> {
    let n = matrix.size();
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|a| (0..n).map(|t| matrix.get(a, t)).collect())
        .collect();
    for &(a, t) in &forbidden {
        rows[a][t] = INFINITE;
    }
    for &(a, t) in &forced {
        for x in 0..n {
            if x != t {
                rows[a][x] = INFINITE;
            }
            if x != a {
                rows[x][t] = INFINITE;
            }
        }
    }
    let best = best_assignment(&CostMatrix::from_rows(&rows)).ok()?;
    Some(Subproblem {
        cost: best.cost,
        permutation: best.permutation,
        forced,
        forbidden,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u64]]) -> CostMatrix {
        CostMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn two_by_two_equal_costs() {
        let mut e = AssignmentEnumerator::new(m(&[&[4, 4], &[4, 4]]));
        assert_eq!(e.next_assignment().unwrap().permutation, vec![0, 1]);
        let second = e.next_assignment().unwrap();
        assert_eq!((second.permutation, second.cost), (vec![1, 0], 8));
        assert!(e.next_assignment().is_none());
    }

    #[test]
    fn two_by_two_diagonal() {
        let mut e = AssignmentEnumerator::new(m(&[&[0, 9], &[9, 0]]));
        assert_eq!(e.next_assignment().unwrap().cost, 0);
        let second = e.next_assignment().unwrap();
        assert_eq!((second.permutation, second.cost), (vec![1, 0], 18));
        assert!(e.next_assignment().is_none());
    }

    #[test]
    fn infinite_bijections_are_skipped() {
        let e = AssignmentEnumerator::new(m(&[&[1, INFINITE], &[2, 3]]));
        let all: Vec<_> = e.map(|a| a.permutation).collect();
        assert_eq!(all, vec![vec![0, 1]]);
    }

    #[test]
    fn three_by_three_emits_all_six() {
        let e = AssignmentEnumerator::new(m(&[&[1, 2, 3], &[2, 4, 6], &[3, 6, 9]]));
        let costs: Vec<u64> = e.map(|a| a.cost).collect();
        assert_eq!(costs.len(), 6);
        assert!(costs.windows(2).all(|w| w[0] <= w[1]));
    }
}
