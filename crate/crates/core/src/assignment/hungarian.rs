use std::collections::VecDeque;

use super::{Assignment, AssignmentError, CostMatrix, INFINITE};

/// Minimum-cost bijection in O(n^3). Among optimal bijections the
/// lexicographically smallest permutation is returned.
pub fn best_assignment(matrix: &CostMatrix) -> Result<Assignment, AssignmentError> {
    let n = matrix.size();
    if n == 0 {
        return Ok(Assignment {
            permutation: Vec::new(),
            cost: 0,
        });
    }
    let (mut perm, row_pot, col_pot) = shortest_augmenting(matrix);
    let cost = matrix.cost_of(&perm);
    if cost >= INFINITE {
        return Err(AssignmentError::Infeasible);
    }
    lexicographic_min(matrix, &mut perm, &row_pot, &col_pot);
    debug_assert_eq!(matrix.cost_of(&perm), cost);
    Ok(Assignment {
        permutation: perm,
        cost,
    })
}

/// Potential-based shortest augmenting path method. Returns the matching
/// (agent -> task) and the optimal dual potentials.
fn shortest_augmenting(matrix: &CostMatrix) -> (Vec<usize>, Vec<i64>, Vec<i64>) {
    let n = matrix.size();
    let cost = |i: usize, j: usize| matrix.get(i - 1, j - 1) as i64;
    // 1-based rows/columns; index 0 is the virtual source column.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[owner[j] - 1] = j - 1;
    }
    (perm, u[1..].to_vec(), v[1..].to_vec())
}

/// Every optimal bijection uses only zero-reduced-cost ("tight") edges.
/// Fix agents in index order, each to the smallest tight task that still
/// admits a perfect tight matching for the remaining agents, found by an
/// alternating-path search from the task the agent releases.
fn lexicographic_min(matrix: &CostMatrix, perm: &mut [usize], u: &[i64], v: &[i64]) {
    let n = perm.len();
    let tight = |i: usize, j: usize| matrix.get(i, j) as i64 - u[i] - v[j] == 0;
    // pred[x] = (agent currently holding x, task it moves to)
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut reach = vec![false; n];
    for i in 0..n {
        let released = perm[i];
        reach.iter_mut().for_each(|r| *r = false);
        pred.iter_mut().for_each(|p| *p = None);
        reach[released] = true;
        let mut queue = VecDeque::from([released]);
        while let Some(y) = queue.pop_front() {
            for a in i + 1..n {
                let x = perm[a];
                if !reach[x] && tight(a, y) {
                    reach[x] = true;
                    pred[x] = Some((a, y));
                    queue.push_back(x);
                }
            }
        }
        let Some(j) = (0..n).find(|&j| reach[j] && tight(i, j)) else {
            continue;
        };
        if j == released {
            continue;
        }
        let mut x = j;
        while x != released {
            let (a, y) = pred[x].expect("reachable task has a predecessor");
            perm[a] = y;
            x = y;
        }
        perm[i] = j;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u64]]) -> CostMatrix {
        CostMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn diagonal_optimum() {
        let a = best_assignment(&m(&[&[0, 9], &[9, 0]])).unwrap();
        assert_eq!((a.permutation, a.cost), (vec![0, 1], 0));
    }

    #[test]
    fn ties_break_lexicographically() {
        let a = best_assignment(&m(&[&[4, 4], &[4, 4]])).unwrap();
        assert_eq!((a.permutation, a.cost), (vec![0, 1], 8));
        let all_equal = m(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        assert_eq!(
            best_assignment(&all_equal).unwrap().permutation,
            vec![0, 1, 2]
        );
        let anti = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(best_assignment(&anti).unwrap().permutation, vec![1, 2, 0]);
    }

    #[test]
    fn infeasible_matrix() {
        let a = best_assignment(&m(&[&[INFINITE, INFINITE], &[0, 0]]));
        assert_eq!(a, Err(AssignmentError::Infeasible));
    }

    #[test]
    fn forced_by_infinities() {
        let a = best_assignment(&m(&[&[INFINITE, 3], &[1, INFINITE]])).unwrap();
        assert_eq!((a.permutation, a.cost), (vec![1, 0], 4));
    }
}
