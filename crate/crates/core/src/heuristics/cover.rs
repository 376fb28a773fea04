use std::collections::BTreeMap;

/// Undirected graph over agents with positive integer edge weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConflictGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), usize>,
}

impl ConflictGraph {
    pub fn new(num_vertices: usize) -> Self {
        ConflictGraph {
            n: num_vertices,
            edges: BTreeMap::new(),
        }
    }

    /// Adds edge `{a, b}`; repeated edges keep the larger weight.
    pub fn add_edge(&mut self, a: usize, b: usize, weight: usize) {
        assert!(a != b && a < self.n && b < self.n, "bad edge {a}-{b}");
        let key = (a.min(b), a.max(b));
        let w = self.edges.entry(key).or_insert(weight);
        *w = (*w).max(weight);
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().map(|(&(a, b), &w)| (a, b, w))
    }
}

/// Minimum total value `sum x_v` over non-negative integers with
/// `x_a + x_b >= w_ab` on every edge. Unweighted mode treats every weight
/// as 1, which is the plain minimum vertex cover.
pub fn min_vertex_cover(graph: &ConflictGraph, weighted: bool) -> usize {
    let n = graph.num_vertices();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (a, b, w) in graph.edges() {
        let w = if weighted { w } else { 1 };
        if w == 0 {
            continue;
        }
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let mut seen = vec![false; n];
    let mut total = 0;
    for v in 0..n {
        if seen[v] || adj[v].is_empty() {
            continue;
        }
        let mut comp = vec![v];
        seen[v] = true;
        let mut i = 0;
        while i < comp.len() {
            for &(u, _) in &adj[comp[i]] {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
            i += 1;
        }
        total += Component::new(&comp, &adj).solve();
    }
    total
}

struct Component {
    /// Local adjacency, vertices in branching order.
    adj: Vec<Vec<(usize, usize)>>,
    best: usize,
}

impl Component {
    fn new(verts: &[usize], global: &[Vec<(usize, usize)>]) -> Self {
        let mut order = verts.to_vec();
        order.sort_by_key(|&v| (std::cmp::Reverse(global[v].len()), v));
        let local: BTreeMap<usize, usize> =
            order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj: Vec<Vec<(usize, usize)>> = order
            .iter()
            .map(|&v| global[v].iter().map(|&(u, w)| (local[&u], w)).collect())
            .collect();
        // Taking every vertex at its largest incident weight is feasible.
        let best = adj
            .iter()
            .map(|es| es.iter().map(|&(_, w)| w).max().unwrap_or(0))
            .sum();
        Component { adj, best }
    }

    fn solve(mut self) -> usize {
        let n = self.adj.len();
        self.branch(0, &mut vec![0; n], 0);
        self.best
    }

    /// `lb[v]` is the least value of unassigned `v` implied by the
    /// already-assigned vertices `0..pos`.
    fn branch(&mut self, pos: usize, lb: &mut Vec<usize>, sum: usize) {
        if pos == self.adj.len() {
            self.best = self.best.min(sum);
            return;
        }
        let lo = lb[pos];
        let hi = self.adj[pos]
            .iter()
            .filter(|&&(u, _)| u > pos)
            .map(|&(_, w)| w)
            .max()
            .unwrap_or(0)
            .max(lo);
        for x in (lo..=hi).rev() {
            let saved = lb.clone();
            for &(u, w) in &self.adj[pos] {
                if u > pos {
                    lb[u] = lb[u].max(w.saturating_sub(x));
                }
            }
            if sum + x + self.residual_bound(pos + 1, lb) < self.best {
                self.branch(pos + 1, lb, sum + x);
            }
            *lb = saved;
        }
    }

    /// Admissible bound on the remaining vertices: their implied minima
    /// plus a greedy matching over the still-uncovered edge slack.
    fn residual_bound(&self, from: usize, lb: &[usize]) -> usize {
        let mut bound: usize = lb[from..].iter().sum();
        let mut used = vec![false; self.adj.len()];
        for v in from..self.adj.len() {
            if used[v] {
                continue;
            }
            let pick = self.adj[v]
                .iter()
                .filter(|&&(u, _)| u > v && !used[u])
                .map(|&(u, w)| (w.saturating_sub(lb[v] + lb[u]), u))
                .filter(|&(slack, _)| slack > 0)
                .max();
            if let Some((slack, u)) = pick {
                used[v] = true;
                used[u] = true;
                bound += slack;
            }
        }
        bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(graph: &ConflictGraph, weighted: bool) -> usize {
        let n = graph.num_vertices();
        let w = |x: usize| if weighted { x } else { 1 };
        let cap = graph.edges().map(|(_, _, x)| w(x)).max().unwrap_or(0);
        let mut best = usize::MAX;
        let mut x = vec![0; n];
        loop {
            if graph.edges().all(|(a, b, e)| x[a] + x[b] >= w(e)) {
                best = best.min(x.iter().sum());
            }
            let mut i = 0;
            while i < n && x[i] == cap {
                x[i] = 0;
                i += 1;
            }
            if i == n {
                return best;
            }
            x[i] += 1;
        }
    }

    #[test]
    fn empty_graph() {
        assert_eq!(min_vertex_cover(&ConflictGraph::new(4), false), 0);
    }

    #[test]
    fn triangle() {
        let mut g = ConflictGraph::new(3);
        g.add_edge(0, 1, 1);
        g.add_edge(1, 2, 1);
        g.add_edge(0, 2, 1);
        assert_eq!(brute(&g, false), 2);
        assert_eq!(min_vertex_cover(&g, false), 2);
    }

    #[test]
    fn weighted_path() {
        let mut g = ConflictGraph::new(3);
        g.add_edge(0, 1, 3);
        g.add_edge(1, 2, 5);
        assert_eq!(brute(&g, true), 5);
        assert_eq!(min_vertex_cover(&g, true), 5);
        assert_eq!(min_vertex_cover(&g, false), 1);
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(1..=5);
            let mut g = ConflictGraph::new(n);
            for a in 0..n {
                for b in a + 1..n {
                    if rng.random_bool(0.5) {
                        g.add_edge(a, b, rng.random_range(1..=3));
                    }
                }
            }
            assert_eq!(min_vertex_cover(&g, true), brute(&g, true), "{g:?}");
            assert_eq!(min_vertex_cover(&g, false), brute(&g, false), "{g:?}");
        }
    }
}
