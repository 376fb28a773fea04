use rustc_hash::{FxHashMap, FxHashSet};

use crate::mla::{ConstraintSet, DistanceTable, TaskProfile, UNREACHABLE};
use crate::model::{GridMap, Location, Task};

/// All paths of one agent with a given finish time as a layered graph over
/// `(location, label)` nodes, one layer per timestep `0..=cost`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMdd {
    width: usize,
    cost: usize,
    /// Per level: nodes as (cell, 0-based label), sorted.
    levels: Vec<Vec<(usize, usize)>>,
    /// Per level `t < cost`: (index at t, index at t + 1).
    edges: Vec<Vec<(u32, u32)>>,
    /// Per level: distinct cells, sorted.
    cells: Vec<Vec<usize>>,
}

impl LabeledMdd {
    pub fn cost(&self) -> usize {
        self.cost
    }

    /// True when no path of the requested cost exists.
    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Nodes at level `t` with 1-based labels; beyond the cost the agent is
    /// parked on its final node.
    pub fn nodes_at(&self, t: usize) -> Vec<(Location, usize)> {
        self.level(t)
            .iter()
            .map(|&(c, l)| (self.location(c), l + 1))
            .collect()
    }

    /// Distinct locations occupied at level `t`.
    pub fn locations_at(&self, t: usize) -> Vec<Location> {
        self.cells_at(t).iter().map(|&c| self.location(c)).collect()
    }

    /// Every root-to-sink location sequence.
    pub fn paths(&self) -> Vec<Vec<Location>> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut stack = vec![0u32];
        self.walk(&mut stack, &mut out);
        out
    }

    fn walk(&self, stack: &mut Vec<u32>, out: &mut Vec<Vec<Location>>) {
        let t = stack.len() - 1;
        if t == self.cost {
            out.push(
                stack
                    .iter()
                    .enumerate()
                    .map(|(lvl, &i)| self.location(self.levels[lvl][i as usize].0))
                    .collect(),
            );
            return;
        }
        let here = *stack.last().expect("non-empty");
        for &(_, next) in self.edges[t].iter().filter(|&&(from, _)| from == here) {
            stack.push(next);
            self.walk(stack, out);
            stack.pop();
        }
    }

    pub(crate) fn cell(&self, loc: Location) -> usize {
        loc.row as usize * self.width + loc.col as usize
    }

    fn location(&self, cell: usize) -> Location {
        Location::new((cell / self.width) as u32, (cell % self.width) as u32)
    }

    fn level(&self, t: usize) -> &[(usize, usize)] {
        &self.levels[t.min(self.cost)]
    }

    pub(crate) fn cells_at(&self, t: usize) -> &[usize] {
        &self.cells[t.min(self.cost)]
    }

    /// The single location at level `t`, if the level has only one.
    pub(crate) fn unique_cell_at(&self, t: usize) -> Option<usize> {
        match self.cells_at(t) {
            [c] => Some(*c),
            _ => None,
        }
    }

    fn cell_of(&self, t: usize, idx: u32) -> usize {
        self.level(t)[idx as usize].0
    }

    /// Successor indices of node `idx` at level `t`; a sink loops on itself.
    fn successors(&self, t: usize, idx: u32) -> impl Iterator<Item = u32> + '_ {
        let parked = (t >= self.cost).then_some(idx);
        let edges = if t < self.cost {
            &self.edges[t][..]
        } else {
            &[]
        };
        let lo = edges.partition_point(|&(f, _)| f < idx);
        edges[lo..]
            .iter()
            .take_while(move |&&(f, _)| f == idx)
            .map(|&(_, n)| n)
            .chain(parked)
    }
}

/// Builds the MDD of all paths with finish time exactly `cost` that visit
/// `task` in order from `start` while obeying `constraints`.
pub fn build_mdd(
    map: &GridMap,
    start: Location,
    task: &Task,
    constraints: &ConstraintSet,
    cost: usize,
    table: &DistanceTable,
) -> LabeledMdd {
    let profile = TaskProfile::new(map, task, table);
    build(map, table, map.cell(start), &profile, constraints, cost)
}

pub(crate) fn build(
    map: &GridMap,
    table: &DistanceTable,
    start: usize,
    task: &TaskProfile,
    cons: &ConstraintSet,
    cost: usize,
) -> LabeledMdd {
    let empty = LabeledMdd {
        width: map.width(),
        cost,
        levels: Vec::new(),
        edges: Vec::new(),
        cells: Vec::new(),
    };
    let fits = |cell: usize, label: usize, t: usize| {
        let h = task.h(table, cell, label);
        h != UNREACHABLE && t + h as usize <= cost
    };
    let sink = (task.final_goal(), task.len());
    let label0 = task.initial_label(start);
    if cons.forbids_vertex(start, 0) || !fits(start, label0, 0) {
        return empty;
    }

    let mut levels: Vec<Vec<(usize, usize)>> = vec![vec![(start, label0)]];
    let mut raw_edges: Vec<Vec<(u32, u32)>> = Vec::with_capacity(cost);
    for t in 0..cost {
        let mut index: FxHashMap<(usize, usize), u32> = FxHashMap::default();
        let mut next = Vec::new();
        let mut edges = Vec::new();
        for (i, &(u, label)) in levels[t].iter().enumerate() {
            for v in std::iter::once(u).chain(map.cell_neighbors(u)) {
                if cons.forbids_vertex(v, t + 1) || cons.forbids_edge(u, v, t) {
                    continue;
                }
                if t + 1 == cost && (u, label) == sink {
                    // Already finished one step earlier.
                    continue;
                }
                let l = task.advance(label, v);
                if !fits(v, l, t + 1) || (t + 1 == cost && (v, l) != sink) {
                    continue;
                }
                let j = *index.entry((v, l)).or_insert_with(|| {
                    next.push((v, l));
                    (next.len() - 1) as u32
                });
                edges.push((i as u32, j));
            }
        }
        if next.is_empty() {
            return empty;
        }
        levels.push(next);
        raw_edges.push(edges);
    }
    if levels[cost] != [sink] || !cons.can_park(sink.0, cost) {
        return empty;
    }

    // Backward pass: keep nodes that reach the sink, then renumber.
    let mut alive: Vec<Vec<bool>> = levels.iter().map(|l| vec![false; l.len()]).collect();
    alive[cost][0] = true;
    for t in (0..cost).rev() {
        for &(i, j) in &raw_edges[t] {
            if alive[t + 1][j as usize] {
                alive[t][i as usize] = true;
            }
        }
    }
    let mut remap: Vec<Vec<u32>> = Vec::with_capacity(levels.len());
    let mut kept_levels = Vec::with_capacity(levels.len());
    for (t, level) in levels.iter().enumerate() {
        let mut order: Vec<usize> = (0..level.len()).filter(|&i| alive[t][i]).collect();
        order.sort_unstable_by_key(|&i| level[i]);
        let mut map_t = vec![u32::MAX; level.len()];
        for (new, &old) in order.iter().enumerate() {
            map_t[old] = new as u32;
        }
        kept_levels.push(order.iter().map(|&i| level[i]).collect::<Vec<_>>());
        remap.push(map_t);
    }
    let edges: Vec<Vec<(u32, u32)>> = raw_edges
        .iter()
        .enumerate()
        .map(|(t, es)| {
            let mut kept: Vec<(u32, u32)> = es
                .iter()
                .filter(|&&(i, j)| alive[t][i as usize] && alive[t + 1][j as usize])
                .map(|&(i, j)| (remap[t][i as usize], remap[t + 1][j as usize]))
                .collect();
            kept.sort_unstable();
            kept
        })
        .collect();
    let cells = kept_levels
        .iter()
        .map(|level: &Vec<(usize, usize)>| {
            let mut c: Vec<usize> = level.iter().map(|&(cell, _)| cell).collect();
            c.dedup();
            c
        })
        .collect();
    LabeledMdd {
        width: map.width(),
        cost,
        levels: kept_levels,
        edges,
        cells,
    }
}

/// True when the two agents have no pair of collision-free paths at their
/// MDD costs. The shorter MDD is padded by parking at its sink.
pub fn joint_mdd_empty(a: &LabeledMdd, b: &LabeledMdd) -> bool {
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let depth = a.cost.max(b.cost);
    if a.cell_of(0, 0) == b.cell_of(0, 0) {
        return true;
    }
    let mut frontier: FxHashSet<(u32, u32)> = FxHashSet::default();
    frontier.insert((0, 0));
    for t in 0..depth {
        let mut next = FxHashSet::default();
        for &(i, j) in &frontier {
            let (ai, bj) = (a.cell_of(t, i), b.cell_of(t, j));
            for i2 in a.successors(t, i) {
                let a2 = a.cell_of(t + 1, i2);
                for j2 in b.successors(t, j) {
                    let b2 = b.cell_of(t + 1, j2);
                    let swap = ai != a2 && ai == b2 && a2 == bj;
                    if a2 != b2 && !swap {
                        next.insert((i2, j2));
                    }
                }
            }
        }
        if next.is_empty() {
            return true;
        }
        frontier = next;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mla::{precompute_goal_distances, Constraint};

    fn loc(name: &str) -> Location {
        let b = name.as_bytes();
        Location::new((b[0] - b'A') as u32, (b[1] - b'1') as u32)
    }

    fn fig1() -> (GridMap, Vec<Task>, DistanceTable) {
        let map = GridMap::open(3, 3);
        let tasks = vec![
            Task::new(vec![loc("C2"), loc("A2")]).unwrap(),
            Task::new(vec![loc("B3"), loc("B1")]).unwrap(),
        ];
        let table = precompute_goal_distances(&map, &tasks);
        (map, tasks, table)
    }

    #[test]
    fn unconstrained_level_one_is_b2() {
        let (map, tasks, table) = fig1();
        let mdd = build_mdd(&map, loc("B1"), &tasks[1], &ConstraintSet::new(), 4, &table);
        assert_eq!(mdd.locations_at(1), vec![loc("B2")]);
        assert_eq!(mdd.locations_at(2), vec![loc("B3")]);
        assert_eq!(mdd.locations_at(4), vec![loc("B1")]);
        assert_eq!(mdd.paths().len(), 1);
    }

    /// Every location sequence of `len + 1` steps from `start` that visits
    /// the goals in order and ends parked on the last one exactly at `len`.
    fn enumerate(
        map: &GridMap,
        start: Location,
        goals: &[Location],
        len: usize,
        forbid: &[(Location, usize)],
    ) -> Vec<Vec<Location>> {
        let mut out = Vec::new();
        let mut seq = vec![start];
        fn rec(
            map: &GridMap,
            goals: &[Location],
            len: usize,
            forbid: &[(Location, usize)],
            seq: &mut Vec<Location>,
            out: &mut Vec<Vec<Location>>,
        ) {
            if seq.len() == len + 1 {
                let mut k = 0;
                let mut done_at = None;
                for (t, &l) in seq.iter().enumerate() {
                    if k < goals.len() && l == goals[k] {
                        k += 1;
                    }
                    if k == goals.len() && done_at.is_none() {
                        done_at = Some(t);
                    }
                }
                let last = *seq.last().unwrap();
                let parked_from = (0..=len)
                    .rev()
                    .take_while(|&t| seq[t] == last)
                    .last()
                    .unwrap();
                if k == goals.len()
                    && last == *goals.last().unwrap()
                    && parked_from.max(done_at.unwrap()) == len
                {
                    out.push(seq.clone());
                }
                return;
            }
            let here = *seq.last().unwrap();
            let mut next = vec![here];
            next.extend(map.neighbors(here).unwrap());
            for v in next {
                if forbid.contains(&(v, seq.len())) {
                    continue;
                }
                seq.push(v);
                rec(map, goals, len, forbid, seq, out);
                seq.pop();
            }
        }
        if !forbid.contains(&(start, 0)) {
            rec(map, goals, len, forbid, &mut seq, &mut out);
        }
        out.sort();
        out
    }

    #[test]
    fn constrained_mdd_matches_enumeration() {
        let (map, tasks, table) = fig1();
        let mut cons = ConstraintSet::new();
        cons.add(&map, &Constraint::vertex(0, loc("B2"), 1));
        let mdd = build_mdd(&map, loc("B1"), &tasks[1], &cons, 5, &table);
        let mut got = mdd.paths();
        got.sort();
        let want = enumerate(&map, loc("B1"), tasks[1].goals(), 5, &[(loc("B2"), 1)]);
        assert_eq!(got, want);
        // Leaving B1 at t=1 cannot reach B3 and return by t=5, so a1 waits.
        assert_eq!(mdd.locations_at(1), vec![loc("B1")]);
    }

    #[test]
    fn unconstrained_mdd_matches_enumeration() {
        let (map, tasks, table) = fig1();
        for (start, task, cost) in [("A2", 0, 4), ("A2", 0, 5), ("B1", 1, 6), ("C3", 1, 5)] {
            let mdd = build_mdd(
                &map,
                loc(start),
                &tasks[task],
                &ConstraintSet::new(),
                cost,
                &table,
            );
            let mut got = mdd.paths();
            got.sort();
            assert_eq!(
                got,
                enumerate(&map, loc(start), tasks[task].goals(), cost, &[]),
                "{start} {cost}"
            );
        }
    }

    #[test]
    fn below_optimum_is_empty() {
        let (map, tasks, table) = fig1();
        let mdd = build_mdd(&map, loc("B1"), &tasks[1], &ConstraintSet::new(), 3, &table);
        assert!(mdd.is_empty());
    }

    #[test]
    fn start_on_only_goal_is_single_node() {
        let map = GridMap::open(2, 2);
        let tasks = vec![Task::new(vec![loc("A1")]).unwrap()];
        let table = precompute_goal_distances(&map, &tasks);
        let mdd = build_mdd(&map, loc("A1"), &tasks[0], &ConstraintSet::new(), 0, &table);
        assert_eq!(mdd.nodes_at(0), vec![(loc("A1"), 2)]);
        assert_eq!(mdd.paths(), vec![vec![loc("A1")]]);
    }

    #[test]
    fn fig1_agents_are_dependent() {
        let (map, tasks, table) = fig1();
        let none = ConstraintSet::new();
        let a1 = build_mdd(&map, loc("B1"), &tasks[1], &none, 4, &table);
        let a2 = build_mdd(&map, loc("A2"), &tasks[0], &none, 4, &table);
        assert!(joint_mdd_empty(&a1, &a2));
        // With one extra step for a1 a collision-free pair exists.
        let a1_slow = build_mdd(&map, loc("B1"), &tasks[1], &none, 5, &table);
        assert!(!joint_mdd_empty(&a1_slow, &a2));
    }

    #[test]
    fn padded_sink_blocks_later_passage() {
        // a parks on B2 at t=1; b must cross B2 at t=2 on its only route.
        let map = GridMap::from_rows(&["@.@", "...", "@.@"]).unwrap();
        let tasks = vec![
            Task::new(vec![loc("B2")]).unwrap(),
            Task::new(vec![loc("C2")]).unwrap(),
        ];
        let table = precompute_goal_distances(&map, &tasks);
        let none = ConstraintSet::new();
        let a = build_mdd(&map, loc("B1"), &tasks[0], &none, 1, &table);
        let b = build_mdd(&map, loc("A2"), &tasks[1], &none, 2, &table);
        assert!(joint_mdd_empty(&a, &b));
    }
}
