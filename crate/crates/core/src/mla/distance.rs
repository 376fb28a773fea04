use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::model::{GridMap, Location, Task};

/// Distance value for cells that cannot reach a goal.
pub const UNREACHABLE: u32 = u32::MAX;

/// Backward breadth-first distances to every goal location of a task set,
/// plus per-task suffix sums of the remaining goal-to-goal legs.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    width: usize,
    dists: FxHashMap<usize, Vec<u32>>,
    suffix: Vec<Vec<u32>>,
}

/// One breadth-first sweep per distinct goal location.
pub fn precompute_goal_distances(map: &GridMap, tasks: &[Task]) -> DistanceTable {
    let mut dists = FxHashMap::default();
    for task in tasks {
        for &g in task.goals() {
            let cell = map.cell(g);
            dists.entry(cell).or_insert_with(|| bfs(map, cell));
        }
    }
    let mut table = DistanceTable {
        width: map.width(),
        dists,
        suffix: Vec::with_capacity(tasks.len()),
    };
    table.suffix = tasks.iter().map(|t| table.suffix_sums(map, t)).collect();
    table
}

fn bfs(map: &GridMap, source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; map.num_cells()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let d = dist[u] + 1;
        for v in map.cell_neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = d;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub(crate) fn add(a: u32, b: u32) -> u32 {
    if a == UNREACHABLE || b == UNREACHABLE {
        UNREACHABLE
    } else {
        a + b
    }
}

impl DistanceTable {
    /// Distance between cells; `goal` must be one of the table's goals.
    pub(crate) fn cell_dist(&self, from: usize, goal: usize) -> u32 {
        self.dists[&goal][from]
    }

    pub fn distance(&self, from: Location, goal: Location) -> Option<u32> {
        let g = goal.row as usize * self.width + goal.col as usize;
        let f = from.row as usize * self.width + from.col as usize;
        self.dists
            .get(&g)
            .map(|d| d[f])
            .filter(|&d| d != UNREACHABLE)
    }

    pub fn covers(&self, goal: Location) -> bool {
        self.dists
            .contains_key(&(goal.row as usize * self.width + goal.col as usize))
    }

    /// `suffix[k]` = sum of dist(g[k'], g[k'+1]) for k' = k..K-1 (0-based).
    pub fn suffix(&self, task: usize) -> &[u32] {
        &self.suffix[task]
    }

    pub(crate) fn suffix_sums(&self, map: &GridMap, task: &Task) -> Vec<u32> {
        let goals = task.goals();
        let mut out = vec![0u32; goals.len()];
        for k in (0..goals.len().saturating_sub(1)).rev() {
            let leg = self.cell_dist(map.cell(goals[k]), map.cell(goals[k + 1]));
            out[k] = add(leg, out[k + 1]);
        }
        out
    }

    /// Collision-free distance from `start` through every goal of `task`.
    pub fn task_cost(&self, map: &GridMap, start: Location, task: &Task, task_index: usize) -> u32 {
        let first = map.cell(task.goals()[0]);
        add(
            self.cell_dist(map.cell(start), first),
            self.suffix[task_index][0],
        )
    }
}

/// Cell-indexed view of a task used inside the searches.
#[derive(Debug, Clone)]
pub(crate) struct TaskProfile {
    pub goals: Vec<usize>,
    pub suffix: Vec<u32>,
}

impl TaskProfile {
    pub fn new(map: &GridMap, task: &Task, table: &DistanceTable) -> Self {
        TaskProfile {
            goals: task.goals().iter().map(|&g| map.cell(g)).collect(),
            suffix: table.suffix_sums(map, task),
        }
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn final_goal(&self) -> usize {
        *self.goals.last().expect("non-empty task")
    }

    /// Label (0-based index of the next goal) at t=0.
    pub fn initial_label(&self, start: usize) -> usize {
        usize::from(self.goals[0] == start)
    }

    /// Label after arriving at `cell` with label `label`.
    pub fn advance(&self, label: usize, cell: usize) -> usize {
        if label < self.goals.len() && self.goals[label] == cell {
            label + 1
        } else {
            label
        }
    }

    /// Remaining distance from `cell` through all unvisited goals. Once
    /// every goal is visited this is the distance back to the final goal.
    pub fn h(&self, table: &DistanceTable, cell: usize, label: usize) -> u32 {
        if label >= self.goals.len() {
            table.cell_dist(cell, self.final_goal())
        } else {
            add(table.cell_dist(cell, self.goals[label]), self.suffix[label])
        }
    }
}
