//! Brute-force reference solver for tiny instances: a best-first search
//! over joint states of all agents, once per bijection of agents to tasks.
//!
//! A joint state holds each agent's location, next-goal label and whether
//! it has stopped for good. A step charges one unit per agent that has not
//! stopped, so the cost of a goal state is the flowtime. Stopped agents
//! stay on their final goal as obstacles. With a horizon the state also
//! carries the timestep and every agent must stop by the horizon. The
//! search shares no code with the solvers it is used to check.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::model::{GridMap, Instance, Location, Path, Plan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_agents: usize,
    pub max_cells: usize,
    /// Latest admissible finish time; `None` searches without a bound.
    pub horizon: Option<usize>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_agents: 3,
            max_cells: 25,
            horizon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle limited to {limit} agents, instance has {actual}")]
    TooManyAgents { limit: usize, actual: usize },
    #[error("oracle limited to {limit} cells, map has {actual}")]
    TooManyCells { limit: usize, actual: usize },
    #[error("oracle supports at most 15 goals per task")]
    TaskTooLong,
}

/// Minimum-flowtime plan of `instance`, or `None` when no bijection admits
/// collision-free paths (finishing by the horizon, if one is set). Equal
/// optima resolve to the lexicographically smallest assignment.
pub fn oracle_solve(
    instance: &Instance,
    limits: OracleLimits,
) -> Result<Option<Plan>, OracleError> {
    let m = instance.num_agents();
    let map = instance.map();
    if m > limits.max_agents || m > 4 {
        return Err(OracleError::TooManyAgents {
            limit: limits.max_agents.min(4),
            actual: m,
        });
    }
    if map.num_cells() > limits.max_cells || map.num_cells() > 256 {
        return Err(OracleError::TooManyCells {
            limit: limits.max_cells.min(256),
            actual: map.num_cells(),
        });
    }
    if instance.tasks().iter().any(|t| t.len() > 15) {
        return Err(OracleError::TaskTooLong);
    }

    let grid = Grid::new(map);
    let starts: Vec<usize> = instance.starts().iter().map(|&s| grid.index(s)).collect();
    let tasks: Vec<Vec<usize>> = instance
        .tasks()
        .iter()
        .map(|t| t.goals().iter().map(|&g| grid.index(g)).collect())
        .collect();
    let dist: FxHashMap<usize, Vec<u32>> =
        tasks.iter().flatten().map(|&g| (g, grid.bfs(g))).collect();

    let mut best: Option<Plan> = None;
    for perm in permutations(m) {
        let agents: Vec<Agent> = perm
            .iter()
            .enumerate()
            .map(|(a, &t)| Agent::new(starts[a], &tasks[t], &dist))
            .collect();
        if agents
            .iter()
            .any(|a| a.h(a.start, a.first_label()) == u32::MAX)
        {
            continue;
        }
        let bound = best.as_ref().map(|p| p.flowtime);
        if let Some(cells) = search(&grid, &agents, bound, limits.horizon) {
            let paths: Vec<Path> = cells
                .iter()
                .map(|seq| Path::new(seq.iter().map(|&c| grid.location(c)).collect()))
                .collect();
            let plan = Plan::new(perm.clone(), paths);
            if best.as_ref().is_none_or(|b| plan.flowtime < b.flowtime) {
                best = Some(plan);
            }
        }
    }
    Ok(best)
}

struct Grid {
    width: usize,
    free: Vec<bool>,
}

impl Grid {
    fn new(map: &GridMap) -> Self {
        let free = (0..map.num_cells())
            .map(|c| {
                let loc = Location::new((c / map.width()) as u32, (c % map.width()) as u32);
                map.is_free(loc)
            })
            .collect();
        Grid {
            width: map.width(),
            free,
        }
    }

    fn index(&self, l: Location) -> usize {
        l.row as usize * self.width + l.col as usize
    }

    fn location(&self, c: usize) -> Location {
        Location::new((c / self.width) as u32, (c % self.width) as u32)
    }

    /// Wait plus the free 4-neighbours of `c`.
    fn moves(&self, c: usize) -> Vec<usize> {
        let (r, col) = (c / self.width, c % self.width);
        let height = self.free.len() / self.width;
        let mut out = vec![c];
        if r > 0 {
            out.push(c - self.width);
        }
        if r + 1 < height {
            out.push(c + self.width);
        }
        if col > 0 {
            out.push(c - 1);
        }
        if col + 1 < self.width {
            out.push(c + 1);
        }
        out.retain(|&n| self.free[n]);
        out
    }

    fn bfs(&self, from: usize) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.free.len()];
        d[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            for n in self.moves(c) {
                if d[n] == u32::MAX {
                    d[n] = d[c] + 1;
                    queue.push_back(n);
                }
            }
        }
        d
    }
}

struct Agent<'a> {
    start: usize,
    goals: &'a [usize],
    dist: &'a FxHashMap<usize, Vec<u32>>,
}

impl<'a> Agent<'a> {
    fn new(start: usize, goals: &'a [usize], dist: &'a FxHashMap<usize, Vec<u32>>) -> Self {
        Agent { start, goals, dist }
    }

    /// Number of goals visited after standing on `cell` with `visited`
    /// goals done before.
    fn visit(&self, visited: usize, cell: usize) -> usize {
        if visited < self.goals.len() && self.goals[visited] == cell {
            visited + 1
        } else {
            visited
        }
    }

    fn first_label(&self) -> usize {
        self.visit(0, self.start)
    }

    fn last(&self) -> usize {
        self.goals[self.goals.len() - 1]
    }

    fn complete(&self, cell: usize, visited: usize) -> bool {
        visited == self.goals.len() && cell == self.last()
    }

    /// Lower bound on the remaining charged steps.
    fn h(&self, cell: usize, visited: usize) -> u32 {
        let mut total = 0u32;
        let mut at = cell;
        for &g in &self.goals[visited.min(self.goals.len())..] {
            let d = self.dist[&g][at];
            if d == u32::MAX {
                return u32::MAX;
            }
            total += d;
            at = g;
        }
        if visited >= self.goals.len() {
            let d = self.dist[&self.last()][cell];
            if d == u32::MAX {
                return u32::MAX;
            }
            total += d;
        }
        total
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Slot {
    cell: u8,
    visited: u8,
    stopped: bool,
}

type Joint = Vec<Slot>;

/// Joint slots plus the timestep, which stays 0 without a horizon.
type Key = (Joint, u32);

fn heuristic(agents: &[Agent], s: &Joint) -> u32 {
    agents
        .iter()
        .zip(s)
        .filter(|(_, slot)| !slot.stopped)
        .map(|(a, slot)| a.h(slot.cell as usize, slot.visited as usize))
        .try_fold(0u32, |acc, h| (h != u32::MAX).then(|| acc + h))
        .unwrap_or(u32::MAX)
}

/// Whether every running agent can still stop by the horizon.
fn in_time(agents: &[Agent], s: &Joint, t: u32, horizon: Option<usize>) -> bool {
    let Some(h) = horizon else { return true };
    agents.iter().zip(s).all(|(a, slot)| {
        slot.stopped || t as usize + a.h(slot.cell as usize, slot.visited as usize) as usize <= h
    })
}

/// Best-first search over joint states; returns each agent's cell sequence
/// up to its stop time. `bound` prunes anything not strictly better.
fn search(
    grid: &Grid,
    agents: &[Agent],
    bound: Option<usize>,
    horizon: Option<usize>,
) -> Option<Vec<Vec<usize>>> {
    let start: Joint = agents
        .iter()
        .map(|a| Slot {
            cell: a.start as u8,
            visited: a.first_label() as u8,
            stopped: false,
        })
        .collect();
    let limit = bound.map_or(u32::MAX, |b| b as u32);
    if !in_time(agents, &start, 0, horizon) {
        return None;
    }
    let tick = u32::from(horizon.is_some());
    let mut states: Vec<(Key, usize)> = vec![((start.clone(), 0), usize::MAX)];
    let mut best_g: FxHashMap<Key, u32> = FxHashMap::default();
    best_g.insert((start.clone(), 0), 0);
    let mut open = BinaryHeap::new();
    open.push(Reverse((heuristic(agents, &start), 0u32, 0usize)));

    while let Some(Reverse((f, g, id))) = open.pop() {
        if f >= limit {
            return None;
        }
        let (key, _) = states[id].clone();
        if best_g.get(&key).is_some_and(|&b| b < g) {
            continue;
        }
        let (state, t) = key;
        if state.iter().all(|s| s.stopped) {
            return Some(extract(&states, id));
        }
        for (next, cost) in successors(grid, agents, &state) {
            let ng = g + cost;
            if !in_time(agents, &next, t + 1, horizon) {
                continue;
            }
            let next_key = (next, t + tick);
            if best_g.get(&next_key).is_some_and(|&b| b <= ng) {
                continue;
            }
            let h = heuristic(agents, &next_key.0);
            if h == u32::MAX {
                continue;
            }
            best_g.insert(next_key.clone(), ng);
            states.push((next_key, id));
            open.push(Reverse((ng + h, ng, states.len() - 1)));
        }
    }
    None
}

/// Joint successors with their step cost. An agent standing on its final
/// goal with every goal visited may stop, which costs nothing from then on.
fn successors(grid: &Grid, agents: &[Agent], s: &Joint) -> Vec<(Joint, u32)> {
    let options: Vec<Vec<Slot>> = agents
        .iter()
        .zip(s)
        .map(|(a, &slot)| {
            if slot.stopped {
                return vec![slot];
            }
            let cell = slot.cell as usize;
            let mut opts: Vec<Slot> = grid
                .moves(cell)
                .into_iter()
                .map(|n| Slot {
                    cell: n as u8,
                    visited: a.visit(slot.visited as usize, n) as u8,
                    stopped: false,
                })
                .collect();
            if a.complete(cell, slot.visited as usize) {
                opts.push(Slot {
                    stopped: true,
                    ..slot
                });
            }
            opts
        })
        .collect();

    let mut out = Vec::new();
    let mut pick = vec![0usize; agents.len()];
    loop {
        let next: Joint = pick.iter().zip(&options).map(|(&i, o)| o[i]).collect();
        if legal(s, &next) {
            let cost = s
                .iter()
                .zip(&next)
                .filter(|(a, b)| !a.stopped && !b.stopped)
                .count() as u32;
            out.push((next, cost));
        }
        let mut k = 0;
        while k < pick.len() && pick[k] + 1 == options[k].len() {
            pick[k] = 0;
            k += 1;
        }
        if k == pick.len() {
            return out;
        }
        pick[k] += 1;
    }
}

fn legal(from: &Joint, to: &Joint) -> bool {
    for i in 0..to.len() {
        for j in i + 1..to.len() {
            if to[i].cell == to[j].cell {
                return false;
            }
            if from[i].cell != to[i].cell
                && from[i].cell == to[j].cell
                && to[i].cell == from[j].cell
            {
                return false;
            }
        }
    }
    true
}

/// Per-agent cell sequences; each ends at the agent's stop time.
fn extract(states: &[(Key, usize)], mut id: usize) -> Vec<Vec<usize>> {
    let mut trail = Vec::new();
    while id != usize::MAX {
        trail.push(&states[id].0 .0);
        id = states[id].1;
    }
    trail.reverse();
    let m = trail[0].len();
    (0..m)
        .map(|a| {
            let stop = trail
                .iter()
                .position(|s| s[a].stopped)
                .expect("goal state has every agent stopped");
            // The stop transition keeps the cell, so the stop time is the
            // index of the last state before it.
            trail[..stop].iter().map(|s| s[a].cell as usize).collect()
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_solution, Task};

    fn loc(name: &str) -> Location {
        let b = name.as_bytes();
        Location::new((b[0] - b'A') as u32, (b[1] - b'1') as u32)
    }

    #[test]
    fn fig1_flowtime_nine() {
        let inst = Instance::new(
            GridMap::open(3, 3),
            vec![loc("B1"), loc("A2")],
            vec![
                Task::new(vec![loc("C2"), loc("A2")]).unwrap(),
                Task::new(vec![loc("B3"), loc("B1")]).unwrap(),
            ],
        )
        .unwrap();
        let plan = oracle_solve(&inst, OracleLimits::default())
            .unwrap()
            .unwrap();
        assert_eq!(plan.flowtime, 9);
        let report = validate_solution(&inst, &plan);
        assert!(report.is_valid(), "{report}");
        assert_eq!(report.recomputed_flowtime, Some(9));
    }

    #[test]
    fn single_agent_round_trip() {
        let inst = Instance::new(
            GridMap::open(3, 3),
            vec![loc("B1")],
            vec![Task::new(vec![loc("B3"), loc("B1")]).unwrap()],
        )
        .unwrap();
        let plan = oracle_solve(&inst, OracleLimits::default())
            .unwrap()
            .unwrap();
        assert_eq!(plan.flowtime, 4);
    }

    #[test]
    fn corridor_swap_is_infeasible() {
        let inst = Instance::new(
            GridMap::open(1, 2),
            vec![loc("A1"), loc("A2")],
            vec![
                Task::new(vec![loc("A2")]).unwrap(),
                Task::new(vec![loc("A1")]).unwrap(),
            ],
        )
        .unwrap();
        // Both bijections need the agents to pass each other or share a cell.
        let inst2 = Instance::new(
            GridMap::open(1, 2),
            vec![loc("A1"), loc("A2")],
            vec![
                Task::new(vec![loc("A2"), loc("A1")]).unwrap(),
                Task::new(vec![loc("A1"), loc("A2")]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(
            oracle_solve(&inst, OracleLimits::default())
                .unwrap()
                .unwrap()
                .flowtime,
            0
        );
        assert!(oracle_solve(&inst2, OracleLimits::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn horizon_bounds_finish_times() {
        let inst = Instance::new(
            GridMap::open(3, 3),
            vec![loc("B1")],
            vec![Task::new(vec![loc("B3"), loc("B1")]).unwrap()],
        )
        .unwrap();
        let with = |h| OracleLimits {
            horizon: Some(h),
            ..OracleLimits::default()
        };
        assert_eq!(oracle_solve(&inst, with(4)).unwrap().unwrap().flowtime, 4);
        assert!(oracle_solve(&inst, with(3)).unwrap().is_none());
    }

    #[test]
    fn refuses_large_instances() {
        let inst = Instance::new(
            GridMap::open(6, 6),
            vec![loc("A1")],
            vec![Task::new(vec![loc("A2")]).unwrap()],
        )
        .unwrap();
        assert_eq!(
            oracle_solve(&inst, OracleLimits::default()),
            Err(OracleError::TooManyCells {
                limit: 25,
                actual: 36
            })
        );
    }
}
