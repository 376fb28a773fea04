//! Labeled MDDs, collision classification and the admissible high-level
//! heuristics CG, DG and WDG.
//!
//! An MDD holds every cost-optimal path of one agent as `(location, label)`
//! nodes per timestep. A collision is cardinal for an agent when its MDD has
//! a single location at the collision time (a single edge for edge
//! collisions), so any constraint there raises the agent's cost.

mod cover;
mod mdd;

use std::collections::BTreeSet;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::assignment::Assignment;
use crate::budget::Deadline;
use crate::highlevel::{CtNode, ForestSearch, HeuristicKind, Problem};
use crate::mla::Constraint;
use crate::model::{Collision, CollisionKind};

pub use cover::{min_vertex_cover, ConflictGraph};
pub use mdd::{build_mdd, joint_mdd_empty, LabeledMdd};

/// CT expansions allowed to one pairwise WDG sub-solve.
const SUBSOLVE_NODE_LIMIT: u64 = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CollisionClass {
    Cardinal,
    SemiCardinal,
    NonCardinal,
}

/// Classifies `collision` from the MDDs of its first and second agent.
pub fn classify_collision(
    collision: &Collision,
    first: &LabeledMdd,
    second: &LabeledMdd,
) -> CollisionClass {
    let t = collision.time;
    let (for_first, for_second) = match collision.kind {
        CollisionKind::Vertex { at } => (
            first.unique_cell_at(t) == Some(first.cell(at)),
            second.unique_cell_at(t) == Some(second.cell(at)),
        ),
        CollisionKind::Edge { from, to } => {
            let only = |m: &LabeledMdd, u, v| {
                m.unique_cell_at(t) == Some(m.cell(u)) && m.unique_cell_at(t + 1) == Some(m.cell(v))
            };
            (only(first, from, to), only(second, to, from))
        }
    };
    match (for_first, for_second) {
        (true, true) => CollisionClass::Cardinal,
        (false, false) => CollisionClass::NonCardinal,
        _ => CollisionClass::SemiCardinal,
    }
}

type MddKey = (usize, usize, Vec<Constraint>, usize);
/// Agents, tasks, their constraints renumbered to 0/1, and their costs.
type PairKey = (usize, usize, usize, usize, Vec<Constraint>, usize, usize);

/// Per-run caches of MDDs and WDG edge weights.
#[derive(Default)]
pub(crate) struct HeuristicEngine {
    mdds: FxHashMap<MddKey, Arc<LabeledMdd>>,
    weights: FxHashMap<PairKey, usize>,
    pub mdds_built: u64,
    pub wdg_subsolves: u64,
    pub ll_expanded: u64,
}

impl HeuristicEngine {
    pub fn mdd(&mut self, problem: &Problem, node: &CtNode, agent: usize) -> Arc<LabeledMdd> {
        let mut own: Vec<Constraint> = node.constraints_of(agent).copied().collect();
        own.sort_unstable();
        let task = node.task_of(agent);
        let cost = node.paths[agent].finish_time;
        let key = (agent, task, own, cost);
        if let Some(m) = self.mdds.get(&key) {
            return Arc::clone(m);
        }
        let cons = problem.constraint_set(agent, &key.2);
        let mdd = mdd::build(
            problem.map,
            &problem.table,
            problem.starts[agent],
            &problem.tasks[task],
            &cons,
            cost,
        );
        debug_assert!(
            !mdd.is_empty(),
            "MDD of agent {agent} at its own cost is empty"
        );
        self.mdds_built += 1;
        let mdd = Arc::new(mdd);
        self.mdds.insert(key, Arc::clone(&mdd));
        mdd
    }

    /// Class of every collision of `node`, in the node's order.
    pub fn classify_all(&mut self, problem: &Problem, node: &CtNode) -> Vec<CollisionClass> {
        node.collisions
            .iter()
            .map(|c| {
                let a = self.mdd(problem, node, c.first);
                let b = self.mdd(problem, node, c.second);
                classify_collision(c, &a, &b)
            })
            .collect()
    }

    pub fn evaluate(
        &mut self,
        problem: &Problem,
        node: &CtNode,
        kind: HeuristicKind,
        deadline: Deadline,
        fraction: f64,
    ) -> usize {
        if kind == HeuristicKind::None || node.collisions.is_empty() {
            return 0;
        }
        let m = problem.num_agents();
        let classes = self.classify_all(problem, node);
        let cardinal: BTreeSet<(usize, usize)> = node
            .collisions
            .iter()
            .zip(&classes)
            .filter(|(_, &k)| k == CollisionClass::Cardinal)
            .map(|(c, _)| (c.first, c.second))
            .collect();
        if kind == HeuristicKind::Cg {
            let mut g = ConflictGraph::new(m);
            for &(a, b) in &cardinal {
                g.add_edge(a, b, 1);
            }
            return min_vertex_cover(&g, false);
        }

        let pairs: BTreeSet<(usize, usize)> = node
            .collisions
            .iter()
            .map(|c| (c.first, c.second))
            .collect();
        let dependent: Vec<(usize, usize)> = pairs
            .into_iter()
            .filter(|&(a, b)| {
                cardinal.contains(&(a, b)) || {
                    let (ma, mb) = (self.mdd(problem, node, a), self.mdd(problem, node, b));
                    joint_mdd_empty(&ma, &mb)
                }
            })
            .collect();
        if kind == HeuristicKind::Dg {
            let mut g = ConflictGraph::new(m);
            for &(a, b) in &dependent {
                g.add_edge(a, b, 1);
            }
            return min_vertex_cover(&g, false);
        }

        let keys: Vec<PairKey> = dependent
            .iter()
            .map(|&(a, b)| pair_key(node, a, b))
            .collect();
        let missing: Vec<&PairKey> = keys
            .iter()
            .filter(|k| !self.weights.contains_key(*k))
            .collect();
        let solved = crate::par::map(&missing, |key| {
            pair_weight(problem, key, deadline.slice(fraction))
        });
        for (key, (weight, ll)) in missing.into_iter().zip(solved) {
            self.wdg_subsolves += 1;
            self.ll_expanded += ll;
            self.weights.insert(key.clone(), weight);
        }
        let mut g = ConflictGraph::new(m);
        for (&(a, b), key) in dependent.iter().zip(&keys) {
            g.add_edge(a, b, self.weights[key]);
        }
        min_vertex_cover(&g, true)
    }
}

fn pair_key(node: &CtNode, a: usize, b: usize) -> PairKey {
    let mut cons: Vec<Constraint> = node
        .constraints
        .iter()
        .filter(|c| c.agent == a || c.agent == b)
        .map(|c| Constraint {
            agent: usize::from(c.agent == b),
            ..*c
        })
        .collect();
    cons.sort_unstable();
    (
        a,
        b,
        node.task_of(a),
        node.task_of(b),
        cons,
        node.paths[a].finish_time,
        node.paths[b].finish_time,
    )
}

/// Extra cost the pair incurs when planned jointly; 1 when the sub-solve
/// gives up, which stays admissible for a dependent pair.
fn pair_weight(problem: &Problem, key: &PairKey, deadline: Deadline) -> (usize, u64) {
    let &(a, b, task_a, task_b, ref cons, ca, cb) = key;
    let assignment = Assignment {
        permutation: vec![0, 1],
        cost: (ca + cb) as u64,
    };
    let sub = ForestSearch::pair_solver(
        problem.pair(a, b, task_a, task_b),
        assignment,
        cons.clone(),
        deadline,
        SUBSOLVE_NODE_LIMIT,
    );
    let (cost, ll) = sub.optimal_cost();
    let weight = cost.map_or(1, |c| c.saturating_sub(ca + cb).max(1));
    (weight, ll)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::highlevel::SolverConfig;
    use crate::model::{GridMap, Instance, Location, Task};

    fn loc(name: &str) -> Location {
        let b = name.as_bytes();
        Location::new((b[0] - b'A') as u32, (b[1] - b'1') as u32)
    }

    fn fig1() -> Instance {
        Instance::new(
            GridMap::open(3, 3),
            vec![loc("B1"), loc("A2")],
            vec![
                Task::new(vec![loc("C2"), loc("A2")]).unwrap(),
                Task::new(vec![loc("B3"), loc("B1")]).unwrap(),
            ],
        )
        .unwrap()
    }

    /// Root of the optimal assignment a1 <- g_b, a2 <- g_a.
    fn swapped_root(search: &mut ForestSearch) -> CtNode {
        loop {
            let node = search.next_node().unwrap().expect("roots remain");
            if node.root && node.assignment.permutation == [1, 0] {
                return node;
            }
            search.expand(&node).unwrap();
        }
    }

    #[test]
    fn fig1_root_collision_is_cardinal() {
        let inst = fig1();
        let mut search = ForestSearch::new(&inst, SolverConfig::optimal());
        let root = swapped_root(&mut search);
        assert_eq!(root.collisions[0], Collision::vertex(0, 1, loc("B2"), 1));
        let classes = search.classify(&root);
        assert_eq!(classes[0], CollisionClass::Cardinal);
    }

    #[test]
    fn fig1_root_heuristics_are_one() {
        let inst = fig1();
        let mut search = ForestSearch::new(&inst, SolverConfig::optimal());
        let root = swapped_root(&mut search);
        assert_eq!(search.node_heuristic(&root, HeuristicKind::None), 0);
        assert_eq!(search.node_heuristic(&root, HeuristicKind::Cg), 1);
        assert_eq!(search.node_heuristic(&root, HeuristicKind::Dg), 1);
        assert_eq!(search.node_heuristic(&root, HeuristicKind::Wdg), 1);
    }

    #[test]
    fn semi_and_non_cardinal() {
        // a: A1 -> A3 has a single shortest route; b: C1 -> A2 has three.
        let map = GridMap::open(3, 3);
        let inst = Instance::new(
            map,
            vec![loc("A1"), loc("C1")],
            vec![
                Task::new(vec![loc("A3")]).unwrap(),
                Task::new(vec![loc("A2")]).unwrap(),
            ],
        )
        .unwrap();
        let problem = Problem::from_instance(&inst, inst.default_horizon());
        let table = &problem.table;
        let none = crate::mla::ConstraintSet::new();
        let a = build_mdd(inst.map(), loc("A1"), &inst.tasks()[0], &none, 2, table);
        let b = build_mdd(inst.map(), loc("C1"), &inst.tasks()[1], &none, 3, table);
        assert_eq!(a.locations_at(1), vec![loc("A2")]);
        assert_eq!(b.locations_at(1).len(), 2);
        let semi = Collision::vertex(0, 1, loc("A2"), 1);
        assert_eq!(
            classify_collision(&semi, &a, &b),
            CollisionClass::SemiCardinal
        );
        let non = Collision::vertex(1, 0, loc("B2"), 2);
        let c = build_mdd(inst.map(), loc("C1"), &inst.tasks()[0], &none, 4, table);
        assert!(c.locations_at(2).len() >= 2);
        assert_eq!(
            classify_collision(&non, &b, &c),
            CollisionClass::NonCardinal
        );
    }
}
