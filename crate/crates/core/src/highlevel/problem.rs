use std::sync::Arc;

use crate::budget::{Deadline, Interrupted};
use crate::mla::{
    astar, focal, precompute_goal_distances, ConflictTable, Constraint, ConstraintSet,
    DistanceTable, LowLevel, TaskProfile,
};
use crate::model::{GridMap, Instance, Path};

/// Cell-indexed view of the agents and tasks a search works on. The main
/// solver covers the whole instance; pairwise heuristic sub-solves use a
/// two-agent restriction sharing the same map and distance table.
#[derive(Clone)]
pub(crate) struct Problem<'a> {
    pub map: &'a GridMap,
    pub table: Arc<DistanceTable>,
    pub starts: Vec<usize>,
    pub tasks: Vec<TaskProfile>,
    pub horizon: usize,
}

impl<'a> Problem<'a> {
    pub fn from_instance(instance: &'a Instance, horizon: usize) -> Self {
        let map = instance.map();
        let table = Arc::new(precompute_goal_distances(map, instance.tasks()));
        let tasks = instance
            .tasks()
            .iter()
            .map(|t| TaskProfile::new(map, t, &table))
            .collect();
        Problem {
            map,
            starts: instance.starts().iter().map(|&s| map.cell(s)).collect(),
            tasks,
            table,
            horizon,
        }
    }

    /// Agents `a` and `b` only, keeping their tasks as local tasks 0 and 1.
    pub fn pair(&self, a: usize, b: usize, task_a: usize, task_b: usize) -> Problem<'a> {
        Problem {
            map: self.map,
            table: Arc::clone(&self.table),
            starts: vec![self.starts[a], self.starts[b]],
            tasks: vec![self.tasks[task_a].clone(), self.tasks[task_b].clone()],
            horizon: self.horizon,
        }
    }

    pub fn num_agents(&self) -> usize {
        self.starts.len()
    }

    fn ctx(&self, deadline: Deadline) -> LowLevel<'_> {
        LowLevel {
            map: self.map,
            table: &self.table,
            horizon: self.horizon,
            deadline,
        }
    }

    pub fn constraint_set(&self, agent: usize, constraints: &[Constraint]) -> ConstraintSet {
        ConstraintSet::for_agent(self.map, agent, constraints)
    }

    pub fn plan(
        &self,
        agent: usize,
        task: usize,
        cons: &ConstraintSet,
        deadline: Deadline,
        expansions: &mut u64,
    ) -> Result<Option<Path>, Interrupted> {
        astar(
            &self.ctx(deadline),
            self.starts[agent],
            &self.tasks[task],
            cons,
            expansions,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn plan_focal(
        &self,
        agent: usize,
        task: usize,
        cons: &ConstraintSet,
        omega: f64,
        others: &[&Path],
        deadline: Deadline,
        expansions: &mut u64,
    ) -> Result<Option<(Path, usize)>, Interrupted> {
        let table = ConflictTable::new(self.map, others);
        focal(
            &self.ctx(deadline),
            self.starts[agent],
            &self.tasks[task],
            cons,
            omega,
            &table,
            expansions,
        )
    }
}
