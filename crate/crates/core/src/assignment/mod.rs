//! Task assignment: the agent-by-task cost matrix, a minimum-cost bijection
//! via the Hungarian method, and lazy enumeration of bijections in
//! non-decreasing cost order by Murty-style partitioning.

mod hungarian;
mod murty;

use std::fmt;

use thiserror::Error;

use crate::mla::{DistanceTable, UNREACHABLE};
use crate::model::Instance;

pub use hungarian::best_assignment;
pub use murty::AssignmentEnumerator;

/// Matrix entry for an agent that cannot complete a task. Strictly larger
/// than any feasible assignment total.
pub const INFINITE: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("no finite-cost assignment of tasks to agents exists")]
    Infeasible,
}

/// Square matrix of collision-free agent-to-task costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<u64>,
}

impl CostMatrix {
    /// Builds a matrix from rows; entries at or above [`INFINITE`] are
    /// treated as infinite.
    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "cost matrix must be square");
            data.extend(r.iter().map(|&c| c.min(INFINITE)));
        }
        CostMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, agent: usize, task: usize) -> u64 {
        self.data[agent * self.n + task]
    }

    pub fn is_finite(&self, agent: usize, task: usize) -> bool {
        self.get(agent, task) < INFINITE
    }

    /// Sum of the entries selected by `permutation` (saturating at
    /// [`INFINITE`]).
    pub fn cost_of(&self, permutation: &[usize]) -> u64 {
        permutation
            .iter()
            .enumerate()
            .map(|(a, &t)| self.get(a, t))
            .sum::<u64>()
            .min(INFINITE)
    }
}

impl fmt::Display for CostMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|t| {
                    if self.is_finite(a, t) {
                        self.get(a, t).to_string()
                    } else {
                        "inf".into()
                    }
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// A bijection from agents to tasks with its matrix cost.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    /// `permutation[agent]` is the task given to that agent.
    pub permutation: Vec<usize>,
    pub cost: u64,
}

/// `C[i][j]` = distance from agent i's start to the first goal of task j
/// plus the goal-to-goal legs of task j.
pub fn build_cost_matrix(instance: &Instance, table: &DistanceTable) -> CostMatrix {
    let map = instance.map();
    let rows: Vec<Vec<u64>> = instance
        .starts()
        .iter()
        .map(|&s| {
            instance
                .tasks()
                .iter()
                .enumerate()
                .map(|(j, task)| match table.task_cost(map, s, task, j) {
                    UNREACHABLE => INFINITE,
                    d => d as u64,
                })
                .collect()
        })
        .collect();
    CostMatrix::from_rows(&rows)
}
