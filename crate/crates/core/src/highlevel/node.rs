use std::sync::Arc;

use crate::assignment::Assignment;
use crate::mla::Constraint;
use crate::model::{Collision, Path};

/// One node of the constraint forest.
#[derive(Debug, Clone)]
pub struct CtNode {
    /// Creation sequence number.
    pub id: usize,
    pub root: bool,
    pub assignment: Arc<Assignment>,
    pub constraints: Vec<Constraint>,
    /// Unchanged paths are shared with the parent.
    pub paths: Vec<Arc<Path>>,
    pub cost: usize,
    pub collisions: Vec<Collision>,
    pub h_val: usize,
    /// Focal mode: per-agent lower bounds from the focal low level.
    pub lower_bounds: Vec<usize>,
    /// Focal mode: sum of `lower_bounds`.
    pub lb: usize,
}

impl CtNode {
    pub fn f_val(&self) -> usize {
        self.cost + self.h_val
    }

    pub fn num_collisions(&self) -> usize {
        self.collisions.len()
    }

    pub fn task_of(&self, agent: usize) -> usize {
        self.assignment.permutation[agent]
    }

    pub fn constraints_of(&self, agent: usize) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(move |c| c.agent == agent)
    }
}

/// What one expansion produced. Children whose constrained agent has no
/// path within the horizon are counted in `pruned`.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub collision: Collision,
    pub children: Vec<CtNode>,
    pub new_root: Option<CtNode>,
    pub pruned: usize,
}
