//! Domain types shared by every solver: grid maps, tasks, instances, paths
//! and plans, plus the collision detector and the independent validator.

mod collision;
mod validate;

use std::fmt;

use thiserror::Error;

pub use collision::{find_collisions, Collision, CollisionKind};
pub use validate::{validate_solution, Defect, DefectKind, ValidationReport};

/// Errors raised when a model value would break its invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("map dimensions must be positive, got {height}x{width}")]
    EmptyMap { height: usize, width: usize },
    #[error("blocked mask has {got} cells, expected {expected}")]
    MaskSize { expected: usize, got: usize },
    #[error("location {0} is outside the map")]
    OutOfBounds(Location),
    #[error("location {0} is blocked")]
    Blocked(Location),
    #[error("task must contain at least one goal")]
    EmptyTask,
    #[error("instance needs at least one agent")]
    NoAgents,
    #[error("{starts} starts but {tasks} tasks")]
    CountMismatch { starts: usize, tasks: usize },
    #[error("agents {0} and {1} share start {2}")]
    DuplicateStart(usize, usize, Location),
}

/// A grid cell, addressed by row and column (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub row: u32,
    pub col: u32,
}

impl Location {
    pub const fn new(row: u32, col: u32) -> Self {
        Location { row, col }
    }

    pub fn manhattan(self, other: Location) -> u32 {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// A 4-connected grid. Free cells are vertices, adjacent free cells share a
/// unit-weight undirected edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    height: usize,
    width: usize,
    blocked: Vec<bool>,
}

impl GridMap {
    pub fn new(height: usize, width: usize, blocked: Vec<bool>) -> Result<Self, ModelError> {
        if height == 0 || width == 0 {
            return Err(ModelError::EmptyMap { height, width });
        }
        if blocked.len() != height * width {
            return Err(ModelError::MaskSize {
                expected: height * width,
                got: blocked.len(),
            });
        }
        Ok(GridMap {
            height,
            width,
            blocked,
        })
    }

    /// An obstacle-free map.
    pub fn open(height: usize, width: usize) -> Self {
        GridMap::new(height, width, vec![false; height * width]).expect("positive dimensions")
    }

    /// Builds a map from rows of `.` (free) and `@` (blocked) characters.
    pub fn from_rows(rows: &[&str]) -> Result<Self, ModelError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut blocked = Vec::with_capacity(height * width);
        for row in rows {
            blocked.extend(row.chars().map(|c| c != '.'));
        }
        GridMap::new(height, width, blocked)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_cells(&self) -> usize {
        self.blocked.len()
    }

    pub fn num_free(&self) -> usize {
        self.blocked.iter().filter(|b| !**b).count()
    }

    pub fn contains(&self, loc: Location) -> bool {
        (loc.row as usize) < self.height && (loc.col as usize) < self.width
    }

    pub fn is_free(&self, loc: Location) -> bool {
        self.contains(loc) && !self.blocked[self.cell(loc)]
    }

    /// Row-major cell index. Caller guarantees `loc` is in bounds.
    pub fn cell(&self, loc: Location) -> usize {
        loc.row as usize * self.width + loc.col as usize
    }

    pub fn location(&self, cell: usize) -> Location {
        Location::new((cell / self.width) as u32, (cell % self.width) as u32)
    }

    pub fn free_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.blocked.len()).filter(move |&c| !self.blocked[c])
    }

    pub fn blocked_mask(&self) -> &[bool] {
        &self.blocked
    }

    /// Checks that `loc` is an in-bounds free cell.
    pub fn check_free(&self, loc: Location) -> Result<(), ModelError> {
        if !self.contains(loc) {
            Err(ModelError::OutOfBounds(loc))
        } else if self.blocked[self.cell(loc)] {
            Err(ModelError::Blocked(loc))
        } else {
            Ok(())
        }
    }

    /// The free 4-neighbours of `loc` in up, left, right, down order.
    pub fn neighbors(&self, loc: Location) -> Result<Vec<Location>, ModelError> {
        self.check_free(loc)?;
        Ok(self
            .cell_neighbors(self.cell(loc))
            .map(|c| self.location(c))
            .collect())
    }

    /// Index form of [`GridMap::neighbors`] used by the search code.
    pub(crate) fn cell_neighbors(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        let (w, h) = (self.width, self.height);
        let (r, c) = (cell / w, cell % w);
        let up = (r > 0).then(|| cell - w);
        let left = (c > 0).then(|| cell - 1);
        let right = (c + 1 < w).then(|| cell + 1);
        let down = (r + 1 < h).then(|| cell + w);
        [up, left, right, down]
            .into_iter()
            .flatten()
            .filter(move |&n| !self.blocked[n])
    }
}

/// An ordered sequence of goal locations that must be visited in turn.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Task {
    goals: Vec<Location>,
}

impl Task {
    pub fn new(goals: Vec<Location>) -> Result<Self, ModelError> {
        if goals.is_empty() {
            return Err(ModelError::EmptyTask);
        }
        Ok(Task { goals })
    }

    pub fn goals(&self) -> &[Location] {
        &self.goals
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn final_goal(&self) -> Location {
        *self.goals.last().expect("tasks are non-empty")
    }
}

/// A multi-goal task assignment and path finding instance: `m` agents with
/// distinct starts and `m` tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    map: GridMap,
    starts: Vec<Location>,
    tasks: Vec<Task>,
}

impl Instance {
    pub fn new(map: GridMap, starts: Vec<Location>, tasks: Vec<Task>) -> Result<Self, ModelError> {
        if starts.is_empty() {
            return Err(ModelError::NoAgents);
        }
        if starts.len() != tasks.len() {
            return Err(ModelError::CountMismatch {
                starts: starts.len(),
                tasks: tasks.len(),
            });
        }
        for (i, &s) in starts.iter().enumerate() {
            map.check_free(s)?;
            if let Some(j) = starts[..i].iter().position(|&o| o == s) {
                return Err(ModelError::DuplicateStart(j, i, s));
            }
        }
        for task in &tasks {
            for &g in task.goals() {
                map.check_free(g)?;
            }
        }
        Ok(Instance { map, starts, tasks })
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn starts(&self) -> &[Location] {
        &self.starts
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn num_agents(&self) -> usize {
        self.starts.len()
    }

    pub fn total_goals(&self) -> usize {
        self.tasks.iter().map(Task::len).sum()
    }

    /// Practical low-level horizon: `|V| * (sum of K_j + m)`.
    pub fn default_horizon(&self) -> usize {
        self.map.num_free() * (self.total_goals() + self.num_agents())
    }
}

/// One agent's path. `locations[t]` is the position at time `t`; beyond the
/// stored prefix the agent stays at its last location forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub locations: Vec<Location>,
    pub finish_time: usize,
}

impl Path {
    /// A path stored exactly up to its finish time.
    pub fn new(locations: Vec<Location>) -> Self {
        assert!(!locations.is_empty(), "a path holds at least its start");
        let finish_time = locations.len() - 1;
        Path {
            locations,
            finish_time,
        }
    }

    pub fn at(&self, t: usize) -> Location {
        match self.locations.get(t) {
            Some(&l) => l,
            None => *self.locations.last().expect("non-empty path"),
        }
    }

    /// Last timestep that is explicitly stored or claimed as finish time.
    pub(crate) fn horizon(&self) -> usize {
        self.finish_time.max(self.locations.len().saturating_sub(1))
    }
}

/// A task assignment together with one path per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    /// `assignment[agent]` is the task index given to that agent.
    pub assignment: Vec<usize>,
    pub paths: Vec<Path>,
    pub flowtime: usize,
}

impl Plan {
    pub fn new(assignment: Vec<usize>, paths: Vec<Path>) -> Self {
        let flowtime = paths.iter().map(|p| p.finish_time).sum();
        Plan {
            assignment,
            paths,
            flowtime,
        }
    }

    pub fn makespan(&self) -> usize {
        self.paths.iter().map(|p| p.finish_time).max().unwrap_or(0)
    }
}
