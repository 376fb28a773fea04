use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::model::{GridMap, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    /// The agent may not be at `at` at the constraint time.
    Vertex { at: Location },
    /// The agent may not move `from -> to` between the constraint time and
    /// the next timestep.
    Edge { from: Location, to: Location },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub agent: usize,
    pub time: usize,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn vertex(agent: usize, at: Location, time: usize) -> Self {
        Constraint {
            agent,
            time,
            kind: ConstraintKind::Vertex { at },
        }
    }

    pub fn edge(agent: usize, from: Location, to: Location, time: usize) -> Self {
        Constraint {
            agent,
            time,
            kind: ConstraintKind::Edge { from, to },
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConstraintKind::Vertex { at } => write!(f, "<a{},{},{}>", self.agent, at, self.time),
            ConstraintKind::Edge { from, to } => {
                write!(f, "<a{},{},{},{}>", self.agent, from, to, self.time)
            }
        }
    }
}

/// The constraints of a single agent, indexed for constant-time lookups.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    vertex: FxHashSet<(u32, u32)>,
    edge: FxHashSet<(u32, u32, u32)>,
    latest: FxHashMap<u32, u32>,
    max_time: Option<usize>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        ConstraintSet::default()
    }

    /// Collects the constraints among `all` that apply to `agent`.
    pub fn for_agent<'a>(
        map: &GridMap,
        agent: usize,
        all: impl IntoIterator<Item = &'a Constraint>,
    ) -> Self {
        let mut set = ConstraintSet::new();
        for c in all.into_iter().filter(|c| c.agent == agent) {
            set.add(map, c);
        }
        set
    }

    pub fn add(&mut self, map: &GridMap, c: &Constraint) {
        let t = c.time as u32;
        match c.kind {
            ConstraintKind::Vertex { at } => {
                let cell = map.cell(at) as u32;
                self.vertex.insert((cell, t));
                let e = self.latest.entry(cell).or_insert(t);
                *e = (*e).max(t);
            }
            ConstraintKind::Edge { from, to } => {
                self.edge
                    .insert((map.cell(from) as u32, map.cell(to) as u32, t));
            }
        }
        self.max_time = Some(self.max_time.map_or(c.time, |m| m.max(c.time)));
    }

    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty() && self.edge.is_empty()
    }

    pub(crate) fn forbids_vertex(&self, cell: usize, t: usize) -> bool {
        !self.vertex.is_empty() && self.vertex.contains(&(cell as u32, t as u32))
    }

    pub(crate) fn forbids_edge(&self, from: usize, to: usize, t: usize) -> bool {
        !self.edge.is_empty() && self.edge.contains(&(from as u32, to as u32, t as u32))
    }

    /// Latest vertex-constraint time at `cell`, if any.
    pub(crate) fn latest_at(&self, cell: usize) -> Option<usize> {
        self.latest.get(&(cell as u32)).map(|&t| t as usize)
    }

    /// True when the agent may stay at `cell` from time `t` on forever.
    pub(crate) fn can_park(&self, cell: usize, t: usize) -> bool {
        self.latest_at(cell).is_none_or(|l| l < t)
    }

    pub fn max_time(&self) -> Option<usize> {
        self.max_time
    }
}
