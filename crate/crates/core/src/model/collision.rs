use std::borrow::Borrow;
use std::fmt;

use super::{Location, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollisionKind {
    /// Both agents occupy `at` at the collision time.
    Vertex { at: Location },
    /// The first agent moves `from -> to` while the second moves `to -> from`
    /// between the collision time and the next timestep.
    Edge { from: Location, to: Location },
}

/// A collision between agents `first < second`. Field order gives the
/// canonical ordering: time, then agent pair, then vertex before edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Collision {
    pub time: usize,
    pub first: usize,
    pub second: usize,
    pub kind: CollisionKind,
}

impl Collision {
    pub fn vertex(first: usize, second: usize, at: Location, time: usize) -> Self {
        Collision {
            time,
            first,
            second,
            kind: CollisionKind::Vertex { at },
        }
    }

    pub fn edge(first: usize, second: usize, from: Location, to: Location, time: usize) -> Self {
        Collision {
            time,
            first,
            second,
            kind: CollisionKind::Edge { from, to },
        }
    }

    pub fn is_vertex(&self) -> bool {
        matches!(self.kind, CollisionKind::Vertex { .. })
    }
}

impl fmt::Display for Collision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CollisionKind::Vertex { at } => {
                write!(f, "<a{},a{},{},{}>", self.first, self.second, at, self.time)
            }
            CollisionKind::Edge { from, to } => write!(
                f,
                "<a{},a{},{},{},{}>",
                self.first, self.second, from, to, self.time
            ),
        }
    }
}

/// All vertex and edge collisions among `paths`, scanned up to the largest
/// finish time and returned in canonical order. Finished agents keep
/// occupying their last location.
pub fn find_collisions<P: Borrow<Path>>(paths: &[P]) -> Vec<Collision> {
    let horizon = paths
        .iter()
        .map(|p| p.borrow().horizon())
        .max()
        .unwrap_or(0);
    let mut out = Vec::new();
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            pair_collisions(
                i,
                paths[i].borrow(),
                j,
                paths[j].borrow(),
                horizon,
                &mut out,
            );
        }
    }
    out.sort_unstable();
    out
}

pub(crate) fn pair_collisions(
    i: usize,
    pi: &Path,
    j: usize,
    pj: &Path,
    horizon: usize,
    out: &mut Vec<Collision>,
) {
    for t in 0..=horizon {
        let (a, b) = (pi.at(t), pj.at(t));
        if a == b {
            out.push(Collision::vertex(i, j, a, t));
        }
        if t < horizon {
            let (a2, b2) = (pi.at(t + 1), pj.at(t + 1));
            if a != a2 && a == b2 && a2 == b {
                out.push(Collision::edge(i, j, a, a2, t));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc(name: &str) -> Location {
        let b = name.as_bytes();
        Location::new((b[0] - b'A') as u32, (b[1] - b'1') as u32)
    }

    fn path(names: &[&str]) -> Path {
        Path::new(names.iter().map(|n| loc(n)).collect())
    }

    #[test]
    fn worked_example_root_collisions() {
        let a1 = path(&["B1", "B2", "B3", "B2", "B1"]);
        let a2 = path(&["A2", "B2", "C2", "B2", "A2"]);
        let got = find_collisions(&[a1, a2]);
        assert_eq!(
            got,
            vec![
                Collision::vertex(0, 1, loc("B2"), 1),
                Collision::vertex(0, 1, loc("B2"), 3)
            ]
        );
    }

    #[test]
    fn static_agents_never_collide() {
        let got = find_collisions(&[path(&["A1"]), path(&["C3"])]);
        assert!(got.is_empty());
    }

    #[test]
    fn head_on_swap_is_edge_collision() {
        let got = find_collisions(&[path(&["B1", "B2"]), path(&["B2", "B1"])]);
        assert_eq!(got, vec![Collision::edge(0, 1, loc("B1"), loc("B2"), 0)]);
    }

    #[test]
    fn parked_agent_is_an_obstacle() {
        // a0 finishes at A1 at t=0; a1 passes through A1 at t=2.
        let got = find_collisions(&[path(&["A1"]), path(&["A3", "A2", "A1", "B1"])]);
        assert_eq!(got, vec![Collision::vertex(0, 1, loc("A1"), 2)]);
    }

    #[test]
    fn vertex_sorts_before_edge_at_same_time() {
        let v = Collision::vertex(0, 1, loc("A1"), 3);
        let e = Collision::edge(0, 1, loc("A1"), loc("A2"), 3);
        assert!(v < e);
        assert!(Collision::edge(0, 1, loc("A1"), loc("A2"), 2) < v);
    }
}
