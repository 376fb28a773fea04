//! Multi-label space-time A* (MLA*) for a single agent with an ordered goal
//! sequence, its focal variant, and the backward distance tables feeding
//! both the heuristic and the assignment cost matrix.
//!
//! A search state is `(location, time, label)` where the label names the next
//! goal to visit. Arriving at that goal advances the label by one; the goal
//! test requires all goals visited, the final goal reached, and no later
//! vertex constraint on that cell so the agent can stay there forever.

mod constraints;
mod distance;
mod search;

use crate::budget::Deadline;
use crate::model::{GridMap, Location, Path, Task};

pub use constraints::{Constraint, ConstraintKind, ConstraintSet};
pub use distance::{precompute_goal_distances, DistanceTable, UNREACHABLE};

pub(crate) use distance::TaskProfile;
pub(crate) use search::{astar, focal, focal_bound, ConflictTable, LowLevel};

/// A low-level search state. `label` is 1-based: label `k` means goal `k` is
/// next, label `K + 1` means every goal has been visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchState {
    pub location: Location,
    pub time: usize,
    pub label: usize,
}

/// Remaining distance from the state's location through every unvisited
/// goal. [`UNREACHABLE`] if some leg is disconnected.
pub fn h_value(map: &GridMap, state: SearchState, task: &Task, table: &DistanceTable) -> u32 {
    assert!(
        state.label >= 1 && state.label <= task.len() + 1,
        "label out of range"
    );
    TaskProfile::new(map, task, table).h(table, map.cell(state.location), state.label - 1)
}

/// Time-optimal path for `task` from `start` obeying `constraints`, or `None`
/// when no such path finishes within `horizon`.
pub fn mla_star(
    map: &GridMap,
    start: Location,
    task: &Task,
    constraints: &ConstraintSet,
    table: &DistanceTable,
    horizon: usize,
) -> Option<Path> {
    let ctx = LowLevel {
        map,
        table,
        horizon,
        deadline: Deadline::none(),
    };
    let profile = TaskProfile::new(map, task, table);
    astar(&ctx, map.cell(start), &profile, constraints, &mut 0).expect("no deadline")
}

/// Focal MLA*: the returned path costs at most `omega` times the returned
/// lower bound, which never exceeds the time-optimal cost. Ties inside the
/// focal window go to the path with the fewest collisions against
/// `other_paths`.
#[allow(clippy::too_many_arguments)]
pub fn mla_star_focal(
    map: &GridMap,
    start: Location,
    task: &Task,
    constraints: &ConstraintSet,
    table: &DistanceTable,
    horizon: usize,
    omega: f64,
    other_paths: &[&Path],
) -> Option<(Path, usize)> {
    assert!(omega >= 1.0, "omega must be >= 1");
    let ctx = LowLevel {
        map,
        table,
        horizon,
        deadline: Deadline::none(),
    };
    let profile = TaskProfile::new(map, task, table);
    let others = ConflictTable::new(map, other_paths);
    focal(
        &ctx,
        map.cell(start),
        &profile,
        constraints,
        omega,
        &others,
        &mut 0,
    )
    .expect("no deadline")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::find_collisions;

    fn loc(name: &str) -> Location {
        let b = name.as_bytes();
        Location::new((b[0] - b'A') as u32, (b[1] - b'1') as u32)
    }

    fn task(names: &[&str]) -> Task {
        Task::new(names.iter().map(|n| loc(n)).collect()).unwrap()
    }

    fn fig1_tasks() -> Vec<Task> {
        vec![task(&["C2", "A2"]), task(&["B3", "B1"])]
    }

    #[test]
    fn open_grid_distances() {
        let map = GridMap::open(3, 3);
        let table = precompute_goal_distances(&map, &[task(&["B2"])]);
        assert_eq!(table.distance(loc("A1"), loc("B2")), Some(2));
        assert_eq!(table.distance(loc("B2"), loc("B2")), Some(0));
    }

    #[test]
    fn suffix_sum_of_worked_example() {
        let map = GridMap::open(3, 3);
        let table = precompute_goal_distances(&map, &fig1_tasks());
        assert_eq!(table.suffix(1), &[2, 0]);
        assert_eq!(table.suffix(0), &[2, 0]);
    }

    #[test]
    fn wall_makes_far_side_unreachable() {
        let map = GridMap::from_rows(&["..@..", "..@..", "..@.."]).unwrap();
        let t = Task::new(vec![Location::new(1, 4)]).unwrap();
        let table = precompute_goal_distances(&map, &[t]);
        assert_eq!(
            table.distance(Location::new(0, 0), Location::new(1, 4)),
            None
        );
        assert_eq!(
            table.distance(Location::new(0, 3), Location::new(1, 4)),
            Some(2)
        );
    }

    #[test]
    fn h_values() {
        let map = GridMap::open(3, 3);
        let tasks = fig1_tasks();
        let table = precompute_goal_distances(&map, &tasks);
        let s = |l: &str, label| SearchState {
            location: loc(l),
            time: 0,
            label,
        };
        assert_eq!(h_value(&map, s("B1", 1), &tasks[1], &table), 4);
        assert_eq!(h_value(&map, s("A2", 1), &tasks[0], &table), 4);
        assert_eq!(h_value(&map, s("B1", 3), &tasks[1], &table), 0);
    }

    #[test]
    fn worked_example_unconstrained() {
        let map = GridMap::open(3, 3);
        let tasks = fig1_tasks();
        let table = precompute_goal_distances(&map, &tasks);
        let p = mla_star(
            &map,
            loc("B1"),
            &tasks[1],
            &ConstraintSet::new(),
            &table,
            50,
        )
        .unwrap();
        assert_eq!(p.finish_time, 4);
        let names: Vec<_> = ["B1", "B2", "B3", "B2", "B1"]
            .iter()
            .map(|n| loc(n))
            .collect();
        assert_eq!(p.locations, names);
    }

    #[test]
    fn worked_example_vertex_constraint_costs_a_wait() {
        let map = GridMap::open(3, 3);
        let tasks = fig1_tasks();
        let table = precompute_goal_distances(&map, &tasks);
        let mut cons = ConstraintSet::new();
        cons.add(&map, &Constraint::vertex(0, loc("B2"), 1));
        let p = mla_star(&map, loc("B1"), &tasks[1], &cons, &table, 50).unwrap();
        assert_eq!(p.finish_time, 5);
        assert_ne!(p.at(1), loc("B2"));
    }

    #[test]
    fn start_on_single_goal() {
        let map = GridMap::open(3, 3);
        let t = task(&["C3"]);
        let table = precompute_goal_distances(&map, std::slice::from_ref(&t));
        let p = mla_star(&map, loc("C3"), &t, &ConstraintSet::new(), &table, 10).unwrap();
        assert_eq!(p, Path::new(vec![loc("C3")]));
    }

    #[test]
    fn parking_blocked_by_late_constraint() {
        let map = GridMap::open(1, 3);
        let t = Task::new(vec![Location::new(0, 2)]).unwrap();
        let table = precompute_goal_distances(&map, std::slice::from_ref(&t));
        let mut cons = ConstraintSet::new();
        cons.add(&map, &Constraint::vertex(0, Location::new(0, 2), 5));
        let p = mla_star(&map, Location::new(0, 0), &t, &cons, &table, 20).unwrap();
        assert_eq!(p.finish_time, 6);
        assert_ne!(p.at(5), Location::new(0, 2));
    }

    #[test]
    fn horizon_cuts_search() {
        let map = GridMap::open(3, 3);
        let tasks = fig1_tasks();
        let table = precompute_goal_distances(&map, &tasks);
        assert!(mla_star(&map, loc("B1"), &tasks[1], &ConstraintSet::new(), &table, 3).is_none());
        assert!(mla_star(&map, loc("B1"), &tasks[1], &ConstraintSet::new(), &table, 4).is_some());
    }

    #[test]
    fn duplicate_goals_take_a_wait() {
        let map = GridMap::open(1, 3);
        let t = Task::new(vec![Location::new(0, 2), Location::new(0, 2)]).unwrap();
        let table = precompute_goal_distances(&map, std::slice::from_ref(&t));
        let p = mla_star(
            &map,
            Location::new(0, 0),
            &t,
            &ConstraintSet::new(),
            &table,
            20,
        )
        .unwrap();
        assert_eq!(p.finish_time, 3);
    }

    #[test]
    fn edge_constraint_respected() {
        let map = GridMap::open(1, 3);
        let t = Task::new(vec![Location::new(0, 2)]).unwrap();
        let table = precompute_goal_distances(&map, std::slice::from_ref(&t));
        let mut cons = ConstraintSet::new();
        cons.add(
            &map,
            &Constraint::edge(0, Location::new(0, 0), Location::new(0, 1), 0),
        );
        let p = mla_star(&map, Location::new(0, 0), &t, &cons, &table, 20).unwrap();
        assert_eq!(p.finish_time, 3);
    }

    #[test]
    fn focal_with_unit_omega_matches_astar() {
        let map = GridMap::open(3, 3);
        let tasks = fig1_tasks();
        let table = precompute_goal_distances(&map, &tasks);
        let (p, lb) = mla_star_focal(
            &map,
            loc("B1"),
            &tasks[1],
            &ConstraintSet::new(),
            &table,
            50,
            1.0,
            &[],
        )
        .unwrap();
        assert_eq!((p.finish_time, lb), (4, 4));
    }

    #[test]
    fn focal_avoids_fixed_path_within_bound() {
        let map = GridMap::open(3, 3);
        let tasks = fig1_tasks();
        let table = precompute_goal_distances(&map, &tasks);
        let a1 = mla_star(
            &map,
            loc("B1"),
            &tasks[1],
            &ConstraintSet::new(),
            &table,
            50,
        )
        .unwrap();
        let (p, lb) = mla_star_focal(
            &map,
            loc("A2"),
            &tasks[0],
            &ConstraintSet::new(),
            &table,
            50,
            1.3,
            &[&a1],
        )
        .unwrap();
        assert_eq!(lb, 4);
        assert!(p.finish_time as f64 <= 1.3 * 4.0);
        // floor(1.3 * 4) = 5 leaves room for one wait, which dodges both
        // collisions with a1.
        assert!(find_collisions(&[a1, p]).len() < 2);
    }
}
