use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{GridMap, Instance, Location, Task};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("need at least one agent")]
    NoAgents,
    #[error("goal band [{0}, {1}] is empty or starts at 0")]
    BadGoalBand(usize, usize),
    #[error("{needed} distinct cells needed but the map has {free} free cells")]
    InsufficientCells { needed: usize, free: usize },
    #[error("free cells of the map are not connected")]
    Disconnected,
}

/// Whether the free cells of `map` form one 4-connected component.
pub fn is_connected(map: &GridMap) -> bool {
    let free: Vec<usize> = map.free_cells().collect();
    let Some(&first) = free.first() else {
        return true;
    };
    let mut seen = vec![false; map.num_cells()];
    seen[first] = true;
    let mut stack = vec![first];
    let mut count = 1;
    while let Some(c) = stack.pop() {
        for n in map.neighbors(map.location(c)).expect("free cell") {
            let nc = map.cell(n);
            if !seen[nc] {
                seen[nc] = true;
                count += 1;
                stack.push(nc);
            }
        }
    }
    count == free.len()
}

/// Random instance on `map`, fully determined by `seed`.
///
/// Starts are distinct. Each task has a length drawn uniformly from
/// `[k_min, k_max]`, goals never repeat consecutively, and final goals are
/// pairwise distinct (two tasks ending on one cell can never both finish).
pub fn generate_instance(
    seed: u64,
    map: &GridMap,
    m: usize,
    k_min: usize,
    k_max: usize,
) -> Result<Instance, GenError> {
    if m == 0 {
        return Err(GenError::NoAgents);
    }
    if k_min == 0 || k_min > k_max {
        return Err(GenError::BadGoalBand(k_min, k_max));
    }
    let free: Vec<Location> = map.free_cells().map(|c| map.location(c)).collect();
    let needed = if k_max == 1 { m } else { m.max(2) };
    if free.len() < needed {
        return Err(GenError::InsufficientCells {
            needed,
            free: free.len(),
        });
    }
    if !is_connected(map) {
        return Err(GenError::Disconnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Location> = free.choose_multiple(&mut rng, m).copied().collect();
    let mut finals: Vec<Location> = free.choose_multiple(&mut rng, m).copied().collect();
    finals.shuffle(&mut rng);
    let tasks = finals
        .into_iter()
        .map(|last| {
            let k = rng.random_range(k_min..=k_max);
            let mut goals = Vec::with_capacity(k);
            for i in 0..k - 1 {
                // The goal before the final one must differ from it too.
                loop {
                    let g = *free.choose(&mut rng).expect("non-empty");
                    let clash_prev = goals.last() == Some(&g);
                    let clash_last = i == k - 2 && g == last;
                    if !clash_prev && !clash_last {
                        goals.push(g);
                        break;
                    }
                }
            }
            goals.push(last);
            Task::new(goals).expect("free goals")
        })
        .collect();
    Ok(Instance::new(map.clone(), starts, tasks).expect("distinct free starts"))
}
