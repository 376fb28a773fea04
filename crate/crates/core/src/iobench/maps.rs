use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::GridMap;

use super::generate::is_connected;

/// Names accepted by [`builtin_map`].
pub const BUILTIN_MAPS: [&str; 3] = ["dense20", "sparse32", "empty32"];

/// `dense20`: 20×20 with 30% obstacles; `sparse32`: 32×32 with 10%;
/// `empty32`: 32×32 open. Layouts are fixed seeded draws.
pub fn builtin_map(name: &str) -> Option<GridMap> {
    match name {
        "dense20" => Some(random_map(20, 20, 0.3, 0x20_30)),
        "sparse32" => Some(random_map(32, 32, 0.1, 0x32_10)),
        "empty32" => Some(GridMap::open(32, 32)),
        _ => None,
    }
}

/// A map with `round(density * cells)` blocked cells whose free cells stay
/// connected. Cells are visited in a seeded random order and blocked only
/// if that keeps the free cells connected.
pub fn random_map(height: usize, width: usize, density: f64, seed: u64) -> GridMap {
    let cells = height * width;
    let target = ((density.clamp(0.0, 1.0) * cells as f64).round() as usize).min(cells - 1);
    let mut order: Vec<usize> = (0..cells).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut blocked = vec![false; cells];
    let mut count = 0;
    for c in order {
        if count == target {
            break;
        }
        blocked[c] = true;
        let map = GridMap::new(height, width, blocked.clone()).expect("positive dimensions");
        if is_connected(&map) {
            count += 1;
        } else {
            blocked[c] = false;
        }
    }
    GridMap::new(height, width, blocked).expect("positive dimensions")
}
