#![allow(dead_code)]

use mgtapf::iobench::{generate_instance, random_map};
use mgtapf::model::{GridMap, Instance, Location, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn loc(name: &str) -> Location {
    let b = name.as_bytes();
    Location::new((b[0] - b'A') as u32, (b[1] - b'1') as u32)
}

pub fn task(names: &[&str]) -> Task {
    Task::new(names.iter().map(|n| loc(n)).collect()).unwrap()
}

/// The two-agent example on an open 3×3 grid: a1 at B1, a2 at A2,
/// task 0 = (C2, A2), task 1 = (B3, B1).
pub fn fig1() -> Instance {
    Instance::new(
        GridMap::open(3, 3),
        vec![loc("B1"), loc("A2")],
        vec![task(&["C2", "A2"]), task(&["B3", "B1"])],
    )
    .unwrap()
}

pub const FIG1_MAP: &str = "type octile\nheight 3\nwidth 3\nmap\n...\n...\n...\n";
pub const FIG1_SCEN: &str =
    "agents 2\nagent 0 1 0\nagent 1 0 1\ntask 0 2 2 1 0 1\ntask 1 2 1 2 1 0\n";

/// One small random instance: map at most 5×5 with at most 20% obstacles,
/// 2 or 3 agents, every task of length K in 1..=3.
pub fn small_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0001);
    loop {
        let h = rng.random_range(2..=5);
        let w = rng.random_range(3..=5);
        let density = rng.random_range(0.0..=0.2);
        let map = random_map(h, w, density, rng.random());
        let m = rng.random_range(2..=3);
        let k = rng.random_range(1..=3);
        if let Ok(inst) = generate_instance(rng.random(), &map, m, k, k) {
            return inst;
        }
    }
}

pub fn small_suite(n: u64) -> Vec<Instance> {
    (0..n).map(small_instance).collect()
}

/// 8×8 instances with 10% obstacles for comparing expansion counts.
pub fn medium_instance(seed: u64, agents: usize) -> Instance {
    let map = random_map(8, 8, 0.1, seed ^ 0x88);
    generate_instance(seed, &map, agents, 2, 2).unwrap()
}
