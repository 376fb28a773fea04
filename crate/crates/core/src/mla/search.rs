use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::ops::Bound;

use rustc_hash::{FxHashMap, FxHashSet};

use super::constraints::ConstraintSet;
use super::distance::{DistanceTable, TaskProfile, UNREACHABLE};
use crate::budget::{Deadline, Interrupted};
use crate::model::{GridMap, Path};

const NO_PARENT: u32 = u32::MAX;
const CHECK_EVERY: u64 = 10_000;

/// Shared inputs of a low-level search.
#[derive(Clone, Copy)]
pub(crate) struct LowLevel<'a> {
    pub map: &'a GridMap,
    pub table: &'a DistanceTable,
    pub horizon: usize,
    pub deadline: Deadline,
}

#[derive(Clone, Copy)]
struct Node {
    cell: u32,
    time: u32,
    label: u16,
    parent: u32,
    conflicts: u32,
}

type StateKey = (u32, u32, u16);

// f ascending, then larger g, then larger label, then row-major cell.
type OpenKey = (u32, Reverse<u32>, Reverse<u16>, u32, u32);

fn open_key(n: &Node, f: u32, id: u32) -> OpenKey {
    (f, Reverse(n.time), Reverse(n.label), n.cell, id)
}

fn tick(ctx: &LowLevel, expansions: &mut u64) -> Result<(), Interrupted> {
    *expansions += 1;
    if expansions.is_multiple_of(CHECK_EVERY) {
        ctx.deadline.check()?;
    }
    Ok(())
}

fn extract(map: &GridMap, nodes: &[Node], mut id: u32) -> Path {
    let mut cells = Vec::new();
    while id != NO_PARENT {
        let n = nodes[id as usize];
        cells.push(map.location(n.cell as usize));
        id = n.parent;
    }
    cells.reverse();
    Path::new(cells)
}

/// Yields (cell, label, h) for every legal successor of `n`.
fn successors<'s>(
    ctx: &'s LowLevel,
    task: &'s TaskProfile,
    cons: &'s ConstraintSet,
    n: Node,
) -> impl Iterator<Item = (usize, usize, u32)> + 's {
    let u = n.cell as usize;
    let t = n.time as usize;
    std::iter::once(u)
        .chain(ctx.map.cell_neighbors(u))
        .filter(move |&v| !cons.forbids_vertex(v, t + 1) && !cons.forbids_edge(u, v, t))
        .filter_map(move |v| {
            let label = task.advance(n.label as usize, v);
            let h = task.h(ctx.table, v, label);
            (h != UNREACHABLE && t + 1 + h as usize <= ctx.horizon).then_some((v, label, h))
        })
}

fn is_goal(task: &TaskProfile, cons: &ConstraintSet, n: &Node) -> bool {
    n.label as usize == task.len()
        && n.cell as usize == task.final_goal()
        && cons.can_park(n.cell as usize, n.time as usize)
}

fn root(
    ctx: &LowLevel,
    start: usize,
    task: &TaskProfile,
    cons: &ConstraintSet,
) -> Option<(Node, u32)> {
    let label = task.initial_label(start);
    let h = task.h(ctx.table, start, label);
    if h == UNREACHABLE || h as usize > ctx.horizon || cons.forbids_vertex(start, 0) {
        return None;
    }
    Some((
        Node {
            cell: start as u32,
            time: 0,
            label: label as u16,
            parent: NO_PARENT,
            conflicts: 0,
        },
        h,
    ))
}

/// Multi-label space-time A*: a path of minimum finish time visiting the
/// task's goals in order while obeying `cons`.
pub(crate) fn astar(
    ctx: &LowLevel,
    start: usize,
    task: &TaskProfile,
    cons: &ConstraintSet,
    expansions: &mut u64,
) -> Result<Option<Path>, Interrupted> {
    let Some((first, h0)) = root(ctx, start, task, cons) else {
        return Ok(None);
    };
    let mut nodes = vec![first];
    let mut open = BinaryHeap::new();
    let mut seen: FxHashSet<StateKey> = FxHashSet::default();
    seen.insert((first.cell, 0, first.label));
    open.push(Reverse(open_key(&first, h0, 0)));

    while let Some(Reverse((_, _, _, _, id))) = open.pop() {
        let n = nodes[id as usize];
        if is_goal(task, cons, &n) {
            return Ok(Some(extract(ctx.map, &nodes, id)));
        }
        tick(ctx, expansions)?;
        for (v, label, h) in successors(ctx, task, cons, n) {
            let key = (v as u32, n.time + 1, label as u16);
            if !seen.insert(key) {
                continue;
            }
            let child = Node {
                cell: v as u32,
                time: n.time + 1,
                label: label as u16,
                parent: id,
                conflicts: 0,
            };
            let cid = nodes.len() as u32;
            nodes.push(child);
            open.push(Reverse(open_key(&child, child.time + h, cid)));
        }
    }
    Ok(None)
}

/// Occupancy of the other agents' paths, used to count the collisions a
/// partial path accumulates.
pub(crate) struct ConflictTable {
    occupied: FxHashMap<(u32, u32), u32>,
    moves: FxHashMap<(u32, u32, u32), u32>,
    parked: FxHashMap<u32, Vec<u32>>,
}

impl ConflictTable {
    pub fn new(map: &GridMap, paths: &[&Path]) -> Self {
        let mut table = ConflictTable {
            occupied: FxHashMap::default(),
            moves: FxHashMap::default(),
            parked: FxHashMap::default(),
        };
        for p in paths {
            let end = p.horizon();
            for t in 0..end {
                let a = map.cell(p.at(t)) as u32;
                let b = map.cell(p.at(t + 1)) as u32;
                *table.occupied.entry((a, t as u32)).or_default() += 1;
                if a != b {
                    *table.moves.entry((a, b, t as u32)).or_default() += 1;
                }
            }
            let last = map.cell(p.at(end)) as u32;
            table.parked.entry(last).or_default().push(end as u32);
        }
        table
    }

    fn vertex(&self, cell: usize, t: usize) -> u32 {
        let (c, t) = (cell as u32, t as u32);
        let moving = self.occupied.get(&(c, t)).copied().unwrap_or(0);
        let parked = self
            .parked
            .get(&c)
            .map_or(0, |v| v.iter().filter(|&&since| since <= t).count() as u32);
        moving + parked
    }

    /// Collisions caused by moving `from -> to` between `t` and `t + 1`.
    fn step(&self, from: usize, to: usize, t: usize) -> u32 {
        let swap = if from != to {
            self.moves
                .get(&(to as u32, from as u32, t as u32))
                .copied()
                .unwrap_or(0)
        } else {
            0
        };
        self.vertex(to, t + 1) + swap
    }
}

/// Largest integer cost admitted by a focal window `omega * f_min`.
pub(crate) fn focal_bound(omega: f64, f_min: u64) -> u64 {
    ((omega * f_min as f64) + 1e-9).floor().max(f_min as f64) as u64
}

/// Focal variant of [`astar`]: among open states with f at most
/// `omega * f_min`, expand the one with the fewest collisions against
/// `others`. Returns the path and `f_min` at termination.
pub(crate) fn focal(
    ctx: &LowLevel,
    start: usize,
    task: &TaskProfile,
    cons: &ConstraintSet,
    omega: f64,
    others: &ConflictTable,
    expansions: &mut u64,
) -> Result<Option<(Path, usize)>, Interrupted> {
    let Some((mut first, h0)) = root(ctx, start, task, cons) else {
        return Ok(None);
    };
    first.conflicts = others.vertex(start, 0);
    let mut nodes = vec![first];
    let mut f_of: Vec<u32> = vec![h0];
    let mut open: BTreeSet<OpenKey> = BTreeSet::new();
    let mut focal: BTreeSet<(u32, OpenKey)> = BTreeSet::new();
    let mut live: FxHashMap<StateKey, u32> = FxHashMap::default();
    let mut closed: FxHashSet<StateKey> = FxHashSet::default();

    let k0 = open_key(&first, h0, 0);
    open.insert(k0);
    focal.insert((first.conflicts, k0));
    live.insert((first.cell, 0, first.label), 0);
    let mut f_min = h0;
    let mut bound = focal_bound(omega, f_min as u64) as u32;

    loop {
        let Some(&(_, best)) = focal.first() else {
            return Ok(None);
        };
        let id = best.4;
        let lower = f_min;
        focal.remove(&(nodes[id as usize].conflicts, best));
        open.remove(&best);
        let n = nodes[id as usize];
        live.remove(&(n.cell, n.time, n.label));
        closed.insert((n.cell, n.time, n.label));
        if is_goal(task, cons, &n) {
            return Ok(Some((extract(ctx.map, &nodes, id), lower as usize)));
        }
        tick(ctx, expansions)?;

        for (v, label, h) in successors(ctx, task, cons, n) {
            let key = (v as u32, n.time + 1, label as u16);
            if closed.contains(&key) {
                continue;
            }
            let conflicts = n.conflicts + others.step(n.cell as usize, v, n.time as usize);
            if let Some(&old) = live.get(&key) {
                if nodes[old as usize].conflicts <= conflicts {
                    continue;
                }
                let ok = open_key(&nodes[old as usize], f_of[old as usize], old);
                open.remove(&ok);
                focal.remove(&(nodes[old as usize].conflicts, ok));
            }
            let child = Node {
                cell: v as u32,
                time: n.time + 1,
                label: label as u16,
                parent: id,
                conflicts,
            };
            let cid = nodes.len() as u32;
            let f = child.time + h;
            nodes.push(child);
            f_of.push(f);
            live.insert(key, cid);
            let k = open_key(&child, f, cid);
            open.insert(k);
            if f <= bound {
                focal.insert((conflicts, k));
            }
        }

        let Some(&(new_min, ..)) = open.first() else {
            return Ok(None);
        };
        if new_min > f_min {
            f_min = new_min;
            let new_bound = focal_bound(omega, f_min as u64) as u32;
            if new_bound > bound {
                let from: OpenKey = (bound + 1, Reverse(u32::MAX), Reverse(u16::MAX), 0, 0);
                for k in open.range((Bound::Included(from), Bound::Unbounded)) {
                    if k.0 > new_bound {
                        break;
                    }
                    focal.insert((nodes[k.4 as usize].conflicts, *k));
                }
                bound = new_bound;
            }
        }
    }
}
