//! Solvers for multi-goal task assignment and path finding on 4-connected
//! grids: agents are matched one-to-one with tasks (ordered goal sequences)
//! and receive collision-free paths, minimizing the sum of finish times.

pub mod assignment;
pub mod budget;
pub mod cli;
pub mod heuristics;
pub mod highlevel;
pub mod iobench;
pub mod mla;
pub mod model;
pub mod oracle;
mod par;
