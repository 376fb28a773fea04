//! High-level search over a forest of constraint trees, one tree per task
//! assignment. Roots are created lazily in assignment-cost order; each
//! expansion splits one collision into two children that each constrain one
//! agent and replan it.
//!
//! Four modes share the machinery:
//! * optimal: OPEN ordered by (cost, #collisions, id);
//! * heuristic: OPEN ordered by (cost + h, #collisions, id) with h from the
//!   CG, DG or WDG heuristic and cardinal-first collision choice;
//! * focal: bounded-suboptimal two-level focal search;
//! * greedy: a single tree for the best assignment only.

mod frontier;
mod node;
mod problem;
mod search;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Instance, Plan};

pub use node::{CtNode, Expansion};
pub use search::ForestSearch;

pub(crate) use problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// CBS-TA with MLA* low level.
    Optimal,
    /// CBS-TA with an admissible high-level heuristic.
    Heuristic,
    /// ECBS-TA: focal search on both levels.
    Focal,
    /// Best assignment followed by plain CBS.
    Greedy,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Optimal => "cbs-ta",
            Algorithm::Heuristic => "cbsh-ta",
            Algorithm::Focal => "ecbs-ta",
            Algorithm::Greedy => "ta-cbs",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "cbs-ta" => Ok(Algorithm::Optimal),
            "cbsh-ta" => Ok(Algorithm::Heuristic),
            "ecbs-ta" => Ok(Algorithm::Focal),
            "ta-cbs" => Ok(Algorithm::Greedy),
            other => Err(ConfigError::UnknownAlgorithm(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeuristicKind {
    None,
    Cg,
    Dg,
    Wdg,
}

impl HeuristicKind {
    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::None => "none",
            HeuristicKind::Cg => "cg",
            HeuristicKind::Dg => "dg",
            HeuristicKind::Wdg => "wdg",
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "none" => Ok(HeuristicKind::None),
            "cg" => Ok(HeuristicKind::Cg),
            "dg" => Ok(HeuristicKind::Dg),
            "wdg" => Ok(HeuristicKind::Wdg),
            other => Err(ConfigError::UnknownHeuristic(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("omega must be ≥ 1, got {0}")]
    Omega(f64),
    #[error("unknown algorithm `{0}` (expected cbs-ta, cbsh-ta, ecbs-ta or ta-cbs)")]
    UnknownAlgorithm(String),
    #[error("unknown heuristic `{0}` (expected none, cg, dg or wdg)")]
    UnknownHeuristic(String),
    #[error("WDG budget fraction must lie in (0, 1], got {0}")]
    BudgetFraction(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mode: Algorithm,
    /// Only consulted in heuristic mode.
    pub heuristic: HeuristicKind,
    /// Suboptimality factor, only consulted in focal mode.
    pub omega: f64,
    pub time_limit: Option<Duration>,
    /// Low-level time horizon; `None` uses [`Instance::default_horizon`].
    pub horizon: Option<usize>,
    pub seed: u64,
    /// Share of the remaining time granted to each pairwise WDG sub-solve.
    pub wdg_budget_fraction: f64,
    /// Compute CG, DG and WDG at every heuristic-mode node and record
    /// whether CG <= DG <= WDG held.
    pub check_dominance: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Algorithm::Optimal,
            heuristic: HeuristicKind::None,
            omega: 1.0,
            time_limit: None,
            horizon: None,
            seed: 0,
            wdg_budget_fraction: 0.1,
            check_dominance: false,
        }
    }
}

impl SolverConfig {
    pub fn optimal() -> Self {
        SolverConfig::default()
    }

    pub fn heuristic(kind: HeuristicKind) -> Self {
        SolverConfig {
            mode: Algorithm::Heuristic,
            heuristic: kind,
            ..SolverConfig::default()
        }
    }

    pub fn focal(omega: f64) -> Self {
        SolverConfig {
            mode: Algorithm::Focal,
            omega,
            ..SolverConfig::default()
        }
    }

    pub fn greedy() -> Self {
        SolverConfig {
            mode: Algorithm::Greedy,
            ..SolverConfig::default()
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.omega.is_nan() || self.omega < 1.0 {
            return Err(ConfigError::Omega(self.omega));
        }
        if !(self.wdg_budget_fraction > 0.0 && self.wdg_budget_fraction <= 1.0) {
            return Err(ConfigError::BudgetFraction(self.wdg_budget_fraction));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Solved,
    Infeasible,
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Solved => "solved",
            Status::Infeasible => "infeasible",
            Status::Timeout => "timeout",
        })
    }
}

/// Why an instance was reported infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Infeasibility {
    /// Two tasks end at the same cell; both agents would have to stay there.
    SharedFinalGoal,
    /// Every bijection uses an unreachable agent-task pair.
    NoFiniteAssignment,
    /// The search space below the configured horizon is exhausted. Exact
    /// only for horizons that reach the theoretical completeness bound.
    HorizonExhausted,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub ct_expanded: u64,
    pub ct_generated: u64,
    pub roots: u64,
    pub ll_expanded: u64,
    pub runtime_s: f64,
    pub horizon: usize,
    /// Focal mode: LB of the best OPEN node when the solution was popped.
    pub lower_bound: Option<u64>,
    pub infeasibility: Option<Infeasibility>,
    /// Heuristic mode: largest cost + h among expanded nodes.
    pub max_expanded_f: Option<u64>,
    /// Focal mode: whether the best LB in OPEN ever decreased.
    pub lb_decreased: bool,
    pub mdds_built: u64,
    pub wdg_subsolves: u64,
    pub dominance_checks: u64,
    pub dominance_violations: u64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    pub solution: Option<Plan>,
    pub stats: SolveStats,
}

/// Runs the configured search on `instance`.
pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveResult, ConfigError> {
    config.validate()?;
    Ok(ForestSearch::new(instance, config.clone()).run())
}
