use std::sync::Arc;
use std::time::Instant;

use rustc_hash::{FxHashMap, FxHashSet};

use super::frontier::{BestFirst, FocalLists, Popped};
use super::{
    Algorithm, CtNode, Expansion, HeuristicKind, Infeasibility, Problem, SolveResult, SolveStats,
    SolverConfig, Status,
};
use crate::assignment::{build_cost_matrix, Assignment, AssignmentEnumerator};
use crate::budget::{Deadline, Interrupted};
use crate::heuristics::{CollisionClass, HeuristicEngine};
use crate::mla::Constraint;
use crate::model::{find_collisions, CollisionKind, Instance, Path, Plan};

enum RootSource {
    Enumerate(AssignmentEnumerator),
    /// One fixed assignment, possibly with initial constraints.
    Single(Option<(Assignment, Vec<Constraint>)>),
}

impl RootSource {
    fn next(&mut self) -> Option<(Assignment, Vec<Constraint>)> {
        match self {
            RootSource::Enumerate(e) => e.next_assignment().map(|a| (a, Vec::new())),
            RootSource::Single(s) => s.take(),
        }
    }

    fn peek_cost(&self) -> Option<u64> {
        match self {
            RootSource::Enumerate(e) => e.peek_cost(),
            RootSource::Single(s) => s.as_ref().map(|(a, _)| a.cost),
        }
    }
}

enum Frontier {
    Best(BestFirst),
    Focal(FocalLists),
}

/// A constraint-forest search in progress. [`ForestSearch::run`] drives it
/// to completion; [`ForestSearch::next_node`] and [`ForestSearch::expand`]
/// expose single steps.
pub struct ForestSearch<'a> {
    problem: Problem<'a>,
    config: SolverConfig,
    heuristic: HeuristicKind,
    deadline: Deadline,
    source: RootSource,
    frontier: Frontier,
    open: FxHashMap<usize, CtNode>,
    next_id: usize,
    latest_root: Option<usize>,
    engine: HeuristicEngine,
    stats: SolveStats,
    precheck: Option<Infeasibility>,
    started: bool,
    best_lb: Option<usize>,
    expansion_cap: Option<u64>,
}

impl<'a> ForestSearch<'a> {
    /// The configuration is taken as is; [`super::solve`] validates it first.
    pub fn new(instance: &'a Instance, config: SolverConfig) -> Self {
        let horizon = config.horizon.unwrap_or_else(|| instance.default_horizon());
        let problem = Problem::from_instance(instance, horizon);
        let mut enumerator = AssignmentEnumerator::new(build_cost_matrix(instance, &problem.table));
        let source = match config.mode {
            Algorithm::Greedy => {
                RootSource::Single(enumerator.next_assignment().map(|a| (a, Vec::new())))
            }
            _ => RootSource::Enumerate(enumerator),
        };
        let mut finals = FxHashSet::default();
        let shared = instance
            .tasks()
            .iter()
            .any(|t| !finals.insert(t.final_goal()));
        let precheck = if shared {
            Some(Infeasibility::SharedFinalGoal)
        } else if source.peek_cost().is_none() {
            Some(Infeasibility::NoFiniteAssignment)
        } else {
            None
        };
        let deadline = Deadline::after(config.time_limit);
        Self::build(problem, config, source, deadline, precheck)
    }

    /// Optimal two-agent search with a fixed assignment, used for WDG edge
    /// weights.
    pub(crate) fn pair_solver(
        problem: Problem<'a>,
        assignment: Assignment,
        constraints: Vec<Constraint>,
        deadline: Deadline,
        cap: u64,
    ) -> Self {
        let source = RootSource::Single(Some((assignment, constraints)));
        let mut search = Self::build(problem, SolverConfig::optimal(), source, deadline, None);
        search.expansion_cap = Some(cap);
        search
    }

    fn build(
        problem: Problem<'a>,
        config: SolverConfig,
        source: RootSource,
        deadline: Deadline,
        precheck: Option<Infeasibility>,
    ) -> Self {
        let heuristic = match config.mode {
            Algorithm::Heuristic => config.heuristic,
            _ => HeuristicKind::None,
        };
        let frontier = match config.mode {
            Algorithm::Focal => Frontier::Focal(FocalLists::new(config.omega)),
            _ => Frontier::Best(BestFirst::default()),
        };
        let stats = SolveStats {
            horizon: problem.horizon,
            ..SolveStats::default()
        };
        ForestSearch {
            problem,
            config,
            heuristic,
            deadline,
            source,
            frontier,
            open: FxHashMap::default(),
            next_id: 0,
            latest_root: None,
            engine: HeuristicEngine::default(),
            stats,
            precheck,
            started: false,
            best_lb: None,
            expansion_cap: None,
        }
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    fn focal(&self) -> bool {
        self.config.mode == Algorithm::Focal
    }

    /// Pops the next node to expand, creating the first root on the first
    /// call. `None` when the search space is exhausted.
    pub fn next_node(&mut self) -> Result<Option<CtNode>, Interrupted> {
        if !self.started {
            self.started = true;
            if self.precheck.is_some() {
                return Ok(None);
            }
            self.spawn_root()?;
        }
        loop {
            match &mut self.frontier {
                Frontier::Best(open) => match open.pop() {
                    None => return Ok(None),
                    Some(Popped::Node(id)) => {
                        let node = self.open.remove(&id).expect("queued node");
                        let f = node.f_val() as u64;
                        self.stats.max_expanded_f =
                            Some(self.stats.max_expanded_f.map_or(f, |m| m.max(f)));
                        return Ok(Some(node));
                    }
                    Some(Popped::SpawnMarker(id)) => {
                        if self.latest_root == Some(id) {
                            self.spawn_root()?;
                        }
                    }
                },
                Frontier::Focal(lists) => {
                    let Some((id, best)) = lists.pop() else {
                        return Ok(None);
                    };
                    if self.best_lb.is_some_and(|prev| best < prev) {
                        self.stats.lb_decreased = true;
                    }
                    self.best_lb = Some(best);
                    return Ok(Some(self.open.remove(&id).expect("queued node")));
                }
            }
        }
    }

    /// Splits the chosen collision of `node` into two children and, when
    /// `node` is the latest root, creates the next root.
    pub fn expand(&mut self, node: &CtNode) -> Result<Expansion, Interrupted> {
        assert!(
            !node.collisions.is_empty(),
            "expanding a collision-free node"
        );
        self.stats.ct_expanded += 1;
        let new_root = if node.root && self.latest_root == Some(node.id) {
            self.spawn_root()?
        } else {
            None
        };
        let collision = self.choose_collision(node);
        let (first, second, t) = (collision.first, collision.second, collision.time);
        let split = match collision.kind {
            CollisionKind::Vertex { at } => [
                Constraint::vertex(first, at, t),
                Constraint::vertex(second, at, t),
            ],
            CollisionKind::Edge { from, to } => [
                Constraint::edge(first, from, to, t),
                Constraint::edge(second, to, from, t),
            ],
        };
        let mut children = Vec::with_capacity(2);
        let mut pruned = 0;
        for c in split {
            let agent = c.agent;
            let mut constraints = node.constraints.clone();
            constraints.push(c);
            let cons = self.problem.constraint_set(agent, &constraints);
            let task = node.task_of(agent);
            let mut lower_bounds = node.lower_bounds.clone();
            let path = if self.focal() {
                let others: Vec<&Path> = node
                    .paths
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != agent)
                    .map(|(_, p)| p.as_ref())
                    .collect();
                self.problem
                    .plan_focal(
                        agent,
                        task,
                        &cons,
                        self.config.omega,
                        &others,
                        self.deadline,
                        &mut self.stats.ll_expanded,
                    )?
                    .map(|(p, lb)| {
                        lower_bounds[agent] = lower_bounds[agent].max(lb);
                        p
                    })
            } else {
                self.problem.plan(
                    agent,
                    task,
                    &cons,
                    self.deadline,
                    &mut self.stats.ll_expanded,
                )?
            };
            let Some(path) = path else {
                pruned += 1;
                continue;
            };
            let mut paths = node.paths.clone();
            paths[agent] = Arc::new(path);
            let child = self.make_node(
                false,
                Arc::clone(&node.assignment),
                constraints,
                paths,
                lower_bounds,
            );
            self.push(&child);
            children.push(child);
        }
        Ok(Expansion {
            collision,
            children,
            new_root,
            pruned,
        })
    }

    fn choose_collision(&mut self, node: &CtNode) -> crate::model::Collision {
        if self.heuristic == HeuristicKind::None || node.collisions.len() == 1 {
            return node.collisions[0];
        }
        let classes = self.engine.classify_all(&self.problem, node);
        let best = (0..classes.len())
            .min_by_key(|&i| (classes[i], i))
            .expect("non-empty");
        node.collisions[best]
    }

    /// Class of every collision of `node`, in its collision order.
    pub fn classify(&mut self, node: &CtNode) -> Vec<CollisionClass> {
        self.engine.classify_all(&self.problem, node)
    }

    /// Heuristic value of `node` under `kind`, independent of the mode this
    /// search runs in.
    pub fn node_heuristic(&mut self, node: &CtNode, kind: HeuristicKind) -> usize {
        self.engine.evaluate(
            &self.problem,
            node,
            kind,
            self.deadline,
            self.config.wdg_budget_fraction,
        )
    }

    /// Creates roots from the next assignments until one has a path for
    /// every agent.
    fn spawn_root(&mut self) -> Result<Option<CtNode>, Interrupted> {
        while let Some((assignment, constraints)) = self.source.next() {
            let m = self.problem.num_agents();
            let mut paths: Vec<Arc<Path>> = Vec::with_capacity(m);
            let mut lower_bounds = Vec::with_capacity(m);
            for agent in 0..m {
                let task = assignment.permutation[agent];
                let cons = self.problem.constraint_set(agent, &constraints);
                let planned = if self.focal() {
                    let others: Vec<&Path> = paths.iter().map(|p| p.as_ref()).collect();
                    self.problem.plan_focal(
                        agent,
                        task,
                        &cons,
                        self.config.omega,
                        &others,
                        self.deadline,
                        &mut self.stats.ll_expanded,
                    )?
                } else {
                    self.problem
                        .plan(
                            agent,
                            task,
                            &cons,
                            self.deadline,
                            &mut self.stats.ll_expanded,
                        )?
                        .map(|p| {
                            let cost = p.finish_time;
                            (p, cost)
                        })
                };
                let Some((path, lb)) = planned else {
                    break;
                };
                paths.push(Arc::new(path));
                lower_bounds.push(lb);
            }
            if paths.len() < m {
                continue;
            }
            let root = self.make_node(true, Arc::new(assignment), constraints, paths, lower_bounds);
            self.stats.roots += 1;
            self.latest_root = Some(root.id);
            self.push(&root);
            if self.heuristic != HeuristicKind::None {
                // A root's f may exceed the cost of the next assignment, so
                // the next root must appear once OPEN reaches that cost.
                if let (Frontier::Best(open), Some(next)) =
                    (&mut self.frontier, self.source.peek_cost())
                {
                    open.push_marker(next as usize, root.id);
                }
            }
            return Ok(Some(root));
        }
        Ok(None)
    }

    fn make_node(
        &mut self,
        root: bool,
        assignment: Arc<Assignment>,
        constraints: Vec<Constraint>,
        paths: Vec<Arc<Path>>,
        lower_bounds: Vec<usize>,
    ) -> CtNode {
        let id = self.next_id;
        self.next_id += 1;
        self.stats.ct_generated += 1;
        let cost = paths.iter().map(|p| p.finish_time).sum();
        let collisions = find_collisions(&paths.iter().map(|p| p.as_ref()).collect::<Vec<_>>());
        let lb = lower_bounds.iter().sum();
        let mut node = CtNode {
            id,
            root,
            assignment,
            constraints,
            paths,
            cost,
            collisions,
            h_val: 0,
            lower_bounds,
            lb,
        };
        if self.heuristic != HeuristicKind::None && !node.collisions.is_empty() {
            node.h_val = if self.config.check_dominance {
                let cg = self.node_heuristic(&node, HeuristicKind::Cg);
                let dg = self.node_heuristic(&node, HeuristicKind::Dg);
                let wdg = self.node_heuristic(&node, HeuristicKind::Wdg);
                self.stats.dominance_checks += 1;
                if !(cg <= dg && dg <= wdg) {
                    self.stats.dominance_violations += 1;
                }
                match self.heuristic {
                    HeuristicKind::Cg => cg,
                    HeuristicKind::Dg => dg,
                    _ => wdg,
                }
            } else {
                self.node_heuristic(&node, self.heuristic)
            };
        }
        node
    }

    fn push(&mut self, node: &CtNode) {
        match &mut self.frontier {
            Frontier::Best(open) => open.push(node.f_val(), node.num_collisions(), node.id),
            Frontier::Focal(lists) => {
                lists.push(node.lb, node.cost, node.num_collisions(), node.id)
            }
        }
        self.open.insert(node.id, node.clone());
    }

    /// Runs to a solution, proof of infeasibility, or timeout.
    pub fn run(mut self) -> SolveResult {
        let clock = Instant::now();
        let (status, solution) = match self.search() {
            Ok(found) => found,
            Err(Interrupted) => (Status::Timeout, None),
        };
        self.stats.runtime_s = clock.elapsed().as_secs_f64();
        self.stats.mdds_built = self.engine.mdds_built;
        self.stats.wdg_subsolves = self.engine.wdg_subsolves;
        self.stats.ll_expanded += self.engine.ll_expanded;
        SolveResult {
            status,
            solution,
            stats: self.stats,
        }
    }

    fn search(&mut self) -> Result<(Status, Option<Plan>), Interrupted> {
        loop {
            self.deadline.check()?;
            if self
                .expansion_cap
                .is_some_and(|cap| self.stats.ct_expanded >= cap)
            {
                return Err(Interrupted);
            }
            let Some(node) = self.next_node()? else {
                self.stats.infeasibility =
                    Some(self.precheck.unwrap_or(Infeasibility::HorizonExhausted));
                return Ok((Status::Infeasible, None));
            };
            if node.collisions.is_empty() {
                if self.focal() {
                    self.stats.lower_bound = self.best_lb.map(|b| b as u64);
                }
                let paths = node.paths.iter().map(|p| Path::clone(p)).collect();
                let plan = Plan::new(node.assignment.permutation.clone(), paths);
                return Ok((Status::Solved, Some(plan)));
            }
            self.expand(&node)?;
        }
    }

    /// Optimal cost and low-level expansions of a pair sub-solve; `None`
    /// when it gave up or found nothing.
    pub(crate) fn optimal_cost(self) -> (Option<usize>, u64) {
        let result = self.run();
        let cost = match result.status {
            Status::Solved => result.solution.map(|p| p.flowtime),
            _ => None,
        };
        (cost, result.stats.ll_expanded)
    }
}
