use std::fmt;

use super::{find_collisions, CollisionKind, Instance, Location, Path, Plan, Task};

/// Category of a plan defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DefectKind {
    /// The solution text could not be parsed at all.
    Malformed,
    PathCount,
    Assignment,
    InvalidLocation,
    StartMismatch,
    IllegalStep,
    GoalSequence,
    FinishTime,
    VertexCollision,
    EdgeCollision,
    Flowtime,
}

impl fmt::Display for DefectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DefectKind::Malformed => "malformed solution",
            DefectKind::PathCount => "wrong number of paths",
            DefectKind::Assignment => "assignment not a bijection",
            DefectKind::InvalidLocation => "invalid location",
            DefectKind::StartMismatch => "start mismatch",
            DefectKind::IllegalStep => "illegal step",
            DefectKind::GoalSequence => "goal sequence violated",
            DefectKind::FinishTime => "finish time not minimal or not terminal",
            DefectKind::VertexCollision => "vertex collision",
            DefectKind::EdgeCollision => "edge collision",
            DefectKind::Flowtime => "flowtime mismatch",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub kind: DefectKind,
    pub agent: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.agent {
            Some(a) => write!(f, "{} (agent {}): {}", self.kind, a, self.detail),
            None => write!(f, "{}: {}", self.kind, self.detail),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub defects: Vec<Defect>,
    /// Sum of finish times recomputed from the location sequences, when every
    /// path could be evaluated.
    pub recomputed_flowtime: Option<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn has(&self, kind: DefectKind) -> bool {
        self.defects.iter().any(|d| d.kind == kind)
    }

    pub fn malformed(detail: impl Into<String>) -> Self {
        ValidationReport {
            defects: vec![Defect {
                kind: DefectKind::Malformed,
                agent: None,
                detail: detail.into(),
            }],
            recomputed_flowtime: None,
        }
    }

    fn push(&mut self, kind: DefectKind, agent: Option<usize>, detail: String) {
        self.defects.push(Defect {
            kind,
            agent,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        writeln!(f, "invalid: {} defect(s)", self.defects.len())?;
        for d in &self.defects {
            writeln!(f, "  {d}")?;
        }
        Ok(())
    }
}

/// Checks a plan against the instance and reports every violated rule.
pub fn validate_solution(instance: &Instance, plan: &Plan) -> ValidationReport {
    let mut report = ValidationReport::default();
    let m = instance.num_agents();
    let map = instance.map();

    let mut seen = vec![false; m];
    let mut assignment_ok = plan.assignment.len() == m;
    for (agent, &task) in plan.assignment.iter().enumerate() {
        if task >= m || std::mem::replace(&mut seen[task], true) {
            assignment_ok = false;
            report.push(
                DefectKind::Assignment,
                Some(agent),
                format!("task {task} is out of range or assigned twice"),
            );
        }
    }
    if plan.assignment.len() != m {
        report.push(
            DefectKind::Assignment,
            None,
            format!(
                "{} assignment entries for {m} agents",
                plan.assignment.len()
            ),
        );
    }
    if plan.paths.len() != m {
        report.push(
            DefectKind::PathCount,
            None,
            format!("{} paths for {m} agents", plan.paths.len()),
        );
        return report;
    }

    let mut finish_sum = Some(0usize);
    let mut paths_sane = true;
    for (agent, path) in plan.paths.iter().enumerate() {
        if path.locations.is_empty() {
            report.push(DefectKind::IllegalStep, Some(agent), "empty path".into());
            finish_sum = None;
            paths_sane = false;
            continue;
        }
        let mut locations_ok = true;
        for (t, &l) in path.locations.iter().enumerate() {
            if !map.is_free(l) {
                report.push(
                    DefectKind::InvalidLocation,
                    Some(agent),
                    format!("{l} at t={t} is blocked or off the map"),
                );
                locations_ok = false;
            }
        }
        if path.locations[0] != instance.starts()[agent] {
            report.push(
                DefectKind::StartMismatch,
                Some(agent),
                format!(
                    "path starts at {} instead of {}",
                    path.locations[0],
                    instance.starts()[agent]
                ),
            );
        }
        for (t, w) in path.locations.windows(2).enumerate() {
            if w[0].manhattan(w[1]) > 1 {
                report.push(
                    DefectKind::IllegalStep,
                    Some(agent),
                    format!("jump {} -> {} at t={t}", w[0], w[1]),
                );
            }
        }
        if !locations_ok {
            paths_sane = false;
        }
        let task = match plan.assignment.get(agent) {
            Some(&j) if assignment_ok => &instance.tasks()[j],
            _ => {
                finish_sum = None;
                continue;
            }
        };
        match label_finish_time(path, task) {
            Ok(finish) => {
                if finish != path.finish_time {
                    report.push(
                        DefectKind::FinishTime,
                        Some(agent),
                        format!(
                            "claimed {} but the path finishes at {finish}",
                            path.finish_time
                        ),
                    );
                }
                finish_sum = finish_sum.map(|s| s + finish);
            }
            Err(kind) => {
                let detail = match kind {
                    DefectKind::GoalSequence => "goals not visited in order".to_string(),
                    _ => format!("path does not end at final goal {}", task.final_goal()),
                };
                report.push(kind, Some(agent), detail);
                finish_sum = None;
            }
        }
    }

    if paths_sane {
        for c in find_collisions(&plan.paths) {
            let kind = match c.kind {
                CollisionKind::Vertex { .. } => DefectKind::VertexCollision,
                CollisionKind::Edge { .. } => DefectKind::EdgeCollision,
            };
            report.push(kind, None, c.to_string());
        }
    }

    report.recomputed_flowtime = finish_sum;
    let claimed: usize = plan.paths.iter().map(|p| p.finish_time).sum();
    match finish_sum {
        Some(f) if f != plan.flowtime => report.push(
            DefectKind::Flowtime,
            None,
            format!("reported {} but paths sum to {f}", plan.flowtime),
        ),
        None if claimed != plan.flowtime => report.push(
            DefectKind::Flowtime,
            None,
            format!(
                "reported {} but finish times sum to {claimed}",
                plan.flowtime
            ),
        ),
        _ => {}
    }
    report
}

/// Finish time implied by the location sequence: the next goal is ticked off
/// on arrival (at most one per timestep, arrival at t=0 included), and the
/// path is finished from the first time after the last goal at which it
/// stays on the final goal through the end of the stored prefix.
fn label_finish_time(path: &Path, task: &Task) -> Result<usize, DefectKind> {
    let goals = task.goals();
    let mut next = 0usize;
    let mut done_at = None;
    for (t, &l) in path.locations.iter().enumerate() {
        if next < goals.len() && l == goals[next] {
            next += 1;
            if next == goals.len() {
                done_at = Some(t);
                break;
            }
        }
    }
    let done_at = done_at.ok_or(DefectKind::GoalSequence)?;
    let last: Location = task.final_goal();
    if *path.locations.last().expect("non-empty") != last {
        return Err(DefectKind::FinishTime);
    }
    let mut finish = path.locations.len() - 1;
    while finish > done_at && path.locations[finish - 1] == last {
        finish -= 1;
    }
    Ok(finish)
}
