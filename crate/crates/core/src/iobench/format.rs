use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    validate_solution, GridMap, Instance, Location, ModelError, Path, Plan, Task, ValidationReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Model { line: usize, source: ModelError },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines are required to be free of trailing whitespace; the
/// returned numbers are 1-based.
fn lines(text: &str) -> Result<Vec<(usize, &str)>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw != raw.trim_end() {
            return Err(syntax(i + 1, "trailing whitespace"));
        }
        out.push((i + 1, raw));
    }
    Ok(out)
}

fn header_value(line: Option<&(usize, &str)>, key: &str, at: usize) -> Result<usize, ParseError> {
    let &(n, text) = line.ok_or_else(|| syntax(at, format!("missing `{key}` line")))?;
    let rest = text
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| syntax(n, format!("expected `{key} <n>`")))?;
    rest.parse()
        .map_err(|_| syntax(n, format!("bad {key} `{rest}`")))
}

/// Parses the octile grid format: `type octile`, `height H`, `width W`,
/// `map`, then H rows over `.` (free), `@` and `T` (blocked).
pub fn parse_map(text: &str) -> Result<GridMap, ParseError> {
    let lines = lines(text)?;
    let mut it = lines.iter();
    match it.next() {
        Some(&(_, "type octile")) => {}
        Some(&(n, _)) => return Err(syntax(n, "expected `type octile`")),
        None => return Err(syntax(1, "empty map file")),
    }
    let height = header_value(it.next(), "height", 2)?;
    let width = header_value(it.next(), "width", 3)?;
    match it.next() {
        Some(&(_, "map")) => {}
        Some(&(n, _)) => return Err(syntax(n, "expected `map`")),
        None => return Err(syntax(4, "missing `map` line")),
    }
    let mut blocked = Vec::with_capacity(height * width);
    for r in 0..height {
        let &(n, row) = it
            .next()
            .ok_or_else(|| syntax(5 + r, format!("expected {height} map rows, got {r}")))?;
        let glyphs: Vec<char> = row.chars().collect();
        if glyphs.len() != width {
            return Err(syntax(
                n,
                format!("row has {} cells, expected {width}", glyphs.len()),
            ));
        }
        for g in glyphs {
            blocked.push(match g {
                '.' => false,
                '@' | 'T' => true,
                other => return Err(syntax(n, format!("unknown glyph `{other}`"))),
            });
        }
    }
    if let Some(&(n, _)) = it.find(|(_, l)| !l.is_empty()) {
        return Err(syntax(n, "unexpected content after map rows"));
    }
    GridMap::new(height, width, blocked).map_err(|source| ParseError::Model { line: 2, source })
}

/// Canonical map text; blocked cells are written as `@`.
pub fn write_map(map: &GridMap) -> String {
    let mut out = format!(
        "type octile\nheight {}\nwidth {}\nmap\n",
        map.height(),
        map.width()
    );
    for r in 0..map.height() {
        for c in 0..map.width() {
            let free = map.is_free(Location::new(r as u32, c as u32));
            out.push(if free { '.' } else { '@' });
        }
        out.push('\n');
    }
    out
}

fn numbers(n: usize, fields: &[&str]) -> Result<Vec<usize>, ParseError> {
    fields
        .iter()
        .map(|f| {
            f.parse()
                .map_err(|_| syntax(n, format!("bad number `{f}`")))
        })
        .collect()
}

fn located(
    map: &GridMap,
    n: usize,
    what: &str,
    r: usize,
    c: usize,
) -> Result<Location, ParseError> {
    let loc = Location::new(r as u32, c as u32);
    if !map.contains(loc) {
        return Err(syntax(n, format!("{what} {loc} outside the map")));
    }
    if !map.is_free(loc) {
        return Err(syntax(n, format!("blocked {what} {loc}")));
    }
    Ok(loc)
}

/// Parses a scenario against `map`: `agents m`, then `agent i r c` for
/// each agent and `task j K r1 c1 ... rK cK` for each task, in index order.
pub fn parse_scenario(text: &str, map: &GridMap) -> Result<Instance, ParseError> {
    let lines: Vec<(usize, &str)> = lines(text)?
        .into_iter()
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let m = header_value(lines.first(), "agents", 1)?;
    if m == 0 {
        return Err(syntax(lines[0].0, "m ≥ 1 required"));
    }
    if lines.len() != 1 + 2 * m {
        return Err(syntax(
            lines.last().map_or(1, |l| l.0),
            format!(
                "expected {} agent and task lines, got {}",
                2 * m,
                lines.len() - 1
            ),
        ));
    }
    let mut starts = Vec::with_capacity(m);
    for (i, &(n, line)) in lines[1..=m].iter().enumerate() {
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() != 4 || fields[0] != "agent" {
            return Err(syntax(n, "expected `agent <i> <row> <col>`"));
        }
        let v = numbers(n, &fields[1..])?;
        if v[0] != i {
            return Err(syntax(n, format!("expected agent {i}, got {}", v[0])));
        }
        let loc = located(map, n, "start", v[1], v[2])?;
        if let Some(j) = starts.iter().position(|&s| s == loc) {
            return Err(syntax(n, format!("duplicate start {loc} (agent {j})")));
        }
        starts.push(loc);
    }
    let mut tasks = Vec::with_capacity(m);
    for (j, &(n, line)) in lines[m + 1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() < 3 || fields[0] != "task" {
            return Err(syntax(n, "expected `task <j> <K> <r1> <c1> ...`"));
        }
        let v = numbers(n, &fields[1..])?;
        if v[0] != j {
            return Err(syntax(n, format!("expected task {j}, got {}", v[0])));
        }
        let k = v[1];
        if k == 0 || v.len() != 2 + 2 * k {
            return Err(syntax(
                n,
                format!(
                    "task {j} declares {k} goals but lists {} numbers",
                    v.len() - 2
                ),
            ));
        }
        let goals = v[2..]
            .chunks(2)
            .map(|rc| located(map, n, "goal", rc[0], rc[1]))
            .collect::<Result<Vec<_>, _>>()?;
        tasks.push(Task::new(goals).map_err(|source| ParseError::Model { line: n, source })?);
    }
    Instance::new(map.clone(), starts, tasks)
        .map_err(|source| ParseError::Model { line: 1, source })
}

pub fn write_scenario(instance: &Instance) -> String {
    let mut out = format!("agents {}\n", instance.num_agents());
    for (i, s) in instance.starts().iter().enumerate() {
        writeln!(out, "agent {i} {} {}", s.row, s.col).unwrap();
    }
    for (j, t) in instance.tasks().iter().enumerate() {
        write!(out, "task {j} {}", t.len()).unwrap();
        for g in t.goals() {
            write!(out, " {} {}", g.row, g.col).unwrap();
        }
        out.push('\n');
    }
    out
}

/// `assignment <agent> <task>` lines, `path <agent> <T> (r,c)...` lines
/// with `T + 1` coordinates, and a final `flowtime <F>` line.
pub fn write_solution(plan: &Plan) -> String {
    let mut out = String::new();
    for (a, t) in plan.assignment.iter().enumerate() {
        writeln!(out, "assignment {a} {t}").unwrap();
    }
    for (a, p) in plan.paths.iter().enumerate() {
        write!(out, "path {a} {} ", p.finish_time).unwrap();
        for t in 0..=p.finish_time {
            write!(out, "{}", p.at(t)).unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "flowtime {}", plan.flowtime).unwrap();
    out
}

/// Inverse of [`write_solution`]. Only the syntax is checked here; whether
/// the plan solves an instance is the validator's business, so the parsed
/// flowtime is kept as written.
pub fn parse_solution(text: &str) -> Result<Plan, ParseError> {
    let mut assignment: Vec<Option<usize>> = Vec::new();
    let mut paths: Vec<Option<Path>> = Vec::new();
    let mut flowtime = None;
    for (n, line) in lines(text)? {
        if line.is_empty() {
            continue;
        }
        if flowtime.is_some() {
            return Err(syntax(n, "content after `flowtime` line"));
        }
        let (kind, rest) = line
            .split_once(' ')
            .ok_or_else(|| syntax(n, "unknown line"))?;
        match kind {
            "assignment" => {
                let v = numbers(n, &rest.split(' ').collect::<Vec<_>>())?;
                let [a, t] = v[..] else {
                    return Err(syntax(n, "expected `assignment <agent> <task>`"));
                };
                put(&mut assignment, a, t, n, "assignment")?;
            }
            "path" => {
                let mut parts = rest.splitn(3, ' ');
                let a = parse_num(n, parts.next())?;
                let finish = parse_num(n, parts.next())?;
                let coords = parse_coords(n, parts.next().unwrap_or(""))?;
                if coords.len() != finish + 1 {
                    return Err(syntax(
                        n,
                        format!(
                            "path lists {} locations, expected {}",
                            coords.len(),
                            finish + 1
                        ),
                    ));
                }
                put(&mut paths, a, Path::new(coords), n, "path")?;
            }
            "flowtime" => flowtime = Some(parse_num(n, Some(rest))?),
            other => return Err(syntax(n, format!("unknown line kind `{other}`"))),
        }
    }
    let flowtime = flowtime.ok_or_else(|| syntax(0, "missing `flowtime` line"))?;
    let assignment = complete(assignment, "assignment")?;
    let paths = complete(paths, "path")?;
    Ok(Plan {
        assignment,
        paths,
        flowtime,
    })
}

/// Parses and validates a solution file; unparsable text yields a report
/// with a single malformed-solution defect.
pub fn validate_solution_text(instance: &Instance, text: &str) -> ValidationReport {
    match parse_solution(text) {
        Ok(plan) => validate_solution(instance, &plan),
        Err(e) => ValidationReport::malformed(e.to_string()),
    }
}

fn parse_num(n: usize, field: Option<&str>) -> Result<usize, ParseError> {
    let f = field.ok_or_else(|| syntax(n, "missing number"))?;
    f.parse()
        .map_err(|_| syntax(n, format!("bad number `{f}`")))
}

fn parse_coords(n: usize, text: &str) -> Result<Vec<Location>, ParseError> {
    let body = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| syntax(n, "expected `(r,c)` coordinates"))?;
    body.split(")(")
        .map(|pair| {
            let (r, c) = pair
                .split_once(',')
                .ok_or_else(|| syntax(n, format!("bad coordinate `{pair}`")))?;
            Ok(Location::new(
                parse_num(n, Some(r))? as u32,
                parse_num(n, Some(c))? as u32,
            ))
        })
        .collect()
}

fn put<T>(
    slots: &mut Vec<Option<T>>,
    idx: usize,
    value: T,
    n: usize,
    what: &str,
) -> Result<(), ParseError> {
    if idx >= 1 << 16 {
        return Err(syntax(n, format!("{what} index {idx} too large")));
    }
    if slots.len() <= idx {
        slots.resize_with(idx + 1, || None);
    }
    if slots[idx].is_some() {
        return Err(syntax(n, format!("duplicate {what} for agent {idx}")));
    }
    slots[idx] = Some(value);
    Ok(())
}

fn complete<T>(slots: Vec<Option<T>>, what: &str) -> Result<Vec<T>, ParseError> {
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| syntax(0, format!("missing {what} for agent {i}"))))
        .collect()
}
