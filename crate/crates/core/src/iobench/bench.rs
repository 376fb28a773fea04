use std::collections::BTreeSet;
use std::path::{Path as FsPath, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use crate::highlevel::{solve, Algorithm, ConfigError, HeuristicKind, SolverConfig, Status};
use crate::model::{GridMap, Instance};
use crate::par;

use super::format::{parse_map, ParseError};
use super::generate::{generate_instance, GenError};
use super::maps::builtin_map;

pub const CSV_HEADER: [&str; 12] = [
    "instance",
    "algo",
    "heuristic",
    "omega",
    "status",
    "flowtime",
    "makespan",
    "ct_expanded",
    "roots",
    "ll_expanded",
    "runtime_s",
    "lower_bound",
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("sweep config: {0}")]
    Config(#[from] toml::de::Error),
    #[error("unknown map `{0}` (not built in and not a readable file)")]
    UnknownMap(String),
    #[error("map `{0}`: {1}")]
    Map(String, ParseError),
    #[error("{0}")]
    Solver(#[from] ConfigError),
    #[error("instance {0}: {1}")]
    Generation(String, GenError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {0}: {1}")]
    BadRow(usize, String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    /// Seeds `0..n`.
    Count(u64),
    List(Vec<u64>),
}

impl Seeds {
    fn list(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

/// One block of a sweep: an instance family and the solver
/// configurations run on every instance of it.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCell {
    /// Built-in map name or path to a map file.
    pub map: String,
    pub agents: usize,
    pub kmin: usize,
    pub kmax: usize,
    pub seeds: Seeds,
    pub algos: Vec<String>,
    #[serde(default = "default_heuristics")]
    pub heuristics: Vec<String>,
    #[serde(default = "default_omegas")]
    pub omegas: Vec<f64>,
    pub time_limit_s: f64,
}

fn default_heuristics() -> Vec<String> {
    vec!["none".to_string()]
}

fn default_omegas() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "cell")]
    pub cells: Vec<SweepCell>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        Ok(toml::from_str(text)?)
    }
}

/// Values are kept as `f64` so that raw rows and aggregate means share one
/// type; raw counts are integral and print without a fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub instance: String,
    pub algo: String,
    pub heuristic: String,
    pub omega: f64,
    pub status: String,
    pub flowtime: Option<f64>,
    pub makespan: Option<f64>,
    pub ct_expanded: Option<f64>,
    pub roots: Option<f64>,
    pub ll_expanded: Option<f64>,
    pub runtime_s: Option<f64>,
    pub lower_bound: Option<f64>,
}

impl BenchmarkRow {
    pub fn is_aggregate(&self) -> bool {
        self.status.starts_with("success:")
    }

    fn record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.instance.clone(),
            self.algo.clone(),
            self.heuristic.clone(),
            self.omega.to_string(),
            self.status.clone(),
            opt(self.flowtime),
            opt(self.makespan),
            opt(self.ct_expanded),
            opt(self.roots),
            opt(self.ll_expanded),
            opt(self.runtime_s),
            opt(self.lower_bound),
        ]
    }

    fn from_record(line: usize, rec: &csv::StringRecord) -> Result<Self, BenchError> {
        let bad = |msg: String| BenchError::BadRow(line, msg);
        if rec.len() != CSV_HEADER.len() {
            return Err(bad(format!("{} fields", rec.len())));
        }
        let num = |i: usize| -> Result<f64, BenchError> {
            rec[i]
                .parse()
                .map_err(|_| bad(format!("bad {} `{}`", CSV_HEADER[i], &rec[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>, BenchError> {
            if rec[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        Ok(BenchmarkRow {
            instance: rec[0].to_string(),
            algo: rec[1].to_string(),
            heuristic: rec[2].to_string(),
            omega: num(3)?,
            status: rec[4].to_string(),
            flowtime: opt(5)?,
            makespan: opt(6)?,
            ct_expanded: opt(7)?,
            roots: opt(8)?,
            ll_expanded: opt(9)?,
            runtime_s: opt(10)?,
            lower_bound: opt(11)?,
        })
    }
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchmarkRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchmarkRow>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(BenchError::BadRow(1, "unexpected header".to_string()));
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| BenchmarkRow::from_record(i + 2, &rec?))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
struct RunConfig {
    algo: Algorithm,
    heuristic: HeuristicKind,
    omega: f64,
}

impl RunConfig {
    fn solver(&self, time_limit: Duration) -> SolverConfig {
        SolverConfig {
            mode: self.algo,
            heuristic: self.heuristic,
            omega: self.omega,
            time_limit: Some(time_limit),
            ..SolverConfig::default()
        }
    }
}

/// Heuristics only vary for `cbsh-ta` and omegas only for `ecbs-ta`; the
/// other algorithms run once per instance.
fn expand_configs(cell: &SweepCell) -> Result<Vec<RunConfig>, BenchError> {
    let heuristics = cell
        .heuristics
        .iter()
        .map(|h| h.parse())
        .collect::<Result<Vec<HeuristicKind>, _>>()?;
    let mut out = Vec::new();
    for a in &cell.algos {
        let algo: Algorithm = a.parse()?;
        match algo {
            Algorithm::Heuristic => {
                for &heuristic in &heuristics {
                    out.push(RunConfig {
                        algo,
                        heuristic,
                        omega: 1.0,
                    });
                }
            }
            Algorithm::Focal => {
                for &omega in &cell.omegas {
                    if omega.is_nan() || omega < 1.0 {
                        return Err(ConfigError::Omega(omega).into());
                    }
                    out.push(RunConfig {
                        algo,
                        heuristic: HeuristicKind::None,
                        omega,
                    });
                }
            }
            _ => out.push(RunConfig {
                algo,
                heuristic: HeuristicKind::None,
                omega: 1.0,
            }),
        }
    }
    let mut unique: Vec<RunConfig> = Vec::new();
    for c in out {
        if !unique.contains(&c) {
            unique.push(c);
        }
    }
    Ok(unique)
}

fn load_map(name: &str, base: Option<&FsPath>) -> Result<GridMap, BenchError> {
    if let Some(m) = builtin_map(name) {
        return Ok(m);
    }
    let path = match base {
        Some(b) => b.join(name),
        None => PathBuf::from(name),
    };
    let text =
        std::fs::read_to_string(&path).map_err(|_| BenchError::UnknownMap(name.to_string()))?;
    parse_map(&text).map_err(|e| BenchError::Map(name.to_string(), e))
}

fn family_name(cell: &SweepCell) -> String {
    let map = FsPath::new(&cell.map)
        .file_stem()
        .map_or(cell.map.clone(), |s| s.to_string_lossy().into_owned());
    format!("{map}-m{}-k{}-{}", cell.agents, cell.kmin, cell.kmax)
}

struct Job<'a> {
    instance_id: String,
    instance: &'a Instance,
    config: RunConfig,
    time_limit: Duration,
}

fn run_job(job: &Job<'_>) -> BenchmarkRow {
    let c = &job.config;
    let result = solve(job.instance, &c.solver(job.time_limit)).expect("validated config");
    let stats = &result.stats;
    let solved = result.status == Status::Solved;
    let plan = result.solution.as_ref();
    BenchmarkRow {
        instance: job.instance_id.clone(),
        algo: c.algo.name().to_string(),
        heuristic: c.heuristic.name().to_string(),
        omega: c.omega,
        status: result.status.to_string(),
        flowtime: plan.map(|p| p.flowtime as f64),
        makespan: plan.map(|p| p.makespan() as f64),
        ct_expanded: Some(stats.ct_expanded as f64),
        roots: Some(stats.roots as f64),
        ll_expanded: Some(stats.ll_expanded as f64),
        runtime_s: Some(stats.runtime_s),
        lower_bound: if solved {
            stats.lower_bound.map(|b| b as f64)
        } else {
            None
        },
    }
}

/// Runs every cell of `sweep`. Map paths are resolved against `base`.
/// Raw rows come first in (cell, configuration, seed) order, followed by
/// one aggregate row per (cell, configuration) as computed by [`aggregate`].
pub fn run_benchmark(
    sweep: &SweepConfig,
    base: Option<&FsPath>,
) -> Result<Vec<BenchmarkRow>, BenchError> {
    struct Family {
        ids: Vec<String>,
        instances: Vec<Instance>,
        configs: Vec<RunConfig>,
        time_limit: Duration,
    }
    let mut families = Vec::new();
    for cell in &sweep.cells {
        let map = load_map(&cell.map, base)?;
        let configs = expand_configs(cell)?;
        let name = family_name(cell);
        let mut ids = Vec::new();
        let mut instances = Vec::new();
        for seed in cell.seeds.list() {
            let id = format!("{name}-s{seed}");
            let inst = generate_instance(seed, &map, cell.agents, cell.kmin, cell.kmax)
                .map_err(|e| BenchError::Generation(id.clone(), e))?;
            ids.push(id);
            instances.push(inst);
        }
        let time_limit = Duration::from_secs_f64(cell.time_limit_s.max(0.0));
        families.push(Family {
            ids,
            instances,
            configs,
            time_limit,
        });
    }
    let mut jobs = Vec::new();
    for f in &families {
        for c in &f.configs {
            for (id, inst) in f.ids.iter().zip(&f.instances) {
                jobs.push(Job {
                    instance_id: id.clone(),
                    instance: inst,
                    config: c.clone(),
                    time_limit: f.time_limit,
                });
            }
        }
    }
    let raw = par::map(&jobs, run_job);
    let mut rows = raw.clone();
    rows.extend(aggregate(&raw));
    Ok(rows)
}

/// Family of an instance id: everything before the trailing `-s<seed>`.
fn family_of(instance: &str) -> &str {
    instance.rsplit_once("-s").map_or(instance, |(f, _)| f)
}

/// Aggregate rows for raw rows: one per (family, algo, heuristic, omega) in
/// order of first appearance. Status is `success:k/n`; each mean is taken
/// over the instances of the family that every configuration of that
/// family solved, and is empty when that subset is empty.
pub fn aggregate(raw: &[BenchmarkRow]) -> Vec<BenchmarkRow> {
    let raw: Vec<&BenchmarkRow> = raw.iter().filter(|r| !r.is_aggregate()).collect();
    let mut groups: Vec<(String, String, String, f64)> = Vec::new();
    for r in &raw {
        let key = (
            family_of(&r.instance).to_string(),
            r.algo.clone(),
            r.heuristic.clone(),
            r.omega,
        );
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    let mut out = Vec::new();
    for (family, algo, heuristic, omega) in &groups {
        let in_family: Vec<&&BenchmarkRow> = raw
            .iter()
            .filter(|r| family_of(&r.instance) == family)
            .collect();
        let instances: BTreeSet<&str> = in_family.iter().map(|r| r.instance.as_str()).collect();
        let common: BTreeSet<&str> = instances
            .iter()
            .copied()
            .filter(|i| {
                in_family
                    .iter()
                    .filter(|r| r.instance == *i)
                    .all(|r| r.status == "solved")
            })
            .collect();
        let mine: Vec<&&BenchmarkRow> = in_family
            .iter()
            .copied()
            .filter(|r| r.algo == *algo && r.heuristic == *heuristic && r.omega == *omega)
            .collect();
        let solved = mine.iter().filter(|r| r.status == "solved").count();
        let subset: Vec<&&BenchmarkRow> = mine
            .iter()
            .copied()
            .filter(|r| common.contains(r.instance.as_str()))
            .collect();
        let mean = |f: fn(&BenchmarkRow) -> Option<f64>| -> Option<f64> {
            let vals: Vec<f64> = subset.iter().filter_map(|r| f(r)).collect();
            if vals.is_empty() {
                None
            } else {
                Some(vals.iter().sum::<f64>() / vals.len() as f64)
            }
        };
        out.push(BenchmarkRow {
            instance: format!("{family}-mean"),
            algo: algo.clone(),
            heuristic: heuristic.clone(),
            omega: *omega,
            status: format!("success:{solved}/{}", mine.len()),
            flowtime: mean(|r| r.flowtime),
            makespan: mean(|r| r.makespan),
            ct_expanded: mean(|r| r.ct_expanded),
            roots: mean(|r| r.roots),
            ll_expanded: mean(|r| r.ll_expanded),
            runtime_s: mean(|r| r.runtime_s),
            lower_bound: mean(|r| r.lower_bound),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = r#"
[[cell]]
map = "open5"
agents = 2
kmin = 1
kmax = 2
seeds = 10
algos = ["ecbs-ta"]
omegas = [1.0, 1.05, 1.1, 1.3]
time_limit_s = 10.0
"#;

    #[test]
    fn omega_sweep_row_counts() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("open5"),
            "type octile\nheight 5\nwidth 5\nmap\n.....\n.....\n.....\n.....\n.....\n",
        )
        .unwrap();
        let sweep = SweepConfig::from_toml(SWEEP).unwrap();
        let rows = run_benchmark(&sweep, Some(dir.path())).unwrap();
        assert_eq!(rows.len(), 44);
        assert_eq!(rows.iter().filter(|r| r.is_aggregate()).count(), 4);
        assert!(rows[..40].iter().all(|r| r.status == "solved"));
        assert_eq!(rows[40].instance, "open5-m2-k1-2-mean");
        assert_eq!(rows[40].status, "success:10/10");

        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        let back = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, rows);
        assert_eq!(aggregate(&back), back[40..].to_vec());
    }

    #[test]
    fn config_expansion() {
        let cell: SweepCell = toml::from_str(
            r#"
map = "dense20"
agents = 3
kmin = 2
kmax = 2
seeds = [4, 9]
algos = ["cbs-ta", "cbsh-ta", "ta-cbs", "cbs-ta"]
heuristics = ["none", "wdg"]
omegas = [1.1]
time_limit_s = 1
"#,
        )
        .unwrap();
        let configs = expand_configs(&cell).unwrap();
        assert_eq!(configs.len(), 4);
        assert_eq!(cell.seeds.list(), vec![4, 9]);
        let bad = SweepCell {
            omegas: vec![0.9],
            algos: vec!["ecbs-ta".into()],
            ..cell
        };
        assert!(matches!(
            expand_configs(&bad),
            Err(BenchError::Solver(ConfigError::Omega(_)))
        ));
    }

    #[test]
    fn aggregates_use_commonly_solved_subset() {
        let row = |inst: &str, algo: &str, status: &str, flow: Option<f64>| BenchmarkRow {
            instance: inst.into(),
            algo: algo.into(),
            heuristic: "none".into(),
            omega: 1.0,
            status: status.into(),
            flowtime: flow,
            makespan: flow,
            ct_expanded: Some(1.0),
            roots: Some(1.0),
            ll_expanded: Some(1.0),
            runtime_s: Some(0.5),
            lower_bound: None,
        };
        let raw = vec![
            row("f-s0", "cbs-ta", "solved", Some(10.0)),
            row("f-s1", "cbs-ta", "solved", Some(20.0)),
            row("f-s0", "ta-cbs", "solved", Some(12.0)),
            row("f-s1", "ta-cbs", "timeout", None),
        ];
        let agg = aggregate(&raw);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].status, "success:2/2");
        assert_eq!(agg[0].flowtime, Some(10.0));
        assert_eq!(agg[1].status, "success:1/2");
        assert_eq!(agg[1].flowtime, Some(12.0));
        assert_eq!(agg[1].lower_bound, None);
    }
}
