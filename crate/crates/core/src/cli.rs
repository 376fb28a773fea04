//! Command-line front end. Exit codes: 0 solved or valid, 1 infeasible or
//! invalid, 2 timeout, 3 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::highlevel::{solve, Algorithm, HeuristicKind, SolverConfig, Status};
use crate::iobench::{
    builtin_map, generate_instance, parse_map, parse_scenario, run_benchmark,
    validate_solution_text, write_csv, write_scenario, write_solution, SweepConfig,
};
use crate::model::{GridMap, Instance, Plan};
use crate::oracle::{oracle_solve, OracleLimits};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_TIMEOUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mgtapf",
    version,
    about = "Multi-goal task assignment and path finding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a scenario.
    Solve {
        #[arg(long)]
        /// Map file or built-in map name.
        map: PathBuf,
        #[arg(long)]
        scen: PathBuf,
        /// cbs-ta, cbsh-ta, ecbs-ta or ta-cbs.
        #[arg(long, default_value = "cbs-ta")]
        algo: Algorithm,
        /// none, cg, dg or wdg (cbsh-ta only).
        #[arg(long, default_value = "none")]
        heuristic: HeuristicKind,
        /// Suboptimality factor for ecbs-ta.
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        horizon: Option<usize>,
        /// Solution file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON statistics file.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Check a solution file against a scenario.
    Validate {
        #[arg(long)]
        /// Map file or built-in map name.
        map: PathBuf,
        #[arg(long)]
        scen: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Generate a random scenario.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Built-in map name (dense20, sparse32, empty32) or map file.
        #[arg(long)]
        map: String,
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        kmin: usize,
        #[arg(long)]
        kmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark sweep and write CSV.
    Bench {
        /// TOML sweep description.
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive solve for tiny instances.
    Oracle {
        #[arg(long)]
        /// Map file or built-in map name.
        map: PathBuf,
        #[arg(long)]
        scen: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Input problems reported with exit code 3.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CliResult = Result<i32, UsageError>;

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve {
            map,
            scen,
            algo,
            heuristic,
            omega,
            time_limit,
            horizon,
            out,
            stats,
        } => {
            let config = SolverConfig {
                mode: algo,
                heuristic,
                omega,
                time_limit: time_limit.map(Duration::from_secs_f64),
                horizon,
                ..SolverConfig::default()
            };
            cmd_solve(&map, &scen, &config, out.as_deref(), stats.as_deref())
        }
        Command::Validate {
            map,
            scen,
            solution,
        } => cmd_validate(&map, &scen, &solution),
        Command::Gen {
            seed,
            map,
            agents,
            kmin,
            kmax,
            out,
        } => cmd_gen(seed, &map, agents, kmin, kmax, out.as_deref()),
        Command::Bench { sweep, out } => cmd_bench(&sweep, &out),
        Command::Oracle { map, scen, out } => cmd_oracle(&map, &scen, out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn read(path: &FsPath) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_instance(map: &FsPath, scen: &FsPath) -> Result<Instance, UsageError> {
    let grid = resolve_map(map)?;
    parse_scenario(&read(scen)?, &grid).map_err(|e| UsageError(format!("{}: {e}", scen.display())))
}

fn emit(text: &str, out: Option<&FsPath>) -> Result<(), UsageError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| UsageError(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(
    map: &FsPath,
    scen: &FsPath,
    config: &SolverConfig,
    out: Option<&FsPath>,
    stats: Option<&FsPath>,
) -> CliResult {
    config.validate()?;
    let instance = load_instance(map, scen)?;
    let result = solve(&instance, config)?;
    if let Some(p) = stats {
        let json = serde_json::json!({
            "status": result.status,
            "flowtime": result.solution.as_ref().map(|s| s.flowtime),
            "makespan": result.solution.as_ref().map(Plan::makespan),
            "stats": result.stats,
        });
        emit(&format!("{json:#}\n"), Some(p))?;
    }
    match result.status {
        Status::Solved => {
            let plan = result.solution.expect("solved");
            emit(&write_solution(&plan), out)?;
            Ok(EXIT_OK)
        }
        Status::Infeasible => {
            eprintln!("infeasible: {:?}", result.stats.infeasibility);
            Ok(EXIT_FAIL)
        }
        Status::Timeout => {
            eprintln!("timeout");
            Ok(EXIT_TIMEOUT)
        }
    }
}

fn cmd_validate(map: &FsPath, scen: &FsPath, solution: &FsPath) -> CliResult {
    let instance = load_instance(map, scen)?;
    let report = validate_solution_text(&instance, &read(solution)?);
    println!("{report}");
    Ok(if report.is_valid() {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

/// A map file, or a built-in map name when no such file exists.
fn resolve_map(path: &FsPath) -> Result<GridMap, UsageError> {
    if !path.exists() {
        if let Some(m) = path.to_str().and_then(builtin_map) {
            return Ok(m);
        }
    }
    parse_map(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn cmd_gen(
    seed: u64,
    map: &str,
    agents: usize,
    kmin: usize,
    kmax: usize,
    out: Option<&FsPath>,
) -> CliResult {
    let grid = resolve_map(FsPath::new(map))?;
    let instance = generate_instance(seed, &grid, agents, kmin, kmax)?;
    emit(&write_scenario(&instance), out)?;
    Ok(EXIT_OK)
}

fn cmd_bench(sweep: &FsPath, out: &FsPath) -> CliResult {
    let config = SweepConfig::from_toml(&read(sweep)?)?;
    let rows = run_benchmark(&config, sweep.parent())?;
    let file = fs::File::create(out).map_err(|e| UsageError(format!("{}: {e}", out.display())))?;
    write_csv(&rows, file)?;
    Ok(EXIT_OK)
}

fn cmd_oracle(map: &FsPath, scen: &FsPath, out: Option<&FsPath>) -> CliResult {
    let instance = load_instance(map, scen)?;
    match oracle_solve(&instance, OracleLimits::default())? {
        Some(plan) => {
            emit(&write_solution(&plan), out)?;
            Ok(EXIT_OK)
        }
        None => {
            eprintln!("infeasible");
            Ok(EXIT_FAIL)
        }
    }
}
