mod common;

use std::fs;
use std::path::{Path, PathBuf};

use mgtapf::cli::{run, EXIT_FAIL, EXIT_OK, EXIT_TIMEOUT, EXIT_USAGE};
use mgtapf::iobench::{parse_solution, read_csv, CSV_HEADER};

struct Files {
    dir: tempfile::TempDir,
}

impl Files {
    fn new() -> Self {
        let f = Files {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("fig1.map", common::FIG1_MAP);
        f.write("fig1.scen", common::FIG1_SCEN);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
}

fn cli(args: &[&str]) -> i32 {
    run(std::iter::once("mgtapf").chain(args.iter().copied()))
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn solve_focal_on_fig1() {
    let f = Files::new();
    let (map, scen, out, stats) = (
        f.arg("fig1.map"),
        f.arg("fig1.scen"),
        f.arg("sol"),
        f.arg("stats.json"),
    );
    let code = cli(&[
        "solve", "--map", &map, "--scen", &scen, "--algo", "ecbs-ta", "--omega", "1.1", "--out",
        &out, "--stats", &stats,
    ]);
    assert_eq!(code, EXIT_OK);
    let plan = parse_solution(&read(&f.path("sol"))).unwrap();
    assert!(plan.flowtime <= 9);
    let json: serde_json::Value = serde_json::from_str(&read(&f.path("stats.json"))).unwrap();
    assert_eq!(json["status"], "solved");
    assert!(json["stats"]["lower_bound"].as_u64().unwrap() <= 9);
    assert_eq!(
        cli(&[
            "validate",
            "--map",
            &map,
            "--scen",
            &scen,
            "--solution",
            &out
        ]),
        EXIT_OK
    );
}

#[test]
fn validate_rejects_tampered_solution() {
    let f = Files::new();
    let (map, scen, out) = (f.arg("fig1.map"), f.arg("fig1.scen"), f.arg("sol"));
    assert_eq!(
        cli(&["solve", "--map", &map, "--scen", &scen, "--out", &out]),
        EXIT_OK
    );
    let text = read(&f.path("sol"));
    assert!(text.ends_with("flowtime 9\n"));
    f.write("sol", &text.replace("(1,0)(1,1)", "(1,0)(2,2)"));
    assert_eq!(
        cli(&[
            "validate",
            "--map",
            &map,
            "--scen",
            &scen,
            "--solution",
            &out
        ]),
        EXIT_FAIL
    );
    f.write("sol", "not a solution\n");
    assert_eq!(
        cli(&[
            "validate",
            "--map",
            &map,
            "--scen",
            &scen,
            "--solution",
            &out
        ]),
        EXIT_FAIL
    );
}

#[test]
fn usage_errors() {
    let f = Files::new();
    let (map, scen) = (f.arg("fig1.map"), f.arg("fig1.scen"));
    assert_eq!(
        cli(&["solve", "--map", &map, "--scen", &scen, "--omega", "0.9"]),
        EXIT_USAGE
    );
    assert_eq!(
        cli(&["solve", "--map", &map, "--scen", &scen, "--frobnicate"]),
        EXIT_USAGE
    );
    assert_eq!(
        cli(&["solve", "--map", &map, "--scen", &scen, "--algo", "astar"]),
        EXIT_USAGE
    );
    assert_eq!(cli(&["solve", "--map", &map]), EXIT_USAGE);
    assert_eq!(
        cli(&["solve", "--map", &f.arg("missing"), "--scen", &scen]),
        EXIT_USAGE
    );
    f.write("bad.scen", "agents 0\n");
    assert_eq!(
        cli(&["solve", "--map", &map, "--scen", &f.arg("bad.scen")]),
        EXIT_USAGE
    );
    assert_eq!(cli(&[]), EXIT_USAGE);
    assert_eq!(cli(&["--help"]), EXIT_OK);
}

#[test]
fn infeasible_and_timeout_codes() {
    let f = Files::new();
    let map = f.arg("fig1.map");
    // Both tasks end on B2.
    f.write(
        "shared.scen",
        "agents 2\nagent 0 0 0\nagent 1 2 2\ntask 0 1 1 1\ntask 1 2 0 2 1 1\n",
    );
    assert_eq!(
        cli(&["solve", "--map", &map, "--scen", &f.arg("shared.scen")]),
        EXIT_FAIL
    );
    assert_eq!(
        cli(&["oracle", "--map", &map, "--scen", &f.arg("shared.scen")]),
        EXIT_FAIL
    );

    let scen = f.arg("dense.scen");
    assert_eq!(
        cli(&[
            "gen", "--seed", "4", "--map", "dense20", "--agents", "12", "--kmin", "3", "--kmax",
            "3", "--out", &scen
        ]),
        EXIT_OK
    );
    let grid = f.write(
        "dense20.map",
        &mgtapf::iobench::write_map(&mgtapf::iobench::builtin_map("dense20").unwrap()),
    );
    let grid = grid.to_string_lossy().into_owned();
    assert_eq!(
        cli(&[
            "solve",
            "--map",
            &grid,
            "--scen",
            &scen,
            "--algo",
            "cbsh-ta",
            "--heuristic",
            "wdg",
            "--time-limit",
            "0"
        ]),
        EXIT_TIMEOUT
    );
}

#[test]
fn gen_is_deterministic_and_oracle_solves_fig1() {
    let f = Files::new();
    for name in ["a.scen", "b.scen"] {
        let out = f.arg(name);
        assert_eq!(
            cli(&[
                "gen", "--seed", "9", "--map", "sparse32", "--agents", "5", "--kmin", "1",
                "--kmax", "4", "--out", &out
            ]),
            EXIT_OK
        );
    }
    assert_eq!(read(&f.path("a.scen")), read(&f.path("b.scen")));
    let (scen, sol) = (f.arg("a.scen"), f.arg("a.sol"));
    assert_eq!(
        cli(&[
            "solve", "--map", "sparse32", "--scen", &scen, "--algo", "ecbs-ta", "--omega", "1.1",
            "--out", &sol
        ]),
        EXIT_OK
    );
    assert_eq!(
        cli(&[
            "validate",
            "--map",
            "sparse32",
            "--scen",
            &scen,
            "--solution",
            &sol
        ]),
        EXIT_OK
    );
    assert_eq!(
        cli(&[
            "gen", "--seed", "9", "--map", "nowhere", "--agents", "5", "--kmin", "1", "--kmax", "4"
        ]),
        EXIT_USAGE
    );
    let out = f.arg("oracle.sol");
    assert_eq!(
        cli(&[
            "oracle",
            "--map",
            &f.arg("fig1.map"),
            "--scen",
            &f.arg("fig1.scen"),
            "--out",
            &out
        ]),
        EXIT_OK
    );
    assert!(read(&f.path("oracle.sol")).ends_with("flowtime 9\n"));
}

#[test]
fn bench_writes_raw_and_aggregate_rows() {
    let f = Files::new();
    let sweep = f.write(
        "sweep.toml",
        r#"
[[cell]]
map = "fig1.map"
agents = 2
kmin = 1
kmax = 2
seeds = [1, 2, 3]
algos = ["cbs-ta", "ecbs-ta"]
omegas = [1.0, 1.2]
time_limit_s = 5
"#,
    );
    let out = f.arg("out.csv");
    assert_eq!(
        cli(&["bench", "--sweep", &sweep.to_string_lossy(), "--out", &out]),
        EXIT_OK
    );
    let text = read(&f.path("out.csv"));
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 9 + 3);
    assert_eq!(rows.iter().filter(|r| r.is_aggregate()).count(), 3);
    f.write("broken.toml", "[[cell]]\nmap = 3\n");
    assert_eq!(
        cli(&["bench", "--sweep", &f.arg("broken.toml"), "--out", &out]),
        EXIT_USAGE
    );
}
