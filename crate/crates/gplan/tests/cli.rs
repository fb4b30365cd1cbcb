//! End-to-end runs of the `gplan` binary: exit codes, report files, and
//! artifact round trips between subcommands.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn gplan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gplan"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn gen(dir: &Path, kind: &str, extra: &[&str]) -> (PathBuf, PathBuf) {
    let dom = dir.join(format!("{kind}-dom.pddl"));
    let prob = dir.join(format!("{kind}-prob.pddl"));
    let mut args = vec![
        "gen-domain",
        "--kind",
        kind,
        "--out-domain",
        dom.to_str().unwrap(),
        "--out-problem",
        prob.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = gplan(dir, &args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (dom, prob)
}

#[test]
fn gen_expand_width_pipeline() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let (dom, prob) = gen(dir, "delivery", &["--n", "2", "--m", "2", "--packages", "1"]);

    let graph = dir.join("graph.json");
    let report = dir.join("report.json");
    let out = gplan(
        dir,
        &[
            "expand",
            "--domain",
            dom.to_str().unwrap(),
            "--problem",
            prob.to_str().unwrap(),
            "--out-graph",
            graph.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("states=20"), "{stdout}");

    let rep = read_report(&report);
    assert_eq!(rep["command"], "expand");
    assert!(rep["timings"]["total"].is_u64());
    assert_eq!(rep["artifacts"][0], graph.to_str().unwrap());

    let out = gplan(
        dir,
        &[
            "width",
            "--domain",
            dom.to_str().unwrap(),
            "--problem",
            prob.to_str().unwrap(),
            "--kmax",
            "3",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("width="));
}

#[test]
fn solve_siw_writes_a_plan() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let (dom, prob) = gen(dir, "hanoi", &["--disks", "3"]);
    let plan = dir.join("plan.txt");
    let out = gplan(
        dir,
        &[
            "solve-siw",
            "--domain",
            dom.to_str().unwrap(),
            "--problem",
            prob.to_str().unwrap(),
            "--out-plan",
            plan.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&plan).unwrap();
    assert!(text.lines().count() >= 7, "hanoi-3 needs at least 7 moves");
    assert!(text.lines().all(|l| l.starts_with("move(")));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    // missing file
    let out = gplan(
        dir,
        &[
            "width",
            "--domain",
            "nope.pddl",
            "--problem",
            "nope.pddl",
        ],
    );
    assert_eq!(code(&out), 2);
    // unknown subcommand (clap)
    let out = gplan(dir, &["frobnicate"]);
    assert_eq!(code(&out), 2);
    // unknown generator kind
    let out = gplan(
        dir,
        &[
            "gen-domain",
            "--kind",
            "sokoban",
            "--out-domain",
            "d.pddl",
            "--out-problem",
            "p.pddl",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn learn_model_validate_model_round_trip() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    // single-edge toggle graph: learnable in milliseconds
    let graph = serde_json::json!({
        "n": 2,
        "init": 0,
        "goals": [],
        "edges": [[0, 1, "toggle"]]
    });
    let gpath = dir.join("toggle.json");
    std::fs::write(&gpath, graph.to_string()).unwrap();
    let dom = dir.join("learned.pddl");
    let report = dir.join("report.json");
    let out = gplan(
        dir,
        &[
            "learn-model",
            "--graphs",
            gpath.to_str().unwrap(),
            "--max-arity",
            "1",
            "--max-pred-arity",
            "1",
            "--objects",
            "1",
            "--out-domain",
            dom.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("cost=2"));
    assert_eq!(read_report(&report)["command"], "learn-model");

    let out = gplan(
        dir,
        &[
            "validate-model",
            "--domain",
            dom.to_str().unwrap(),
            "--graph",
            gpath.to_str().unwrap(),
            "--objects",
            "1",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    // a graph the learned domain cannot produce → domain-level failure
    let bad = serde_json::json!({
        "n": 3,
        "init": 0,
        "goals": [],
        "edges": [[0, 1, "toggle"], [1, 2, "toggle"]]
    });
    let bpath = dir.join("bad.json");
    std::fs::write(&bpath, bad.to_string()).unwrap();
    let out = gplan(
        dir,
        &[
            "validate-model",
            "--domain",
            dom.to_str().unwrap(),
            "--graph",
            bpath.to_str().unwrap(),
            "--objects",
            "2",
        ],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_policy_failure_exits_1() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let (dom, prob) = gen(dir, "blocks-clear", &["--blocks", "3"]);
    // a vacuous policy (no rules) cannot solve anything with >0 steps
    let policy = dir.join("empty.json");
    std::fs::write(&policy, r#"{"features": [], "rules": []}"#).unwrap();
    let out = gplan(
        dir,
        &[
            "verify-policy",
            "--domain",
            dom.to_str().unwrap(),
            "--problem",
            prob.to_str().unwrap(),
            "--policy",
            policy.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn reports_are_deterministic_given_seed() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let run = |tag: &str| -> (String, String) {
        let dom = dir.join(format!("{tag}-d.pddl"));
        let prob = dir.join(format!("{tag}-p.pddl"));
        let out = gplan(
            dir,
            &[
                "--seed",
                "42",
                "gen-domain",
                "--kind",
                "delivery",
                "--n",
                "3",
                "--m",
                "3",
                "--packages",
                "2",
                "--out-domain",
                dom.to_str().unwrap(),
                "--out-problem",
                prob.to_str().unwrap(),
            ],
        );
        assert_eq!(code(&out), 0);
        (
            std::fs::read_to_string(&dom).unwrap(),
            std::fs::read_to_string(&prob).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}
