use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thue-tree"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn path_tree(dir: &Path, n: usize) -> PathBuf {
    let o = run(&["generate", "--model", &format!(r#"{{"model":"path","n":{n}}}"#)]);
    assert!(o.status.success());
    write(dir, "tree.json", &stdout(&o))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn single_vertex_tree_solves() {
    let dir = TempDir::new().unwrap();
    let tree = write(dir.path(), "t.json", r#"{"n":1,"root":0,"edges":[]}"#);
    let o = run(&["solve", "--tree", s(&tree), "--random-lists", "4", "8", "--epsilon", "1/1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coloring"].as_array().unwrap().len(), 1);
    assert_eq!(v["stats"]["steps"], 1);
}

#[test]
fn budget_one_exhausts() {
    let dir = TempDir::new().unwrap();
    let tree = path_tree(dir.path(), 10);
    let o = run(&["solve", "--tree", s(&tree), "--random-lists", "4", "8", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "budget_exhausted");
    assert_eq!(v["stats"]["steps"], 1);
}

#[test]
fn solve_verify_decode_round_trip() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let tree = path_tree(d, 100);
    let lists = d.join("lists.json");
    let result = d.join("result.json");
    let log = d.join("log.json");
    let o = run(&[
        "solve", "--tree", s(&tree), "--random-lists", "4", "20", "--seed", "11", "--budget", "100000",
        "--lists-out", s(&lists), "--out", s(&result), "--log-out", s(&log),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&["verify", "--tree", s(&tree), "--coloring", s(&result), "--lists", s(&lists)]);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&["decode", "--log", s(&log), "--tree", s(&tree), "--lists", s(&lists)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let seed: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(seed, stored["seed"]);

    // the result file itself also carries the log
    let o = run(&["decode", "--log", s(&result), "--tree", s(&tree), "--lists", s(&lists)]);
    assert_eq!(o.status.code(), Some(0));

    let text = std::fs::read_to_string(&log).unwrap();
    let cut = write(d, "cut.json", &text[..text.len() / 2]);
    let o = run(&["decode", "--log", s(&cut), "--tree", s(&tree), "--lists", s(&lists)]);
    assert_eq!(o.status.code(), Some(3));

    let mut tampered: Value = serde_json::from_str(&text).unwrap();
    tampered["W"].as_array_mut().unwrap().push(Value::from(1));
    let bad = write(d, "bad.json", &tampered.to_string());
    let o = run(&["decode", "--log", s(&bad), "--tree", s(&tree), "--lists", s(&lists)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn full_mode_on_relabelled_dot_tree() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    // labels are not in preorder
    let tree = write(d, "t.dot", "digraph T {\n 5 -> 2;\n 5 -> 0;\n 2 -> 4;\n 0 -> 1;\n 0 -> 3;\n}\n");
    let lists = d.join("lists.json");
    let result = d.join("r.json");
    let o = run(&[
        "solve", "--tree", s(&tree), "--mode", "full", "--epsilon", "1/1", "--random-lists", "5", "6",
        "--lists-out", s(&lists), "--out", s(&result), "--budget", "100000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["verify", "--tree", s(&tree), "--coloring", s(&result), "--mode", "full", "--epsilon", "1/1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["decode", "--log", s(&result), "--tree", s(&tree), "--lists", s(&lists), "--mode", "full", "--epsilon", "1/1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_reports_violations() {
    let dir = TempDir::new().unwrap();
    let tree = path_tree(dir.path(), 4);
    let coloring = write(dir.path(), "c.json", "[0,1,0,1]");
    let o = run(&["verify", "--tree", s(&tree), "--coloring", s(&coloring), "--mode", "full", "--epsilon", "1/1"]);
    assert_eq!(o.status.code(), Some(4));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["clean"], false);
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let tree = path_tree(dir.path(), 4);
    let o = run(&["solve", "--tree", s(&tree), "--random-lists", "4", "8", "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let cyclic = write(dir.path(), "c.json", r#"{"n":2,"root":0,"edges":[[0,1],[1,0]]}"#);
    let o = run(&["solve", "--tree", s(&cyclic), "--random-lists", "4", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["solve", "--tree", "/nonexistent/tree.json", "--random-lists", "4", "8"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let tree = path_tree(dir.path(), 10);
    let config = write(dir.path(), "cfg.json", r#"{"mode":"vertical","epsilon":"1/1","budget":1}"#);
    let o = run(&["solve", "--tree", s(&tree), "--random-lists", "4", "8", "--config", s(&config)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", "--tree", s(&tree), "--random-lists", "4", "8", "--config", s(&config), "--budget", "10000"]);
    assert_eq!(o.status.code(), Some(0));
}

fn experiment_spec(dir: &Path, sizes: &str, trials: usize, n: usize) -> PathBuf {
    write(
        dir,
        "spec.json",
        &format!(
            r#"{{"mode":"vertical","epsilon":"1/1","tree":{{"model":"random","n":{n},"max_degree":5}},
"list_sizes":{sizes},"trials":{trials},"master_seed":17,"palette":12}}"#
        ),
    )
}

#[test]
fn experiment_is_reproducible_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let spec = experiment_spec(dir.path(), "[2,3,4]", 6, 200);
    let a = bin().args(["experiment", "--spec", s(&spec)]).env("THUE_TREE_THREADS", "1").output().unwrap();
    let b = bin().args(["experiment", "--spec", s(&spec)]).env("THUE_TREE_THREADS", "4").output().unwrap();
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&a);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("list_size,trials,successes,success_rate"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn experiment_single_trial_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = experiment_spec(dir.path(), "[4]", 1, 100);
    let out = dir.path().join("o.csv");
    assert!(run(&["experiment", "--spec", s(&spec), "--out", s(&out)]).status.success());
    let first = std::fs::read(&out).unwrap();
    assert!(run(&["experiment", "--spec", s(&spec), "--out", s(&out)]).status.success());
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn success_rate_grows_with_list_size() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"mode":"vertical","epsilon":"1/1","tree":{"model":"random","n":2000,"max_degree":6},
"list_sizes":[3,4,5,6],"trials":8,"master_seed":3,"palette":12,"budget":40000}"#,
    );
    let o = run(&["experiment", "--spec", s(&spec)]);
    assert_eq!(o.status.code(), Some(0));
    let rates: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
    assert_eq!(rates[3], 1.0);
}

#[test]
fn oracle_commands() {
    let o = run(&["oracle", "thue", "--length", "10"]);
    assert_eq!(stdout(&o), "abcacbabcb\n");

    let dir = TempDir::new().unwrap();
    let tree = path_tree(dir.path(), 4);
    let lists = write(dir.path(), "l.json", "[[0,1],[0,1],[0,1],[0,1]]");
    let o = run(&["oracle", "exhaustive", "--tree", s(&tree), "--lists", s(&lists), "--paths", "all"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["colorable"], false);

    let o = run(&["oracle", "counting", "--epsilon", "1/1", "--n", "10", "--steps", "8"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["walks_exact_len"], 12870);
    assert_eq!(v["left_rate"], 2.0);
}
