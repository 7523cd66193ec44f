use std::io::Write;
use std::process::{Command, Output, Stdio};

fn strrep(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_strrep"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn strrep");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(args: &[&str], stdin: &str) -> String {
    let out = strrep(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], stdin: &str) -> i32 {
    strrep(args, stdin).status.code().unwrap()
}

#[test]
fn sausage_verifies_precise() {
    let s = stdout(&["gadget", "sausage", "--k", "3"], "");
    assert_eq!(code(&["verify", "--k", "3", "--precise", "-"], &s), 0);
    assert_eq!(code(&["verify", "--k", "2", "--precise", "-"], &s), 1);
    assert_eq!(code(&["verify", "--odd", "-"], &s), 0);
    assert_eq!(code(&["verify", "--k", "3", "-"], &s), 0);
}

#[test]
fn g1_has_no_extension_to_two() {
    let g1 = stdout(&["gadget", "g1"], "");
    assert_eq!(stdout(&["search-ext", "--target", "2", "-"], &g1), "none\n");
}

#[test]
fn search_ext_prints_a_profile() {
    let s = stdout(&["gadget", "sausage", "--k", "1"], "");
    let p = stdout(&["search-ext", "--target", "3", "-"], &s);
    assert!(p.lines().all(|l| l.starts_with("extend ")), "{p}");
}

#[test]
fn pipeline_8k_reaches_eight() {
    let s = stdout(&["gadget", "sausage", "--k", "1"], "");
    let t = stdout(&["transform", "--op", "pipeline-8k", "--k", "1", "-"], &s);
    assert_eq!(code(&["verify", "--k", "8", "--precise", "-"], &t), 0);
}

#[test]
fn transforms_reverify() {
    let s = stdout(&["gadget", "sausage", "--k", "1"], "");
    let t = stdout(&["transform", "--op", "add-two", "--pair", "u,v", "-"], &s);
    assert_eq!(code(&["verify", "--k", "3", "--precise", "-"], &t), 0);
    let t = stdout(&["transform", "--op", "quadruple", "-"], &s);
    assert_eq!(code(&["verify", "--k", "4", "--precise", "-"], &t), 0);
    let t = stdout(&["transform", "--op", "double-side", "--side", "u", "-"], &s);
    assert_eq!(code(&["verify", "--k", "2", "--precise", "-"], &t), 0);
    let t = stdout(&["transform", "--op", "equalize", "--m", "5", "-"], &s);
    assert_eq!(code(&["verify", "--k", "5", "--precise", "-"], &t), 0);
}

#[test]
fn graph_of_k8_is_complete() {
    let k8 = stdout(&["gadget", "k8"], "");
    let g = stdout(&["graph", "-"], &k8);
    assert_eq!(g.lines().filter(|l| l.starts_with("edge ")).count(), 28, "{g}");
}

#[test]
fn noodle_force_writes_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let s = stdout(&["gadget", "sausage", "--k", "1"], "");
    let out = stdout(&["noodle-force", "--precise-k", "1", "--graph-out", graph.to_str().unwrap(), "-"], &s);
    assert_eq!(code(&["verify", "--k", "1", "--precise", "-"], &out), 0);
    let g = std::fs::read_to_string(&graph).unwrap();
    assert!(g.lines().any(|l| l == "edge u v"), "{g}");
}

#[test]
fn analyze_reports_classes() {
    let s = stdout(&["gadget", "sausage", "--k", "2"], "");
    let a = stdout(&["analyze", "--pair", "u,v", "--epsilon", "1/4", "-"], &s);
    assert!(a.contains("zones 2\n"));
    assert!(a.contains("area u central\n"));
    assert!(a.contains("covers v false\n"));
    assert_eq!(code(&["analyze", "--pair", "u,v", "--epsilon", "5", "-"], &s), 2);
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let s = stdout(&["gadget", "odd-cx"], "");
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("{i}.svg"))).collect();
    for p in &paths {
        stdout(&["render", "-", "-o", p.to_str().unwrap()], &s);
    }
    let a = std::fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read_to_string(&paths[1]).unwrap());
    assert_eq!(a.matches("<path ").count(), 8);
    assert_eq!(a.matches("<circle ").count(), 2 * 27);
}

#[test]
fn errors_exit_two() {
    assert_eq!(code(&["verify", "--k", "1", "-"], "curve a 0,0\n"), 2);
    assert_eq!(code(&["verify", "--k", "1", "/nonexistent/file"], ""), 2);
    assert_eq!(code(&["bogus"], ""), 2);
    assert_eq!(code(&["transform", "--op", "add-two", "-"], "strrep v1\n"), 2);
}
