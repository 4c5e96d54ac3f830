use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gxw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gxw")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[test]
fn synth_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for (name, code) in [
        ("door.gxw", 0),
        ("conflict_p3.gxw", 3),
        ("fig8.gxw", 4),
    ] {
        let o = gxw(&["synth", &fixture(name), "-o", out]);
        assert_eq!(o.status.code(), Some(code), "{name}: {}", stdout(&o));
    }
    let o = gxw(&["synth", &fixture("conflict_p3.gxw"), "-o", out, "--unroll", "off"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = p(dir.path(), "bad.gxw");
    std::fs::write(&bad, "input a; output o; G(a -> ").unwrap();
    assert_eq!(gxw(&["synth", bad.to_str().unwrap(), "-o", out]).status.code(), Some(1));
    std::fs::write(&bad, "input a; output o; G(o -> a);").unwrap();
    assert_eq!(gxw(&["synth", bad.to_str().unwrap(), "-o", out]).status.code(), Some(4));
    assert_eq!(gxw(&["synth", "/nonexistent.gxw"]).status.code(), Some(1));
}

#[test]
fn synth_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let q = p(dir.path(), "door.qdimacs");
    let o = gxw(&["synth", &fixture("door.gxw"), "-o", out, "--dot", "--qdimacs", q.to_str().unwrap(), "--fuzz", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict: synthesized"));
    assert!(text.contains("A(out0) = false"));
    assert!(text.contains("fuzz: 50 traces of length 50, 0 failing"));
    for f in ["door.netlist.json", "door.dot", "door.witness", "door.report.json", "door.qdimacs"] {
        assert!(p(dir.path(), f).exists(), "{f} missing");
    }
    let w = std::fs::read_to_string(p(dir.path(), "door.witness")).unwrap();
    assert!(w.lines().any(|l| l == "out0=0"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p(dir.path(), "door.report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "synthesized");
    assert_eq!(report["omega"], 10);
    assert!(std::fs::read_to_string(&q).unwrap().contains("p cnf"));
    // a failing run leaves no netlist behind
    let o = gxw(&["synth", &fixture("conflict_p3.gxw"), "-o", out]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!p(dir.path(), "conflict_p3.netlist.json").exists());
    assert!(p(dir.path(), "conflict_p3.report.json").exists());
}

#[test]
fn simulate_and_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(gxw(&["synth", &fixture("door.gxw"), "-o", out]).status.code(), Some(0));
    let inputs = p(dir.path(), "in.csv");
    std::fs::write(&inputs, "in0,in1,in2,t0expire\n0,0,0,0\n1,0,0,0\n0,0,0,0\n0,0,1,0\n0,0,0,1\n0,0,0,0\n").unwrap();
    let net = p(dir.path(), "door.netlist.json");
    let joint = p(dir.path(), "joint.csv");
    let a = gxw(&["simulate", net.to_str().unwrap(), inputs.to_str().unwrap()]);
    let b = gxw(&["simulate", net.to_str().unwrap(), inputs.to_str().unwrap(), "-o", joint.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let csv = std::fs::read_to_string(&joint).unwrap();
    assert_eq!(stdout(&a), csv);
    assert!(csv.starts_with("in0,in1,in2,t0expire,out0,out1,t0start\n"));
    let c = gxw(&["check", &fixture("door.gxw"), joint.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0), "{}", stdout(&c));

    // flip out0 in the cycle after entry
    let mut lines: Vec<String> = csv.lines().map(String::from).collect();
    let mut cells: Vec<&str> = lines[3].split(',').collect();
    cells[4] = if cells[4] == "1" { "0" } else { "1" };
    lines[3] = cells.join(",");
    let broken = p(dir.path(), "broken.csv");
    std::fs::write(&broken, lines.join("\n")).unwrap();
    let c = gxw(&["check", &fixture("door.gxw"), broken.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(5));
    assert!(stdout(&c).contains("@ cycle 2"));
}

#[test]
fn export_and_omega() {
    let dir = tempfile::tempdir().unwrap();
    let o = gxw(&["omega", &fixture("door.gxw")]);
    assert_eq!(stdout(&o).trim(), "10");
    let o = gxw(&["omega", &fixture("door_no_s6.gxw")]);
    assert_eq!(stdout(&o).trim(), "9");

    let q = p(dir.path(), "u.qdimacs");
    let o = gxw(&["export", &fixture("conflict_p3.gxw"), "--qdimacs", q.to_str().unwrap(), "--unroll", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&q).unwrap().lines().any(|l| l.starts_with("p cnf")));

    let out = dir.path().to_str().unwrap();
    gxw(&["synth", &fixture("eq3.gxw"), "-o", out]);
    let dot = p(dir.path(), "eq3.dot");
    let o = gxw(&["export", p(dir.path(), "eq3.netlist.json").to_str().unwrap(), "--dot", "-o", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    // the DOT rendering is itself a loadable netlist
    let inputs = p(dir.path(), "in.csv");
    std::fs::write(&inputs, "in1,in2\n0,0\n1,1\n1,0\n").unwrap();
    let a = gxw(&["simulate", dot.to_str().unwrap(), inputs.to_str().unwrap()]);
    let b = gxw(&["simulate", p(dir.path(), "eq3.netlist.json").to_str().unwrap(), inputs.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(gxw(&["export", &fixture("door.gxw")]).status.code(), Some(1));
}

#[test]
fn bench_prints_csv() {
    let o = gxw(&["bench", "--inputs", "4", "--outputs", "2", "--k", "3", "--repeat", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("inputs,outputs,k,actors,verdict"));
    assert!(lines[1].starts_with("4,2,3,"));
    assert!(lines[1].contains(",synthesized,"));
}
