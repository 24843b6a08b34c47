use std::fs;
use std::process::{Command, Output};

use semicohen::json::{parse, Canonical};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semicohen"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_scale_passes() {
    let o = run(&[
        "verify",
        "--poset",
        "scale",
        "--indices",
        "0,1,2",
        "--max-len",
        "2",
        "--max-val",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("scale amalgamation")).unwrap();
    assert!(row.ends_with("pass"), "{row}");
}

#[test]
fn hasse_cohen_has_nine_nodes() {
    let o = run(&["hasse", "--poset", "cohen", "--indices", "0,1", "--max-val", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph hasse {"));
    assert_eq!(dot.matches("[label=").count(), 9);
    assert_eq!(dot.matches(" -> ").count(), 12);
    assert!(dot.contains(r#"n0 [label="{\"kind\":\"cohen\",\"entries\":{}}"];"#));
}

#[test]
fn simulate_evdiff_hundred_seeds() {
    let o = run(&["simulate", "--poset", "evdiff", "--seeds", "1..100", "--steps", "50"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("100/100 family checks pass\n"));
}

#[test]
fn usage_and_overflow_exit_two() {
    assert_eq!(run(&["verify", "--poset", "lattice"]).status.code(), Some(2));
    assert_eq!(run(&["--poset", "scale"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--max-len", "0"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--seeds", "5..1"]).status.code(), Some(2));
    let o = run(&[
        "enumerate",
        "--poset",
        "evdiff",
        "--indices",
        "0,1,2,3,4,5",
        "--max-len",
        "4",
        "--max-val",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("above the cap"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command":"enumerate","poset":"cohen","indices":[0,1,2]}"#).unwrap();
    let all = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&all).lines().count(), 27);
    let fewer = run(&["--config", cfg.to_str().unwrap(), "--indices", "0,1"]);
    assert_eq!(stdout(&fewer).lines().count(), 9);

    fs::write(&cfg, r#"{"command":"enumerate","colour":"red"}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.dot");
    let b = dir.path().join("b.dot");
    for path in [&a, &b] {
        let o = run(&[
            "hasse",
            "--poset",
            "scale",
            "--indices",
            "0,1",
            "--max-len",
            "1",
            "--max-val",
            "2",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let first = stdout(&run(&["embed-demo", "--samples", "20", "--seeds", "7"]));
    assert_eq!(first, stdout(&run(&["embed-demo", "--samples", "20", "--seeds", "7"])));
}

#[test]
fn enumerated_lines_round_trip() {
    for poset in ["scale", "evdiff", "cohen", "residue", "flat"] {
        let o = run(&[
            "enumerate",
            "--poset",
            poset,
            "--indices",
            "0,2",
            "--max-len",
            "2",
            "--max-val",
            "2",
        ]);
        assert_eq!(o.status.code(), Some(0));
        for line in stdout(&o).lines() {
            assert_eq!(parse(line).unwrap().to_json(), line);
        }
    }
    let o = run(&[
        "enumerate",
        "--poset",
        "product",
        "--indices",
        "0",
        "--max-len",
        "1",
        "--max-val",
        "2",
    ]);
    for line in stdout(&o).lines() {
        assert_eq!(parse(line).unwrap().to_json(), line);
    }
}

#[test]
fn trace_logs_are_line_delimited_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "simulate",
        "--poset",
        "scale",
        "--seeds",
        "3,4",
        "--steps",
        "12",
        "--trace-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("trace-3.ldjson")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    for (k, line) in lines.iter().enumerate() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["step"], k);
        assert!(v["met"].is_array());
        assert_eq!(
            parse(&v["condition"].to_string()).unwrap().to_json(),
            v["condition"].to_string()
        );
    }
}

#[test]
fn embed_demo_reports_every_case() {
    let o = run(&["embed-demo", "--samples", "50", "--indices", "0,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 50);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["ok"], true);
        assert_eq!(v["proj"]["kind"], "evdiff");
    }
}
