mod common;

use std::process::{Command, Output};

use common::{corpus_path, CORPUS};

fn hodp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn prove(name: &str, extra: &[&str]) -> Output {
    let path = corpus_path(name);
    let mut args = vec!["prove", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    hodp(&args)
}

fn first_line(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .next()
        .unwrap_or("")
        .to_string()
}

#[test]
fn exit_codes_follow_the_verdict() {
    let cases = [
        ("map", 0, "YES"),
        ("nonterm", 1, "NO"),
        ("staticbad", 2, "MAYBE"),
    ];
    for (name, code, verdict) in cases {
        let o = prove(name, &[]);
        assert_eq!(o.status.code(), Some(code), "{name}");
        assert_eq!(first_line(&o), verdict, "{name}");
    }
}

#[test]
fn usage_errors_exit_with_three() {
    let o = hodp(&["prove", "/nonexistent/file.afsm"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
    let o = prove("map", &["--strategy", "graph,bogus"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn parse_errors_are_located() {
    let dir = std::env::temp_dir().join(format!("hodp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.afsm");
    std::fs::write(&path, "sort o\nfun f : o -> o\nrule f X => $\n").unwrap();
    let o = hodp(&["prove", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("broken.afsm:3:"), "{err}");
}

#[test]
fn json_output_has_the_expected_keys() {
    for name in CORPUS {
        let o = prove(name, &["--format", "json"]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("valid json");
        for key in ["verdict", "trace", "input_summary"] {
            assert!(v.get(key).is_some(), "{name}: missing {key}");
        }
        if v["verdict"] == "MAYBE" {
            assert!(v.get("reason").is_some(), "{name}");
        }
    }
}

#[test]
fn dot_output_starts_with_the_verdict() {
    let o = prove("graphconditions", &["--format", "dot"]);
    let text = String::from_utf8_lossy(&o.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("YES"));
    assert!(text.contains("digraph"));
}

#[test]
fn output_is_deterministic() {
    for name in CORPUS {
        let a = prove(name, &["--format", "json", "--explain"]);
        let b = prove(name, &["--format", "json", "--explain"]);
        let c = prove(name, &["--format", "json", "--explain", "--jobs", "4"]);
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert_eq!(a.stdout, c.stdout, "{name}: jobs");
        assert_eq!(a.status.code(), c.status.code(), "{name}");
    }
}

#[test]
fn forced_eta_expansion_never_answers_no() {
    let o = prove("nonterm", &["--eta", "force"]);
    assert_ne!(first_line(&o), "NO");
    let o = prove("map", &["--eta", "force"]);
    assert_eq!(first_line(&o), "YES");
}
