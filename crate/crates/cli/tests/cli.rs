//! The `intq` binary: exit codes, the structured sidecar and replay.

use std::path::Path;
use std::process::{Command, Output};

fn intq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn girard_prints_the_two_element_quotient() {
    let o = intq(&["girard", "godel3", "--omega", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("* | 0 1"), "{text}");
    assert!(text.contains("0 failed"));
}

#[test]
fn godel_is_not_dualizing_at_zero() {
    let o = intq(&["check-dualizing", "godel3", "--omega", "0", "--instance", "powq"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("alpha=(1/2)"));
}

#[test]
fn closed_structure_for_lukasiewicz() {
    let o = intq(&["check-closed", "lukasiewicz3", "--instance", "powq", "--max-obj", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.q");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(intq(&["girard", "--corpus", path(&empty)]).status.code(), Some(2));
    let broken = dir.path().join("broken.q");
    std::fs::write(&broken, "quantale q {\n  labels: [\"0\"\n}\n").unwrap();
    let o = intq(&["check-quantale", "--corpus", path(&broken)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(intq(&["nucleus", "no-such-dual"]).status.code(), Some(2));
    assert_eq!(intq(&["check-dualizing", "godel3", "--omega", "2/3"]).status.code(), Some(2));
    assert_eq!(intq(&["not-a-command"]).status.code(), Some(2));
}

#[test]
fn user_corpus_refers_to_bundled_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mine.q");
    std::fs::write(&file, "dual l4-zero {\n  presheaf: \"mine\"\n  omega: \"0\"\n}\npresheaf mine {\n  instance: \"powq\"\n  quantale: \"lukasiewicz4\"\n}\n").unwrap();
    let o = intq(&["check-dualizing", "l4-zero", "--corpus", path(&file)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn sidecar_is_deterministic_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = intq(&["check-quantale", "maxchain3", "--json", path(out), "--parallel", "2"]);
        assert_eq!(o.status.code(), Some(1));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let report: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    let verdicts = report["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().all(|v| v["law_id"].is_string() && v["status"].is_string() && v["budget"].is_string()));
    assert!(verdicts.iter().any(|v| v["status"] == "fail" && v["witness"].is_object()));

    let o = intq(&["--replay", path(&a)]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("PASS replay.match"), "{text}");
    assert!(text.contains("reproduced"));
}
