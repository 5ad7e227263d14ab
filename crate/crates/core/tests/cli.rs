//! End-to-end runs of the `seqcert` binary.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use seqcert::cli::{load_scenarios, BUILTINS, EXIT_ERROR, EXIT_MATCH, EXIT_MISMATCH};

fn seqcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("seqcert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn builtins_match_expectations() {
    for (name, _) in BUILTINS {
        let out = seqcert(&["run", name]);
        assert_eq!(
            out.status.code(),
            Some(EXIT_MATCH),
            "{name}:\n{}{}",
            stdout(&out),
            stderr(&out)
        );
    }
}

#[test]
fn list_is_sorted_with_descriptions() {
    let out = seqcert(&["list"]);
    assert_eq!(out.status.code(), Some(EXIT_MATCH));
    let text = stdout(&out);
    let names: Vec<&str> = text.lines().map(|l| l.split(':').next().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), BUILTINS.len());
    assert!(text.contains("limsup seminorm on ℓ∞"));
    assert!(text.contains("weighted sqrt objective on positive cone"));
}

#[test]
fn documented_examples_load_and_match() {
    for entry in std::fs::read_dir(docs().join("examples")).unwrap() {
        let path = entry.unwrap().path();
        let scenarios =
            load_scenarios(&path).unwrap_or_else(|e| panic!("{}: {e:#}", path.display()));
        assert!(!scenarios.is_empty());
        let out = seqcert(&["run", path.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(EXIT_MATCH),
            "{}:\n{}",
            path.display(),
            stdout(&out)
        );
    }
}

#[test]
fn mismatch_exits_one() {
    let path = scratch("mismatch.json");
    std::fs::write(
        &path,
        r#"{
  "name": "limsup/wrong-expectation",
  "space": { "kind": "ellinf" },
  "task": "psc",
  "function": { "kind": "limsup" },
  "point": { "prefix": [], "tail": { "kind": "const", "c": 1.0 } },
  "expected": "HOLDS"
}"#,
    )
    .unwrap();
    let out = seqcert(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_MISMATCH), "{}", stdout(&out));
}

#[test]
fn malformed_file_reports_field_and_line() {
    let path = scratch("malformed.json");
    std::fs::write(
        &path,
        r#"[
  {
    "name": "bad-tail",
    "space": { "kind": "ell1" },
    "task": "gateaux",
    "function": { "kind": "limsup" },
    "point": { "prefix": [], "tail": { "kind": "cubic", "c": 1.0 } }
  }
]"#,
    )
    .unwrap();
    let out = seqcert(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    let err = stderr(&out);
    assert!(err.contains("[0].point.tail"), "{err}");
    assert!(err.contains("line 7"), "{err}");

    let out = seqcert(&["run", "no-such-builtin-or-file"]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
}

#[test]
fn json_reports_are_deterministic_and_follow_the_schema() {
    let a = scratch("a.json");
    let b = scratch("b.json");
    for path in [&a, &b] {
        let out = seqcert(&["run", "example5", "--json", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(EXIT_MATCH));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);

    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(docs().join("report.schema.json")).unwrap())
            .unwrap();
    let allowed: BTreeSet<&str> = schema["$defs"]["report"]["properties"]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    let report: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    for r in report["reports"].as_array().unwrap() {
        for key in r.as_object().unwrap().keys() {
            assert!(
                allowed.contains(key.as_str()),
                "undocumented report field {key}"
            );
        }
    }
}

#[test]
fn overrides_reach_the_report() {
    let out = seqcert(&["run", "example3", "--coords", "8", "--oracle-k", "1,3"]);
    assert_eq!(out.status.code(), Some(EXIT_MATCH), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("oracle k = 3"), "{text}");
    assert!(!text.contains("oracle k = 8"), "{text}");
}
