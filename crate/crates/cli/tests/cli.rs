use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn data(name: &str) -> String {
    root().join("tests/data").join(name).display().to_string()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(root().join("tests/golden").join(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patchwork")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Checks a value against the flat object schema used for reports.
fn validate(schema: &Value, v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("not an object")?;
    let props = schema["properties"].as_object().unwrap();
    for key in schema["required"].as_array().unwrap() {
        if !obj.contains_key(key.as_str().unwrap()) {
            return Err(format!("missing {key}"));
        }
    }
    for (k, val) in obj {
        let prop = props.get(k).ok_or(format!("unexpected {k}"))?;
        let ok = match prop["type"].as_str().unwrap() {
            "string" => val.is_string(),
            "integer" => val.as_u64().is_some(),
            "array" => val
                .as_array()
                .is_some_and(|items| items.iter().all(|i| i.is_string())),
            other => return Err(format!("schema type {other}")),
        };
        if !ok {
            return Err(format!("{k} has the wrong type"));
        }
    }
    Ok(())
}

#[test]
fn space_report_matches_golden() {
    let o = run(&["space", "report", &data("sierpinski.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out, golden("space_report_sierpinski.txt"));
    assert!(out.contains("opens              3"));
    assert!(out.contains("discrete 2"));
    let o = run(&["space", "report", "--json", &data("sierpinski.json")]);
    assert_eq!(stdout(&o), golden("space_report_sierpinski.json"));
}

#[test]
fn constructions_match_goldens() {
    for (args, file) in [
        (vec!["frame", "nuclei", "chain3.json"], "frame_nuclei_chain3.txt"),
        (vec!["render", "poset", "vee.json"], "render_poset_vee.dot"),
        (vec!["tower", "threads", "cantor2.json"], "tower_threads_cantor2.txt"),
        (vec!["space", "onepoint", "--upset-opens", "sierpinski.json"], "onepoint_upset_sierpinski.txt"),
    ] {
        let mut args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let last = args.pop().unwrap();
        args.push(data(&last));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = run(&refs);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert_eq!(stdout(&o), golden(file), "{args:?}");
    }
}

#[test]
fn k0_descent_passes_and_report_validates() {
    let o = run(&["verify", "k0-descent", "--max-size", "4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("schema/report.schema.json")).unwrap()).unwrap();
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate(&schema, &report).unwrap();
    assert_eq!(report["suite"], "k0-descent");
    assert!(report["cases"].as_u64().unwrap() > 0);
}

#[test]
fn every_suite_report_validates() {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("schema/report.schema.json")).unwrap()).unwrap();
    for suite in ["birkhoff", "booleanization", "hofmann-mislove", "escardo", "second-iso", "one-point", "recollement",
        "cosheaf", "main-theorem", "verdier", "nisnevich", "sierpinski"]
    {
        let o = run(&["verify", suite, "--max-size", "3", "--depth", "2", "--json"]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", stderr(&o));
        validate(&schema, &serde_json::from_str(&stdout(&o)).unwrap()).unwrap();
    }
    let o = run(&["verify", "main-theorem", &data("cantor2.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    validate(&schema, &serde_json::from_str(&stdout(&o)).unwrap()).unwrap();
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["verify", "recollement", "--max-size", "3", "--seed", "7", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cube_check_verdicts() {
    let o = run(&["cube", "check", &data("good_cube.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cartesian true"));
    let o = run(&["cube", "check", &data("bad_cube.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not functorial"));
}

#[test]
fn input_errors_exit_two_with_position() {
    let o = run(&["space", "report", &data("malformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed.json:3:"), "{}", stderr(&o));
    let o = run(&["space", "report", &data("missing.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "k0-descent", "--max-size", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}
