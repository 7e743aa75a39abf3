use std::process::{Command, Output};

fn tateshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tateshift"))
        .args(args)
        .env_remove("TATESHIFT_MAX_DIM")
        .output()
        .expect("run tateshift")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

#[test]
fn shifts_table_at_three() {
    let out = tateshift(&["shifts", "--prime", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = |name: &str| {
        text.lines()
            .find(|l| l.split_whitespace().next() == Some(name))
            .unwrap_or_else(|| panic!("no row for {name} in\n{text}"))
            .split_whitespace()
            .nth(2)
            .unwrap()
            .to_string()
    };
    assert_eq!(row("Cp"), "4");
    assert_eq!(row("F"), "22");
    assert_eq!(row("G"), "22");
}

#[test]
fn shifts_json() {
    let out = tateshift(&["shifts", "--prime", "7", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let k: Vec<i64> = v["rows"].as_array().unwrap().iter().map(|r| r["k_i"].as_i64().unwrap()).collect();
    assert_eq!(k, vec![36, 330, 330]);
    assert_eq!(v["rows"][1]["agreement"], serde_json::Value::Bool(true));
}

#[test]
fn det_route_skips_cp() {
    let out = tateshift(&["shifts", "--prime", "5", "--route", "det"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(!text.lines().any(|l| l.starts_with("Cp")));
    assert!(text.contains("116"));
}

#[test]
fn bad_input_exits_two() {
    for args in [
        &["shifts", "--prime", "4"][..],
        &["shifts", "--prime", "2"],
        &["shifts", "--bogus"],
        &["frobnicate"],
        &["chart", "--group", "H"],
        &["chart", "--format", "png"],
        &["chart", "--window", "1:2"],
    ] {
        let out = tateshift(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(tateshift(&["--help"]).status.code(), Some(0));
}

#[test]
fn congruence_suite() {
    let out = tateshift(&["verify", "congruence", "--max-prime", "101"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("25 odd primes"));
}

#[test]
fn cancellation_suite() {
    let out = tateshift(&["verify", "cancellation", "--prime", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches("... ok").count(), 3);
}

#[test]
fn lemma32_single_prime() {
    let out = tateshift(&["verify", "lemma32", "--prime", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("p=3 k=1 degrees<=27"));
}

#[test]
fn dimension_cap_is_an_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_tateshift"))
        .args(["verify", "lemma32", "--prime", "5"])
        .env("TATESHIFT_MAX_DIM", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chart_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chart.svg");
    let args = ["chart", "--group", "F", "--prime", "5", "--format", "svg", "--overlay", "fates"];
    let a = tateshift(&args);
    let b = tateshift(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert_eq!(tateshift(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    assert!(stdout(&a).starts_with("<?xml"));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("chart.txt");
    let out = tateshift(&["chart", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sympow_json() {
    let out = tateshift(&["sympow", "--prime", "3", "--k", "1", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["dim"], 3);
    assert_eq!(v["jordan"], serde_json::json!([3]));
    assert_eq!(v["free"], true);
    assert_eq!(v["tate_even_dim"], 0);
}
