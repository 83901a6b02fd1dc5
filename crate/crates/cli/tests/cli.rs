use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_direction-space"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn tree_shift_scale_is_two() {
    let out = run(&["scale", "tree:3", "shift:1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["result"]["value"], 2);
    assert_eq!(v["profile"]["power_bound"], 40);
    assert!(v["version"].is_string());
}

#[test]
fn example_inverse_delta_is_exactly_two() {
    let v = json(&run(&["delta", "example:2", "a", "a-inverse"]));
    assert_eq!(v["result"]["delta"].as_f64(), Some(2.0));
    assert_eq!(v["result"]["verdict"], "distinct");
}

#[test]
fn identity_is_elliptic() {
    let v = json(&run(&["classify", "tree:3", "identity"]));
    assert_eq!(v["result"]["kind"], "Elliptic");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "directions",
        "example:2",
        "a",
        "a^2",
        "a-inverse",
        "--seed",
        "3",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn computation_errors_exit_one_with_error_json() {
    let out = run(&["classify", "tree:3", "bogus:1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "ParseError");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["scale", "tree:3"]).status.code(), Some(2));
    assert_eq!(
        run(&["--power-bound", "2", "scale", "tree:3", "shift:1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn csv_rows_for_delta() {
    let out = run(&[
        "--csv",
        "delta",
        "example:2",
        "a",
        "a-inverse",
        "--power-bound",
        "4",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "direction,n,k,index,value,slack");
    assert_eq!(lines.len(), 1 + 2 * 4);
}

#[test]
fn shortlex_axis_reports_diagnostics() {
    let v = json(&run(&[
        "axis",
        "tree:3",
        "shift:1",
        "--shortlex",
        "--color-seed",
        "2",
    ]));
    assert!(v["result"]["length"].as_u64().unwrap() >= 17);
    assert!(v["result"]["shortlex"].is_object());
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["hyperbolicity", "tree:3", "--radius", "3"];
    let capped = Command::new(env!("CARGO_BIN_EXE_direction-space"))
        .args(args)
        .env("DIRECTION_SPACE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(capped.stdout, run(&args).stdout);
}

#[test]
fn verify_single_criterion() {
    let out = run(&["verify", "3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"]["passed"], 1);
}
