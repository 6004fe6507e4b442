//! End-to-end behaviour of the `opcrit` binary.

use std::process::{Command, Output};

fn opcrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcrit"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(opcrit(&["pc"]).status.code(), Some(0));
    assert_eq!(opcrit(&["--help"]).status.code(), Some(0));
    assert_eq!(opcrit(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(opcrit(&["pc", "--order", "9"]).status.code(), Some(4));
    assert_eq!(
        opcrit(&["oracle", "--d", "1", "--T", "2", "--event", "double((o,2)"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        opcrit(&["oracle", "--d", "8", "--T", "4", "--event", "double((o,4))"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn output_is_byte_stable() {
    let a = opcrit(&["reproduce"]);
    let b = opcrit(&["reproduce"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    assert_eq!(doc["manifest"]["command"], "reproduce");
    assert_eq!(doc["manifest"]["timestamp"], 0);
}

#[test]
fn simulation_rows_ignore_thread_count() {
    let args = [
        "simulate",
        "--d",
        "2",
        "--p",
        "1",
        "--T",
        "4",
        "--replicas",
        "3000",
        "--seed",
        "5",
        "--stat",
        "pi0",
    ];
    let rows = |threads: &str| {
        let mut full = args.to_vec();
        full.extend(["--threads", threads]);
        let out = opcrit(&full);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with("# {"));
        text.lines().skip(1).map(str::to_string).collect::<Vec<_>>()
    };
    let one = rows("1");
    assert!(one.len() > 1);
    assert_eq!(one, rows("3"));
}

#[test]
fn fault_injection_names_the_first_failure() {
    let out = opcrit(&["verify", "--fault-inject"]);
    assert_eq!(out.status.code(), Some(2));
    let text =
        String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("walk:"), "{text}");
}

#[test]
fn recomputed_mode_reports_its_deviation() {
    let out = opcrit(&["reproduce", "--mode", "recomputed"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let series: Vec<&str> = doc["result"]["pc_series"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(series, ["1", "0", "1", "7/2", "133/8"]);
    assert!(doc["result"]["deviations"]
        .to_string()
        .contains("pi0_origin_inputs"));
}

#[test]
fn oracle_prints_polynomial() {
    let out = opcrit(&[
        "oracle",
        "--d",
        "1",
        "--T",
        "2",
        "--event",
        "double((o,2))",
        "--p",
        "1",
        "--poly",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["result"]["probability"], "1/16");
}
