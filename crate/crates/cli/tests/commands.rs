use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bunkbed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bunkbed")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = bunkbed(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap_or_else(|| panic!("no output for {args:?}"));
    (serde_json::from_str(last).unwrap(), out.status.code().unwrap())
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn gadget_kernel_with_oracle() {
    let (rec, code) = json(&["gadget-kernel", "-n", "2", "-p", "1/2", "--oracle"]);
    assert_eq!(code, 0);
    let k = &rec["result"]["kernel"];
    assert_eq!(k["abc"], "1/2");
    for part in ["ab|c", "ac|b", "a|bc", "a|b|c"] {
        assert_eq!(k[part], "1/8");
    }
    assert_eq!(rec["result"]["oracle"], "OK");
}

#[test]
fn gadget_kernel_margin_and_rejection() {
    let (rec, code) = json(&["gadget-kernel", "-n", "1204", "-p", "1/2", "--check-390"]);
    assert_eq!((code, &rec["result"]["check_390"]), (0, &Value::Bool(true)));
    assert_eq!(bunkbed(&["gadget-kernel", "-n", "1", "-p", "1/2"]).status.code(), Some(2));
    assert_eq!(bunkbed(&["gadget-kernel", "-n", "3", "-p", "3/2"]).status.code(), Some(2));
    assert_eq!(bunkbed(&["gadget-kernel", "-n", "3"]).status.code(), Some(2));
}

#[test]
fn hollom_check_passes() {
    let (rec, code) = json(&["hollom-check"]);
    assert_eq!(code, 0);
    let r = &rec["result"];
    assert_eq!((&r["p_same"], &r["p_cross"]), (&Value::from("3/16"), &Value::from("13/64")));
    assert_eq!((&r["p_same_64"], &r["p_cross_64"]), (&Value::from("12/64"), &Value::from("13/64")));
    let text = String::from_utf8(bunkbed(&["hollom-check"]).stdout).unwrap();
    assert!(text.contains("PASS") && text.contains("3/16"));
}

#[test]
fn counterexample_small_instance() {
    let (rec, code) = json(&["counterexample", "-n", "14", "-p", "1/2", "--mode", "exact"]);
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["sign"], "negative");
    let log = rec["result"]["log10_abs_gap"].as_f64().unwrap();
    assert!((-48.0..=-46.0).contains(&log), "{log}");
}

#[test]
fn counterexample_interval_mode() {
    let (rec, code) = json(&["counterexample", "-n", "20", "-p", "1/2", "--mode", "interval", "--bits", "64"]);
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["sign"], "negative");
    assert!(rec["result"]["precision_bits"].as_u64().unwrap() >= 64);
    assert!(rec["result"]["gap"]["lo"].is_string());
}

#[test]
fn gap_exact_and_sampled() {
    let k2 = scratch("k2.txt", "2 1\n0 1 1/2\n");
    let (rec, code) = json(&["gap", "--graph", k2.to_str().unwrap(), "--transversal", "0", "--poles", "0", "1"]);
    assert_eq!((code, &rec["result"]["gap"]), (0, &Value::from("0/1")));

    let (rec, _) = json(&["gap", "--graph6", "C~", "--transversal", "0", "--poles", "1", "2", "-p", "1/2"]);
    assert_eq!(rec["result"]["gap"], "3/16");
    assert_eq!(rec["result"]["work"], 1 << 12);

    let args = ["gap", "--graph6", "C~", "--transversal", "0", "--poles", "1", "2", "--method", "mc", "--seed", "7"];
    let (a, _) = json(&args);
    let (b, _) = json(&args);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["inputs"], b["inputs"]);
}

#[test]
fn gap_cap_suggests_sampling() {
    let out = bunkbed(&["gap", "--graph6", "G~~~~{", "--poles", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("--method mc"));
}

#[test]
fn batch_scan_streams_and_survives_bad_lines() {
    let file = scratch("scan.g6", "A_\nnot graph6 !\nBw\n");
    let out = bunkbed(&["--json", "batch-scan", "--graph6-file", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Value> = stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["event"], "parse-error");
    let summary = &lines.last().unwrap()["result"];
    assert_eq!(summary["graphs"], 2);
    assert_eq!(summary["violations"], 0);
    assert_eq!(summary["parse_errors"], 1);

    let single = scratch("single.g6", "A_\n");
    let (rec, code) = json(&["batch-scan", "--graph6-file", single.to_str().unwrap()]);
    assert_eq!((code, &rec["result"]["graphs"]), (0, &Value::from(1)));
    assert_eq!(rec["result"]["min_gap"], "0/1");
}

#[test]
fn batch_scan_writes_out_file() {
    let file = scratch("out_src.g6", "Bw\nCF\n");
    let out = scratch("out.jsonl", "");
    let code = bunkbed(&[
        "batch-scan",
        "--graph6-file",
        file.to_str().unwrap(),
        "--transversal",
        "0",
        "--verbose",
        "--out",
        out.to_str().unwrap(),
    ])
    .status
    .code();
    assert_eq!(code, Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    let instances = text.lines().filter(|l| l.contains("\"event\":\"instance\"")).count();
    assert_eq!(instances, 3 + 6);
}

#[test]
fn complete_bbc_and_clones() {
    let k2 = scratch("k2c.txt", "2 1\n0 1 1/2\n");
    let (rec, code) = json(&["complete-bbc", "--graph", k2.to_str().unwrap(), "--poles", "0", "1"]);
    assert_eq!((code, &rec["result"]["gap"]), (0, &Value::from("1/8")));

    let (rec, code) = json(&["clone-build", "--k", "102"]);
    assert_eq!(code, 0);
    assert_eq!(rec["result"]["edges"], 15654);
    assert_eq!(rec["result"]["published"]["vertices"], 7523);

    let out = scratch("clone1.txt", "");
    let (rec, _) = json(&["clone-build", "--k", "1", "--out", out.to_str().unwrap()]);
    assert_eq!((&rec["result"]["vertices"], &rec["result"]["edges"]), (&Value::from(7222), &Value::from(14442)));
    assert!(std::fs::read_to_string(out).unwrap().starts_with("7222 14442\n"));
}

#[test]
fn records_round_trip() {
    let out = bunkbed(&["--json", "gadget-kernel", "-n", "3", "-p", "2/3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.trim_end();
    let value: Value = serde_json::from_str(line).unwrap();
    assert_eq!(serde_json::to_string(&value).unwrap(), line);
    let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "inputs", "result", "versions", "wall_time"]);
}

#[test]
fn verify_paper_single_criterion() {
    let out = bunkbed(&["verify-paper", "--criterion", "1", "--criterion", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] criterion  1") && text.contains("2 of 2 criteria pass"));
    assert_eq!(bunkbed(&["verify-paper", "--criterion", "12"]).status.code(), Some(2));
}
