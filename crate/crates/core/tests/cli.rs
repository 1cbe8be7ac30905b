// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use std::process::{Command, Output};

use regex::Regex;

fn demo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cq-demo"))
        .args(args)
        .env_remove("CQ_SEED")
        .env_remove("CQ_VERBOSITY")
        .output()
        .expect("cq-demo runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn qft_prints_ten_shots_of_ten_bits() {
    let out = demo(&["qft", "--seed", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[0], "Running QFT circuit on quantum device.");
    assert_eq!(lines[1], "Reporting measurement outcomes:");
    let re = Regex::new(r"^Shot \[\d\]:( [01]){10}$").unwrap();
    for l in &lines[2..] {
        assert!(re.is_match(l), "{l}");
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    for args in [
        &["qft", "--seed", "42"][..],
        &["qft", "--seed", "42", "--async"][..],
        &["bell", "--seed", "42", "--shots", "500"][..],
        &[
            "maxcut", "--graph", "triangle", "--seed", "42", "--shots", "50",
        ][..],
    ] {
        let a = demo(args);
        let b = demo(args);
        assert!(
            a.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    // sync and async paths agree for the same seed
    assert_eq!(
        demo(&["qft", "--seed", "9"]).stdout,
        demo(&["qft", "--seed", "9", "--async"]).stdout
    );
}

#[test]
fn env_seed_is_honoured() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cq-demo"))
            .args(["qft", "--qubits", "4"])
            .env("CQ_SEED", "77")
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn rabi_and_bell_succeed() {
    let out = demo(&["rabi", "--seed", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("Max deviation"));
    let out = demo(&["bell", "--seed", "1", "--shots", "1000"]);
    assert!(out.status.success());
}

#[test]
fn bad_input_exits_non_zero() {
    for args in [
        &["maxcut", "--graph", "petersen"][..],
        &["qft", "--qubits", "0"][..],
        &["qft", "--qubits", "40"][..],
        &["qft", "--shots", "0"][..],
        &["nope"][..],
    ] {
        let out = demo(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    let out = demo(&["maxcut", "--graph", "petersen"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("cq-demo: error:"));
}

#[test]
fn config_file_is_applied() {
    let dir = std::env::temp_dir().join(format!("cq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.cfg");
    std::fs::write(&good, "# device\nmax_channels 4\n").unwrap();
    assert!(
        demo(&["rabi", "--seed", "1", "--config", good.to_str().unwrap()])
            .status
            .success()
    );
    let bad = dir.join("bad.cfg");
    std::fs::write(&bad, "max_channels -3\n").unwrap();
    assert!(!demo(&["rabi", "--config", bad.to_str().unwrap()])
        .status
        .success());
    let _ = std::fs::remove_dir_all(dir);
}
