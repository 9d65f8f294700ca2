// Copyright 2026 the wheelbks developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! End-to-end tests of the `wheelbks` binary: payload correctness against
//! the library, determinism, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

use wheelbks::analysis::{propagate, sig6, DataSetTable, PropagationConfig};
use wheelbks::interfsim::{reference_config, run_pipeline};
use wheelbks::qalg::SpinState;
use wheelbks::weakval::witness_c;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wheelbks"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "wheelbks {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn exit_codes_classify_failures() {
    let cases: [(&[&str], i32); 8] = [
        (&["--help"], 0),
        (&["--version"], 0),
        (&["no-such-command"], 1),
        (&["wheel-build", "--n", "4"], 1),
        (&["weak-value", "--n", "5", "--j", "16"], 1),
        (
            &["witness", "--n", "5", "--method", "monte-carlo", "--samples", "10"],
            1,
        ),
        (&["wheel-verify"], 1),
        (&["extract", "--data", "/nonexistent/bundle.json"], 2),
    ];
    for (args, want) in cases {
        let out = bin().args(args).output().expect("binary runs");
        assert_eq!(
            out.status.code(),
            Some(want),
            "wheelbks {:?}: stderr {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn witness_csv_matches_library_propagation() {
    let out = run_ok(&["witness", "--n", "5"]);
    let text = stdout(&out);
    let row = text.lines().nth(1).expect("data row");

    let table = DataSetTable::bundled();
    let subset: Vec<usize> = (1..=5).collect();
    let p = propagate(
        |zw| witness_c(5, zw).expect("five spins"),
        &table,
        &subset,
        &PropagationConfig::default(),
    )
    .expect("propagation succeeds");
    let want = format!(
        "5,{},{},{},{}",
        sig6(p.value.re),
        sig6(p.sigma_re),
        sig6(p.value.im),
        sig6(p.sigma_im)
    );
    assert_eq!(row, want);
}

#[test]
fn ideal_quantities_print_closed_forms() {
    let w = run_ok(&["witness", "--n", "5", "--ideal"]);
    assert_eq!(stdout(&w).lines().nth(1), Some("5,-3,0,0,0"));

    let p = run_ok(&["weak-value", "--n", "5", "--j", "0", "--ideal"]);
    assert_eq!(stdout(&p).lines().nth(1), Some("5,0,-0.25,0,0,0"));
}

#[test]
fn simulate_is_deterministic_and_extract_round_trips() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path_a = dir.path().join("a.json");
    let path_b = dir.path().join("b.json");
    let arg = |p: &Path| p.to_str().expect("utf-8 path").to_owned();

    run_ok(&["simulate", "--seed", "11", "--out", &arg(&path_a)]);
    run_ok(&["simulate", "--seed", "11", "--out", &arg(&path_b)]);
    let bytes_a = std::fs::read(&path_a).expect("bundle a");
    assert_eq!(bytes_a, std::fs::read(&path_b).expect("bundle b"));

    let out = run_ok(&["extract", "--data", &arg(&path_a)]);
    let row = stdout(&out).lines().nth(1).expect("data row").to_owned();

    let mut cfg = reference_config(11);
    cfg.subtract_orthogonal_bg = true;
    let result = run_pipeline(&cfg, &SpinState::plus_x(), &SpinState::plus_y())
        .expect("pipeline runs");
    let m = result.measured;
    let want = format!(
        "{},{},{},{}",
        sig6(m.re),
        sig6(m.re_sigma),
        sig6(m.im),
        sig6(m.im_sigma)
    );
    assert_eq!(row, want);
}

#[test]
fn reproduce_prints_headline_and_writes_report() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = run_ok(&[
        "reproduce",
        "--out",
        dir.path().to_str().expect("utf-8 path"),
    ]);
    let text = stdout(&out);
    assert!(
        text.contains("N=5: C=-2.85±0.41 (7.0σ)"),
        "headline missing from:\n{}",
        text
    );
    for name in [
        "report.csv",
        "report.json",
        "fig1_pairs.csv",
        "fig3a.svg",
        "fig3b.svg",
        "fig3c.svg",
        "fig3d.svg",
    ] {
        assert!(dir.path().join(name).is_file(), "missing {}", name);
    }
}

#[test]
fn data_dir_env_overrides_bundled_table() {
    let dir = tempfile::tempdir().expect("tempdir");
    // Shift set 1 so the witness moves measurably.
    let tweaked = DataSetTable::bundled()
        .to_csv()
        .replacen("1,-0.024,", "1,0.4,", 1);
    std::fs::write(dir.path().join("single_spin_zw.csv"), &tweaked).expect("write table");

    let run = |env: bool| -> String {
        let mut cmd = bin();
        cmd.args(["witness", "--n", "3", "--format", "json"]);
        if env {
            cmd.env("WHEEL_DATA_DIR", dir.path());
        } else {
            cmd.env_remove("WHEEL_DATA_DIR");
        }
        let out = cmd.output().expect("binary runs");
        assert!(out.status.success());
        String::from_utf8(out.stdout).expect("utf-8 stdout")
    };

    let bundled = run(false);
    let external = run(true);
    assert!(bundled.contains("\"data\": \"bundled\""), "{}", bundled);
    assert!(
        external.contains("single_spin_zw.csv"),
        "expected the override path in {}",
        external
    );
    assert_ne!(bundled, external);
}

#[test]
fn wheel_verify_flags_a_corrupted_set() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("wheel.json");
    run_ok(&[
        "wheel-build",
        "--n",
        "3",
        "--out",
        path.to_str().expect("utf-8 path"),
    ]);

    let text = std::fs::read_to_string(&path).expect("set json");
    let corrupted = text.replacen("\"+ZZI\"", "\"-ZZI\"", 1);
    assert_ne!(text, corrupted);
    std::fs::write(&path, corrupted).expect("write corrupted set");

    let out = bin()
        .args(["wheel-verify", "--data", path.to_str().expect("utf-8 path")])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("MISMATCH"));
}

#[test]
fn nchv_prove_reports_certificate_and_scan() {
    let out = run_ok(&["nchv-prove", "--n", "3"]);
    let text = stdout(&out);
    assert!(text.starts_with("INCONSISTENT\n"), "{}", text);
    assert_eq!(text.matches("certificate,").count(), 6);
    assert!(
        text.contains("exhaustive,0 of 512 assignments satisfy all contexts"),
        "{}",
        text
    );
    assert!(text.contains("max simultaneous 5 of 6"), "{}", text);

    // Above the exhaustive cap only the algebraic proof runs.
    let big = run_ok(&["nchv-prove", "--n", "7"]);
    assert!(!stdout(&big).contains("exhaustive"));
}
