//! Exit-code and console contract of the command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stegscan"))
}

fn work_dir(tag: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(tag);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn hashdb_build_verify_and_tamper_exit_codes() {
    let dir = work_dir("cli-hashdb");
    let src = dir.join("src");
    fs::create_dir(&src).unwrap();
    fs::write(src.join("a.bin"), b"alpha").unwrap();
    fs::write(src.join("b.bin"), b"beta").unwrap();
    let db = dir.join("hashes.db");
    let db_str = db.to_str().unwrap();
    let src_str = src.to_str().unwrap();

    let out = run(&["hashdb", "build", "--source", src_str, "--db", db_str]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    // Untouched directory verifies clean.
    let out = run(&["hashdb", "verify", "--source", src_str, "--db", db_str]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().all(|l| l.starts_with("match\t")));

    // Tampering one file yields exit 1 and exactly one mismatch line.
    fs::write(src.join("b.bin"), b"betA").unwrap();
    let out = run(&["hashdb", "verify", "--source", src_str, "--db", db_str]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let mismatches: Vec<&str> = text.lines().filter(|l| l.starts_with("mismatch\t")).collect();
    assert_eq!(mismatches, ["mismatch\tb.bin"]);

    // Missing source directory is an operational error.
    let out = run(&["hashdb", "build", "--source", dir.join("nope").to_str().unwrap(), "--db", db_str]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_scan_extract_eval_flow() {
    let dir = work_dir("cli-flow");
    let corpus = dir.join("corpus");
    let scan = dir.join("scan");

    let out = run(&[
        "gen",
        "--out",
        corpus.to_str().unwrap(),
        "--files",
        "8",
        "--min-duration",
        "2",
        "--max-duration",
        "6",
        "--seed",
        "21",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(corpus.join("manifest.csv").exists());

    let out = run(&[
        "scan",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        scan.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(scan.join("reports.csv").exists());
    assert!(scan.join("original_copy").is_dir());

    let out = run(&["extract", "--scan", scan.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(scan.join("extraction_log.csv").exists());

    let out = run(&[
        "eval",
        "--manifest",
        corpus.join("manifest.csv").to_str().unwrap(),
        "--scan",
        scan.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("wav:"), "{text}");
    assert!(text.contains("mp3:"), "{text}");

    // The eval run directory holds the named CSV interface files.
    let eval_dir = fs::read_dir(&scan)
        .unwrap()
        .filter_map(|e| e.ok())
        .find(|e| e.file_name().to_string_lossy().starts_with("eval_"))
        .expect("eval dir");
    for file in ["detections_wav.csv", "detections_mp3.csv", "fn_distribution.csv"] {
        assert!(eval_dir.path().join(file).exists(), "{file} missing");
    }
}

#[test]
fn eval_with_wrong_manifest_is_operational_error() {
    let dir = work_dir("cli-badeval");
    let corpus = dir.join("corpus");
    let other = dir.join("other");
    let scan = dir.join("scan");
    // Different file counts produce manifests whose entries cannot all be
    // matched to the scan's reports.
    for (out_dir, files) in [(&corpus, "4"), (&other, "6")] {
        let st = run(&[
            "gen",
            "--out",
            out_dir.to_str().unwrap(),
            "--files",
            files,
            "--min-duration",
            "2",
            "--max-duration",
            "4",
            "--seed",
            "1",
        ]);
        assert_eq!(st.status.code(), Some(0));
    }
    let st = run(&[
        "scan",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        scan.to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(0));

    // Scoring against a manifest from a different corpus cannot line up.
    let st = run(&[
        "eval",
        "--manifest",
        other.join("manifest.csv").to_str().unwrap(),
        "--scan",
        scan.to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("manifest"));
}

#[test]
fn scan_never_writes_into_the_input_directory() {
    let dir = work_dir("cli-readonly");
    let corpus = dir.join("corpus");
    let st = run(&[
        "gen", "--out", corpus.to_str().unwrap(), "--files", "4",
        "--min-duration", "2", "--max-duration", "4", "--seed", "3",
    ]);
    assert_eq!(st.status.code(), Some(0));
    let names_before: Vec<String> = fs::read_dir(&corpus)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();

    let st = run(&[
        "scan",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        dir.join("scan").to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(0));

    let names_after: Vec<String> = fs::read_dir(&corpus)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    let mut before_sorted = names_before.clone();
    let mut after_sorted = names_after.clone();
    before_sorted.sort();
    after_sorted.sort();
    assert_eq!(before_sorted, after_sorted);
}

#[test]
fn threshold_overrides_are_validated() {
    let dir = work_dir("cli-thresholds");
    let corpus = dir.join("corpus");
    let st = run(&[
        "gen", "--out", corpus.to_str().unwrap(), "--files", "4",
        "--min-duration", "2", "--max-duration", "4", "--seed", "4",
    ]);
    assert_eq!(st.status.code(), Some(0));

    let st = run(&[
        "scan",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        dir.join("scan").to_str().unwrap(),
        "--threshold",
        "no_such_knob=1",
    ]);
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("unknown threshold"));
}
