//! End-to-end tests of the alab binary: exit codes, flag parsing, report
//! determinism across execution shapes, ladder output, and the selfcheck
//! paths.

use std::path::Path;
use std::process::{Command, Output};

use aliquot_lab::report::{read_report, ReportFormat, RunManifest};

fn alab(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_alab"));
    cmd.args(args)
        .env_remove("ALAB_THREADS")
        .env_remove("ALAB_TEST_CORRUPT_SIEVE");
    cmd
}

fn run(args: &[&str]) -> Output {
    alab(args).output().expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = stdout_of(&help);
    for name in [
        "conjecture",
        "kfree-density",
        "small-divisors",
        "gcd-smooth",
        "close-pairs",
        "wirsing",
        "pomerance",
        "exceptional",
        "divisor-tail",
        "ladder",
        "selfcheck",
    ] {
        assert!(text.contains(name), "--help does not mention {name}");
    }
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn unknown_flags_and_subcommands_exit_one() {
    let out = run(&["conjecture", "--x", "1e4", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
}

#[test]
fn x_below_the_iterated_log_floor_exits_one() {
    let out = run(&["gcd-smooth", "--x", "99"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(
        err.contains("x >= 100"),
        "error should name the iterated-log floor, got: {err}"
    );
}

#[test]
fn scientific_notation_is_parsed_exactly() {
    let out = run(&["kfree-density", "--x", "2.5e3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["x"], 2_500);
    // fractional values must be rejected, not rounded
    let bad = run(&["kfree-density", "--x", "2.55e1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr_of(&bad).contains("not an integer"));
}

#[test]
fn pomerance_rejects_a_noncoprime_class() {
    let out = run(&["pomerance", "--x", "1e4", "--a", "2", "--m", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_across_execution_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let mut baselines: Vec<(String, Vec<u8>)> = Vec::new();
    for (i, extra) in [
        &["--threads", "1", "--segment-size", "4096"][..],
        &["--threads", "3", "--segment-size", "7777"],
        &[],
    ]
    .iter()
    .enumerate()
    {
        for format in ["json", "csv"] {
            let path = dir.path().join(format!("run{i}.{format}"));
            let path_str = path.to_str().unwrap().to_string();
            let mut args = vec![
                "conjecture",
                "--x",
                "2e4",
                "--k",
                "4",
                "--format",
                format,
                "--out",
                &path_str,
            ];
            args.extend_from_slice(extra);
            let mut cmd = alab(&args);
            if extra.is_empty() {
                // third shape: thread count injected through the environment
                cmd.env("ALAB_THREADS", "2");
            }
            let out = cmd.output().unwrap();
            assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
            let bytes = std::fs::read(&path).unwrap();
            match baselines.iter().find(|(f, _)| f == format) {
                None => baselines.push((format.to_string(), bytes)),
                Some((_, first)) => assert_eq!(
                    &bytes, first,
                    "{format} report differs under shape {i}"
                ),
            }
        }
    }
}

#[test]
fn manifests_record_the_resolved_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exc.json");
    let path_str = path.to_str().unwrap();

    let out = alab(&["exceptional", "--x", "1e4", "--out", path_str, "--threads", "1"])
        .env("ALAB_THREADS", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let manifest_path = format!("{path_str}.manifest.json");
    let manifest = RunManifest::read(Path::new(&manifest_path)).unwrap();
    assert_eq!(manifest.thread_count, 1, "flag should beat ALAB_THREADS");
    assert_eq!(manifest.files.len(), 1);
    assert!(manifest.verify_files().is_empty(), "digest should match the file");

    let out = alab(&["exceptional", "--x", "1e4", "--out", path_str])
        .env("ALAB_THREADS", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let manifest = RunManifest::read(Path::new(&manifest_path)).unwrap();
    assert_eq!(manifest.thread_count, 5, "ALAB_THREADS should apply without the flag");
}

#[test]
fn written_reports_read_back_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    for (format, name) in [(ReportFormat::Json, "json"), (ReportFormat::Csv, "csv")] {
        let path = dir.path().join(format!("sd.{name}"));
        let out = run(&[
            "small-divisors",
            "--x",
            "1e4",
            "--format",
            name,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
        let report = read_report(&path, format).unwrap();
        assert_eq!(report.statistic, "small-divisors");
        assert_eq!(report.x, 10_000);
        assert!(report.counts.contains_key("count_divisible"));
    }
}

#[test]
fn ladder_writes_plot_data_with_one_row_per_x() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ladder.dat");
    let out = run(&[
        "ladder",
        "--stat",
        "kfree-density",
        "--k",
        "2",
        "--x",
        "1e3,2e3,4e3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# statistic: kfree-density"));
    assert!(lines[2].starts_with("# columns: x "));
    let rows: Vec<&str> = lines.iter().filter(|l| !l.starts_with('#')).copied().collect();
    assert_eq!(rows.len(), 3);
    for (row, x) in rows.iter().zip(["1000", "2000", "4000"]) {
        assert_eq!(row.split_whitespace().next(), Some(x));
    }
    // a manifest sits next to the plot file
    let manifest_path = format!("{}.manifest.json", path.display());
    assert!(Path::new(&manifest_path).exists());

    let bad = run(&[
        "ladder",
        "--stat",
        "kfree-density",
        "--x",
        "2e3,1e3",
        "--out",
        dir.path().join("bad.dat").to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1), "non-increasing x must fail");
    let unknown = run(&[
        "ladder",
        "--stat",
        "frobnicate",
        "--x",
        "1e3",
        "--out",
        dir.path().join("u.dat").to_str().unwrap(),
    ]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(stderr_of(&unknown).contains("kfree-density"), "error should list statistics");
}

#[test]
fn selfcheck_passes_clean_and_fails_when_corrupted() {
    let ok = run(&["selfcheck", "--segment-size", "1613"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr_of(&ok));
    let text = stdout_of(&ok);
    assert!(text.contains("selfcheck: 12 statistics match"), "{text}");

    let corrupted = alab(&["selfcheck"])
        .env("ALAB_TEST_CORRUPT_SIEVE", "1")
        .output()
        .unwrap();
    assert_eq!(corrupted.status.code(), Some(2), "corrupted run must exit 2");
    assert!(stdout_of(&corrupted).contains("MISMATCH"));
}
