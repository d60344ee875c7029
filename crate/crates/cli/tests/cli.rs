//! End-to-end runs of the `steffensen` binary.

use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_steffensen"))
}

#[test]
fn fabricate_then_reverse() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |c: &mut Command| {
        let out = c.output().unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    };
    ok(bin()
        .args(["pattern", "--size", "32", "--out"])
        .arg(d.join("truth.png")));
    ok(bin()
        .args(["filter", "--filter", "box:r=1", "--input"])
        .arg(d.join("truth.png"))
        .arg("--out")
        .arg(d.join("obs.pgm")));
    let stdout = ok(bin()
        .args([
            "run", "--filter", "box:r=1", "--method", "C3", "--mu", "cheby", "--accel", "afm",
            "--iters", "20",
        ])
        .arg("--input")
        .arg(d.join("obs.pgm"))
        .arg("--reference")
        .arg(d.join("truth.png"))
        .arg("--out")
        .arg(d.join("run")));
    assert!(stdout.contains("C3 mu=cheby accel=afm"));
    // 8-bit quantization noise can make the box inverse diverge; either way
    // the trace holds one row per recorded iteration
    let records = match stdout.split("diverged at ").nth(1) {
        Some(rest) => rest
            .split(',')
            .next()
            .unwrap()
            .trim()
            .parse::<usize>()
            .unwrap(),
        None => 20,
    };
    let trace = fs::read_to_string(d.join("run/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + records);
    assert!(d.join("run/recovered.pgm").exists());
}

#[test]
fn sweep_with_builtin_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "sweep",
            "--filter",
            "gaussian:sigma=1@10",
            "--method",
            "A1,T",
            "--mu",
            "1,ed2",
            "--accel",
            "none",
            "--no-images",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary = fs::read_to_string(dir.path().join("gaussian_sigma_1/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert!(dir.path().join("pattern.pgm").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |c: &mut Command| c.output().unwrap().status.code();
    assert_eq!(code(bin().arg("--help")), Some(0));
    assert_eq!(code(bin().arg("frobnicate")), Some(1));
    assert_eq!(code(bin().args(["run", "--filter", "box:r=1"])), Some(1));
    assert_eq!(
        code(
            bin()
                .args(["run", "--filter", "box:r=1", "--input"])
                .arg(dir.path().join("none.pgm"))
        ),
        Some(2)
    );
    fs::write(dir.path().join("t.pgm"), b"P5\n2 2\n255\n\x00\x10\x20\x30").unwrap();
    for bad in [
        vec!["--filter", "box:r=0"],
        vec!["--filter", "box:r=1", "--method", "Z9"],
        vec!["--filter", "box:r=1", "--mu", "warp"],
        vec!["--filter", "box:r=1", "--accel", "rocket"],
        vec!["--filter", "box:r=1", "--iters", "0"],
        vec!["--filter", "box:r=1", "--tau", "0"],
    ] {
        let mut c = bin();
        c.arg("run")
            .args(&bad)
            .arg("--input")
            .arg(dir.path().join("t.pgm"))
            .arg("--out")
            .arg(dir.path().join("o"));
        assert_eq!(code(&mut c), Some(1), "{bad:?}");
    }
}
