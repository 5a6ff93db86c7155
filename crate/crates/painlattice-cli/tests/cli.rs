//! End-to-end checks of the command-line pipeline: fixture content of the
//! cache files, exit codes, and byte-determinism of the reports.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_painlattice"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn vy_gen_writes_table_fixtures() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let out = tmp.path().join("out");
    let status = bin()
        .args(["vy-gen", "--n", "5"])
        .arg("--cache")
        .arg(&cache)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for k in 0..=5 {
        assert!(cache.join(format!("VY_{k:03}.json")).exists(), "Y_{k} file");
    }
    let y2: serde_json::Value = serde_json::from_str(&read(&cache.join("VY_002.json"))).unwrap();
    assert_eq!(y2["family"], "VY");
    assert_eq!(y2["n"], 2);
    // Y_2 = t³ + 4
    let coeffs = y2["coeffs"].as_array().unwrap();
    assert_eq!(coeffs.len(), 4);
    assert_eq!(coeffs[0][0], "4");
    assert_eq!(coeffs[3][0], "1");
    let y5: serde_json::Value = serde_json::from_str(&read(&cache.join("VY_005.json"))).unwrap();
    let coeffs = y5["coeffs"].as_array().unwrap();
    assert_eq!(coeffs[12][0], "140");
    assert_eq!(coeffs[0][0], "-6272000");
}

#[test]
fn all_n2_passes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let run = |out: &Path| {
        let status = bin()
            .args(["all", "--n", "2"])
            .arg("--cache")
            .arg(&cache)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success(), "all --n 2 must exit 0");
    };
    let out1 = tmp.path().join("out1");
    let out2 = tmp.path().join("out2");
    run(&out1);
    run(&out2);
    for name in [
        "jm_points_002.jsonl",
        "st_points_002.jsonl",
        "quantize_002.csv",
        "orthogonality_002.csv",
        "region_boundary.csv",
    ] {
        let a = read(&out1.join(name));
        let b = read(&out2.join(name));
        assert_eq!(a, b, "{name} not byte-identical between runs");
    }
    // 3 points per family, quantization sum rule Σ = 1 everywhere.
    let jm = read(&out1.join("jm_points_002.jsonl"));
    assert_eq!(jm.lines().count(), 3);
    let quant = read(&out1.join("quantize_002.csv"));
    for line in quant.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let k: i64 = cols[4].parse::<i64>().unwrap()
            + cols[5].parse::<i64>().unwrap()
            + cols[6].parse::<i64>().unwrap();
        assert_eq!(k, 1, "sum rule in {line}");
        assert_eq!(cols[10], "true");
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // Missing --n.
    let status = bin()
        .args(["vy-gen"])
        .arg("--out")
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // Bad scaling value.
    let status = bin()
        .args(["lattice-compare", "--n-range", "5:9", "--scaling", "bogus"])
        .arg("--out")
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // Bad n-range.
    let status = bin()
        .args(["lattice-compare", "--n-range", "9"])
        .arg("--out")
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn config_file_is_applied_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    std::fs::write(&cfg_path, "precision_bits = 30\n").unwrap();
    // 30 bits violates the validated minimum: config error.
    let status = bin()
        .args(["vy-gen", "--n", "2"])
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // A flag overrides the file value.
    let status = bin()
        .args(["vy-gen", "--n", "2", "--precision-bits", "128"])
        .arg("--config")
        .arg(&cfg_path)
        .arg("--cache")
        .arg(tmp.path().join("cache"))
        .arg("--out")
        .arg(tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn region_boundary_emits_polyline() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["region-boundary"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = read(&out.join("region_boundary.csv"));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "re,im");
    assert!(lines.len() > 300, "polyline too short: {}", lines.len());
}
