//! End-to-end runs of the `shadowperc` binary: file round trips, exit
//! codes, image and CSV outputs, reconstruction dumps.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use shadowperc::io;
use shadowperc_core::{DistributionSpec, HeightField};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shadowperc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn gauss() -> DistributionSpec {
    DistributionSpec::gaussian(0.0, 1.0).unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_CONFIG: &str = r#"{
    "spec": {"kind": "gaussian", "mean": 0.0, "sd": 1.0},
    "width": 4, "height": 2, "lookahead": 2, "seed": 7
}"#;

#[test]
fn generate_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out_a = dir.path().join("a.shpf");
    let out_b = dir.path().join("b.shpf");
    for out in [&out_a, &out_b] {
        let status = run(&[
            "generate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success());
    }
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same config, same bytes");

    let field = io::decode_height_field(&bytes_a).unwrap();
    assert_eq!(field.width(), 4);
    assert_eq!(field.rows(), 2);
    assert_eq!(field.heights().len(), 12);
    // Matches an in-process generation with the same parameters.
    let expect = HeightField::generate(4, 2, 2, gauss(), 7).unwrap();
    assert_eq!(io::encode_height_field(&expect), bytes_a);

    // The CSV export of the same field has one line per row.
    let csv_out = dir.path().join("a.csv");
    run(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        csv_out.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&csv_out).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 6);
}

#[test]
fn generate_to_bad_path_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out = run(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        "/nonexistent-dir/field.shpf",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "reconstruct",
        "--input",
        "/nonexistent-dir/f.shpf",
        "--out",
        dir.path().join("r.shrc").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn write_constant_field(dir: &Path, value: f64) -> PathBuf {
    let field =
        HeightField::from_parts(4, 3, 2, gauss(), 0, vec![value; 18]).unwrap();
    let path = dir.join("const.shpf");
    std::fs::write(&path, io::encode_height_field(&field)).unwrap();
    path
}

fn parse_ppm(bytes: &[u8]) -> (u32, u32, Vec<u8>) {
    let text_end = bytes
        .windows(4)
        .position(|w| w == b"255\n")
        .expect("maxval line")
        + 4;
    let header = std::str::from_utf8(&bytes[..text_end]).unwrap();
    let mut lines = header.lines();
    assert_eq!(lines.next().unwrap(), "P6");
    let dim_line = lines
        .find(|l| !l.starts_with('#'))
        .expect("dimension line");
    let mut parts = dim_line.split_whitespace();
    let w: u32 = parts.next().unwrap().parse().unwrap();
    let h: u32 = parts.next().unwrap().parse().unwrap();
    (w, h, bytes[text_end..].to_vec())
}

#[test]
fn render_constant_field_levels() {
    let dir = tempfile::tempdir().unwrap();
    let field_path = write_constant_field(dir.path(), 1.5);

    // At level 0 every slope ties the level: all white.
    let out = dir.path().join("white.ppm");
    let status = run(&[
        "render",
        "--input",
        field_path.to_str().unwrap(),
        "--level",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let (w, h, pixels) = parse_ppm(&std::fs::read(&out).unwrap());
    assert_eq!((w, h), (4, 3));
    assert_eq!(pixels.len(), 4 * 3 * 3, "pixel count is W*H");
    assert!(pixels.chunks(3).all(|p| p == [255, 255, 255]));

    // Deep below every slope: everything shadowed, one cluster, all red.
    let out = dir.path().join("red.ppm");
    run(&[
        "render",
        "--input",
        field_path.to_str().unwrap(),
        "--level",
        "-1e9",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (_, _, pixels) = parse_ppm(&std::fs::read(&out).unwrap());
    assert!(pixels.chunks(3).all(|p| p == [255, 0, 0]));
}

#[test]
fn render_pbm_mask_and_alpha_dump_agree_with_heights() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
            "spec": {"kind": "gaussian", "mean": 0.0, "sd": 1.0},
            "width": 8, "height": 8, "lookahead": 8, "seed": 3
        }"#,
    );
    let field_path = dir.path().join("f.shpf");
    run(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        field_path.to_str().unwrap(),
    ]);
    let alpha_path = dir.path().join("f.shaf");
    let status = run(&[
        "alpha",
        "--input",
        field_path.to_str().unwrap(),
        "--out",
        alpha_path.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let dump = io::decode_alpha(&std::fs::read(&alpha_path).unwrap()).unwrap();
    assert_eq!(dump.truncation, 8);

    // Rendering from heights or from the slope dump gives identical bytes
    // except for the embedded provenance comment, so compare pixel payloads.
    let from_heights = dir.path().join("h.ppm");
    let from_alpha = dir.path().join("a.ppm");
    for (input, out) in [(&field_path, &from_heights), (&alpha_path, &from_alpha)] {
        run(&[
            "render",
            "--input",
            input.to_str().unwrap(),
            "--level",
            "0.5",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let (_, _, px_heights) = parse_ppm(&std::fs::read(&from_heights).unwrap());
    let (_, _, px_alpha) = parse_ppm(&std::fs::read(&from_alpha).unwrap());
    assert_eq!(px_heights, px_alpha);

    // P4 mask export.
    let pbm_path = dir.path().join("m.pbm");
    run(&[
        "render",
        "--input",
        alpha_path.to_str().unwrap(),
        "--level",
        "0.5",
        "--side",
        "ge",
        "--format",
        "pbm",
        "--out",
        pbm_path.to_str().unwrap(),
    ]);
    let pbm = std::fs::read(&pbm_path).unwrap();
    assert!(pbm.starts_with(b"P4\n"));
}

#[test]
fn scan_writes_monotone_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
            "spec": {"kind": "gaussian", "mean": 0.0, "sd": 1.0},
            "width": 16, "height": 16, "lookahead": 16, "seed": 5,
            "levels": [0.1, 0.8, 2.5], "samples": 20
        }"#,
    );
    let out = dir.path().join("scan.csv");
    let status = run(&[
        "scan",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(status.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "level,side,axis,N,successes,p_hat,stderr,W,H,L,seed"
    );
    let p_hats: Vec<f64> = lines
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(p_hats.len(), 3);
    assert!(p_hats.windows(2).all(|w| w[0] <= w[1]), "{p_hats:?}");

    // Scanning again, even with a different thread count, writes the same
    // bytes.
    let again = dir.path().join("scan2.csv");
    run(&[
        "scan",
        "--config",
        config.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert_eq!(csv, std::fs::read_to_string(&again).unwrap());
}

#[test]
fn scan_without_levels_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out = run(&["scan", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_single_sample_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL_CONFIG);
    let out = bin()
        .args(["scan", "--config", config.to_str().unwrap()])
        .args(["--level", "1.0", "--samples", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("1,le,horizontal,1,"));
}

#[test]
fn reconstruct_round_trips_generated_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
            "spec": {"kind": "gaussian", "mean": 0.0, "sd": 1.0},
            "width": 64, "height": 4, "lookahead": 64, "seed": 42
        }"#,
    );
    let field_path = dir.path().join("f.shpf");
    run(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        field_path.to_str().unwrap(),
    ]);
    let rec_path = dir.path().join("f.shrc");
    let status = run(&[
        "reconstruct",
        "--input",
        field_path.to_str().unwrap(),
        "--mean-mode",
        "known",
        "--out",
        rec_path.to_str().unwrap(),
    ]);
    assert!(status.status.success());

    let (cols, rows, grid) =
        io::decode_reconstruction_grid(&std::fs::read(&rec_path).unwrap()).unwrap();
    // Heights rebuild over every stored column through the full-suffix map.
    assert_eq!((cols, rows), (128, 4));
    let field = io::decode_height_field(&std::fs::read(&field_path).unwrap()).unwrap();
    // Known mean of the standard Gaussian is zero, so the dump holds the
    // anchored heights.
    for j in 0..rows {
        for i in 0..cols {
            let got = grid[(j * cols + i) as usize];
            let want = field.height_at(i, j) - field.height_at(0, j);
            assert!(
                (got - want).abs() <= 1e-9,
                "cell ({i}, {j}): {got} vs {want}"
            );
        }
    }

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{}.json", rec_path.display())).unwrap())
            .unwrap();
    assert_eq!(sidecar["rows"].as_array().unwrap().len(), 4);
    assert_eq!(sidecar["rows"][0]["status"], "ok");
    assert_eq!(sidecar["rows"][0]["valid_end"], 128);
}

#[test]
fn reconstruct_flags_bad_rows_in_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    // Slopes rise right after the anchor; a truncation horizon of one site
    // cannot bridge the row once only the slope dump is available.
    let field = HeightField::from_parts(
        3,
        1,
        1,
        gauss(),
        0,
        vec![0.0, 0.1, 10.0, 9.0],
    )
    .unwrap();
    let field_path = dir.path().join("adv.shpf");
    std::fs::write(&field_path, io::encode_height_field(&field)).unwrap();
    let alpha_path = dir.path().join("adv.shaf");
    run(&[
        "alpha",
        "--input",
        field_path.to_str().unwrap(),
        "--out",
        alpha_path.to_str().unwrap(),
    ]);
    let rec_path = dir.path().join("adv.shrc");
    let status = run(&[
        "reconstruct",
        "--input",
        alpha_path.to_str().unwrap(),
        "--out",
        rec_path.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{}.json", rec_path.display())).unwrap())
            .unwrap();
    assert_eq!(sidecar["rows"][0]["status"], "bad_configuration");
    assert_eq!(sidecar["rows"][0]["valid_end"], 0);
    // The grid still has the right shape, filled with NaN for the bad row.
    let (cols, rows, grid) =
        io::decode_reconstruction_grid(&std::fs::read(&rec_path).unwrap()).unwrap();
    assert_eq!((cols, rows), (4, 1));
    assert!(grid.iter().all(|v| v.is_nan()));
}

#[test]
fn selftest_emits_passing_json() {
    let out = run(&["selftest", "--seed", "9"]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let list = reports.as_array().unwrap();
    assert!(!list.is_empty());
    assert!(list.iter().all(|r| r["pass"].as_bool().unwrap()));
}

#[test]
fn verify_bounds_reports_green() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bounds.json");
    let out = run(&[
        "verify-bounds",
        "--seed",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "expected exit 0");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    for check in report["checks"].as_array().unwrap() {
        for key in ["name", "reference", "estimate", "stderr", "pass"] {
            assert!(check.get(key).is_some(), "missing {key}");
        }
    }
}
