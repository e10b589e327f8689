//! End-to-end checks of the command surface: exit codes, diagnostics,
//! CSV shape, weight dumps.

use std::path::{Path, PathBuf};
use std::process::Command;

use ilsmooth::{ImagePlane, MultiChannelImage, RangeTag};
use ilsmooth_cli::{io, run, EXIT_IO, EXIT_OK, EXIT_PARAM, EXIT_USAGE};

fn temp_dir(name: &str) -> PathBuf {
    let mut dir = std::env::temp_dir();
    dir.push(format!("ilsmooth-cli-{}-{}", std::process::id(), name));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_test_png(path: &Path, w: usize, h: usize) {
    let plane = ImagePlane::from_fn(w, h, |x, y| {
        let base: f64 = if x > w / 2 { 0.7 } else { 0.3 };
        let texture = if (x + y) % 3 == 0 { 0.05 } else { 0.0 };
        (base + texture).clamp(0.0, 1.0)
    });
    let img = MultiChannelImage::gray(plane, RangeTag::Unit).unwrap();
    io::save_image(&img, path).unwrap();
}

fn args(list: &[&str]) -> Vec<String> {
    std::iter::once("ilsmooth")
        .chain(list.iter().copied())
        .map(String::from)
        .collect()
}

#[test]
fn smooth_round_trip_writes_output() {
    let dir = temp_dir("smooth");
    let input = dir.join("in.png");
    let output = dir.join("out.png");
    write_test_png(&input, 32, 24);
    let code = run(args(&[
        "smooth",
        "--lambda",
        "0.1",
        "--iters",
        "2",
        "--sigma",
        "4",
        input.to_str().unwrap(),
        output.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let out = io::load_image(&output).unwrap();
    assert_eq!(out.width(), 32);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn zero_lambda_exits_with_parameter_code_and_names_the_flag() {
    let dir = temp_dir("lambda");
    let input = dir.join("in.png");
    write_test_png(&input, 16, 16);
    let code = run(args(&[
        "smooth",
        "--lambda",
        "0",
        input.to_str().unwrap(),
        dir.join("out.png").to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_PARAM);

    // the stderr line must name the offending flag; check via the binary
    let output = Command::new(env!("CARGO_BIN_EXE_ilsmooth"))
        .args([
            "smooth",
            "--lambda",
            "0",
            input.to_str().unwrap(),
            dir.join("out.png").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_PARAM));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("--lambda"), "stderr was: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn parameter_validation_happens_before_any_file_access() {
    // bad lambda plus missing input: the flag wins
    let code = run(args(&["smooth", "--lambda", "-1", "missing.png", "out.png"]));
    assert_eq!(code, EXIT_PARAM);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let code = run(args(&["smooth", "--does-not-exist", "a.png", "b.png"]));
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = temp_dir("missing");
    let code = run(args(&[
        "smooth",
        dir.join("nope.png").to_str().unwrap(),
        dir.join("out.png").to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_IO);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unsupported_extension_is_an_io_error() {
    let dir = temp_dir("ext");
    let input = dir.join("in.png");
    write_test_png(&input, 16, 16);
    let code = run(args(&[
        "smooth",
        input.to_str().unwrap(),
        dir.join("out.tiff").to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_IO);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn help_prints_and_exits_zero() {
    assert_eq!(run(args(&["--help"])), EXIT_OK);
    assert_eq!(run(args(&["smooth", "--help"])), EXIT_OK);
}

#[test]
fn bench_writes_csv_with_one_row_per_method() {
    let dir = temp_dir("bench");
    let input = dir.join("in.png");
    let csv_path = dir.join("times.csv");
    write_test_png(&input, 48, 32);
    let code = run(args(&[
        "bench",
        "--method",
        "both",
        "--lambda",
        "0.1",
        "--iters",
        "2",
        "--csv",
        csv_path.to_str().unwrap(),
        input.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(lines.len(), 3, "header plus one row per method: {csv}");
    assert_eq!(
        lines[0],
        "method,lambda,iterations,sigma,width,height,wall_time_total_s,wall_time_per_iter_s"
    );
    assert!(lines[1].starts_with("original,"));
    assert!(lines[2].starts_with("weighted,"));
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 8);
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[4], "48");
        assert_eq!(fields[5], "32");
        let total: f64 = fields[6].parse().unwrap();
        let per_iter: f64 = fields[7].parse().unwrap();
        let iters: f64 = fields[2].parse().unwrap();
        assert!(total > 0.0 && per_iter > 0.0);
        assert!(((per_iter * iters) - total).abs() <= 0.2 * total);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn weights_subcommand_writes_both_axis_maps() {
    let dir = temp_dir("weights");
    let input = dir.join("in.png");
    write_test_png(&input, 24, 24);
    let code = run(args(&[
        "weights",
        "--sigma",
        "2",
        input.to_str().unwrap(),
        dir.join("w.png").to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let wx = io::load_image(&dir.join("w.x.png")).unwrap();
    let wy = io::load_image(&dir.join("w.y.png")).unwrap();
    assert_eq!(wx.width(), 24);
    assert_eq!(wy.height(), 24);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn smooth_can_dump_weight_maps() {
    let dir = temp_dir("dump");
    let input = dir.join("in.png");
    write_test_png(&input, 24, 24);
    let code = run(args(&[
        "smooth",
        "--dump-weights",
        dir.join("w.png").to_str().unwrap(),
        input.to_str().unwrap(),
        dir.join("out.png").to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    assert!(dir.join("w.x.png").exists());
    assert!(dir.join("w.y.png").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tonemap_rejects_png_input() {
    let dir = temp_dir("tonemap-png");
    let input = dir.join("in.png");
    write_test_png(&input, 16, 16);
    let code = run(args(&[
        "tonemap",
        input.to_str().unwrap(),
        dir.join("out.png").to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_PARAM);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn smooth_rejects_hdr_input() {
    let dir = temp_dir("smooth-hdr");
    let input = dir.join("in.pfm");
    let hdr = MultiChannelImage::gray(ImagePlane::filled(8, 8, 3.0), RangeTag::Hdr).unwrap();
    io::save_image(&hdr, &input).unwrap();
    let code = run(args(&[
        "smooth",
        input.to_str().unwrap(),
        dir.join("out.png").to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_PARAM);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_enhance_and_tonemap_flags_rejected() {
    assert_eq!(
        run(args(&["enhance", "--boost", "-2", "a.png", "b.png"])),
        EXIT_PARAM
    );
    assert_eq!(
        run(args(&["tonemap", "--compression", "0", "a.pfm", "b.png"])),
        EXIT_PARAM
    );
    assert_eq!(
        run(args(&["tonemap", "--compression", "1.5", "a.pfm", "b.png"])),
        EXIT_PARAM
    );
}

#[test]
fn bench_reports_weighted_two_iterations_under_half_of_original_ten() {
    let dir = temp_dir("bench-ratio");
    let input = dir.join("in.png");
    let csv_path = dir.join("times.csv");
    write_test_png(&input, 512, 512);
    let code = run(args(&[
        "bench",
        "--method",
        "both",
        "--lambda",
        "0.1",
        "--iters",
        "2",
        "--orig-iters",
        "10",
        "--csv",
        csv_path.to_str().unwrap(),
        input.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let total_of = |prefix: &str| -> f64 {
        csv.lines()
            .find(|l| l.starts_with(prefix))
            .unwrap()
            .split(',')
            .nth(6)
            .unwrap()
            .parse()
            .unwrap()
    };
    let original = total_of("original,");
    let weighted = total_of("weighted,");
    assert!(
        weighted <= 0.5 * original,
        "weighted {weighted}s vs original {original}s"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_orig_iters_overrides_iteration_count() {
    let dir = temp_dir("bench-orig");
    let input = dir.join("in.png");
    let csv_path = dir.join("times.csv");
    write_test_png(&input, 32, 32);
    let code = run(args(&[
        "bench",
        "--method",
        "both",
        "--iters",
        "2",
        "--orig-iters",
        "10",
        "--csv",
        csv_path.to_str().unwrap(),
        input.to_str().unwrap(),
    ]));
    assert_eq!(code, EXIT_OK);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert!(lines[1].starts_with("original,") && lines[1].contains(",10,"));
    assert!(lines[2].starts_with("weighted,") && lines[2].contains(",2,"));
    std::fs::remove_dir_all(&dir).ok();
}
