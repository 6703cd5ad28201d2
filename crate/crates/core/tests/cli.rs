use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mire::cli::read_image;
use mire::image::{save_image, BitDepth, ImageFormat};
use mire::mire::{mire_correct, MireConfig};
use mire::report::{Method, MetricsReport};
use mire::{Image, Orientation};

fn mire_bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mire"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = mire_bin(args, dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, img: &Image, depth: BitDepth) -> PathBuf {
    let path = dir.join(name);
    let format = ImageFormat::from_path(&path).unwrap();
    fs::write(&path, save_image(img, format, depth).unwrap()).unwrap();
    path
}

fn report(path: &Path) -> MetricsReport {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn striped(width: usize, height: usize) -> Image {
    Image::from_fn(width, height, |r, c| {
        let scene = 0.5 + 0.3 * ((r as f64) * 0.11).sin() * ((c as f64) * 0.05).cos();
        let stripe = [0.04, -0.03, 0.0, 0.05, -0.05, 0.02][c % 6];
        scene + stripe
    })
    .unwrap()
}

#[test]
fn zero_sigma_round_trips_file_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let img = striped(20, 10);
    write(dir.path(), "in.pgm", &img, BitDepth::Eight);
    ok(
        &["correct", "in.pgm", "out.pgm", "--sigma", "0"],
        dir.path(),
    );
    assert_eq!(
        fs::read(dir.path().join("in.pgm")).unwrap(),
        fs::read(dir.path().join("out.pgm")).unwrap()
    );
}

#[test]
fn auto_mode_reports_trace_and_sigma() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["scene", "--width", "128", "--height", "96", "clean.png"],
        dir.path(),
    );
    ok(
        &["simulate", "clean.png", "noisy.png", "--seed", "5"],
        dir.path(),
    );
    let stdout = ok(
        &[
            "correct",
            "noisy.png",
            "out.png",
            "--auto",
            "--report",
            "r.json",
            "--truth",
            "clean.png",
        ],
        dir.path(),
    );
    assert!(stdout.contains("sigma* = "));
    let r = report(&dir.path().join("r.json"));
    assert_eq!(r.method, Method::Mire);
    let sigma = r.sigma_used.unwrap();
    assert!(sigma > 0.0);
    let trace = r.trace.unwrap();
    let best = trace.iter().min_by(|a, b| a.tv.total_cmp(&b.tv)).unwrap();
    assert_eq!(best.sigma, sigma);
    assert!(trace.first().unwrap().tv > best.tv && trace.last().unwrap().tv > best.tv);
    assert!(r.tv_after <= r.tv_before);
    assert!(r.runtime_ms >= 0.0);

    let noisy = read_image(&dir.path().join("noisy.png")).unwrap().image;
    let clean = read_image(&dir.path().join("clean.png")).unwrap().image;
    let out = read_image(&dir.path().join("out.png")).unwrap().image;
    let before = mire::metrics::rmse(&noisy, &clean).unwrap();
    assert!(r.rmse_vs_truth.unwrap() < before);
    assert!((mire::metrics::rmse(&out, &clean).unwrap() - r.rmse_vs_truth.unwrap()).abs() < 1e-4);
}

#[test]
fn custom_grid_is_used() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "in.pgm", &striped(30, 12), BitDepth::Sixteen);
    ok(
        &[
            "correct", "in.pgm", "out.pgm", "--auto", "--grid", "0,2", "--report", "r.json",
        ],
        dir.path(),
    );
    let trace = report(&dir.path().join("r.json")).trace.unwrap();
    assert!(trace.iter().all(|p| (0.0..=2.0).contains(&p.sigma)));
    assert!(trace.iter().any(|p| p.sigma == 0.0) && trace.iter().any(|p| p.sigma == 2.0));
}

#[test]
fn lines_orientation_is_transposed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let img = striped(16, 24).transpose();
    write(dir.path(), "in.pgm", &img, BitDepth::Sixteen);
    ok(
        &[
            "correct",
            "in.pgm",
            "out.pgm",
            "--sigma",
            "1.5",
            "--orientation",
            "lines",
        ],
        dir.path(),
    );

    let loaded = read_image(&dir.path().join("in.pgm")).unwrap().image;
    let expected = mire_correct(&loaded.transpose(), &MireConfig::new(1.5))
        .unwrap()
        .transpose();
    let lines = mire_correct(
        &loaded,
        &MireConfig::new(1.5).with_orientation(Orientation::Lines),
    )
    .unwrap();
    assert_eq!(expected, lines);
    let bytes = save_image(&expected, ImageFormat::Pgm, BitDepth::Sixteen).unwrap();
    assert_eq!(fs::read(dir.path().join("out.pgm")).unwrap(), bytes);
}

#[test]
fn tv_correct_removes_pure_offsets() {
    let dir = tempfile::tempdir().unwrap();
    // Adjacent columns agree on every row except a short band.
    let clean = Image::from_fn(40, 30, |r, c| {
        0.3 + 0.4 * (r as f64 / 29.0)
            + if (10..14).contains(&r) {
                0.05 * (c as f64 * 0.7).sin()
            } else {
                0.0
            }
    })
    .unwrap();
    write(dir.path(), "clean.pgm", &clean, BitDepth::Sixteen);
    ok(
        &[
            "simulate",
            "clean.pgm",
            "noisy.pgm",
            "--gain-std",
            "0",
            "--offset-std",
            "0.05",
            "--noise-std",
            "0",
            "--seed",
            "3",
        ],
        dir.path(),
    );
    ok(
        &["tv-correct", "noisy.pgm", "out.pgm", "--report", "r.json"],
        dir.path(),
    );
    let r = report(&dir.path().join("r.json"));
    assert_eq!(r.method, Method::Tv);
    assert!(r.sigma_used.is_none() && r.trace.is_none());
    assert!(r.tv_after < r.tv_before);

    let clean = read_image(&dir.path().join("clean.pgm")).unwrap().image;
    let noisy = read_image(&dir.path().join("noisy.pgm")).unwrap().image;
    let out = read_image(&dir.path().join("out.pgm")).unwrap().image;
    // Files are 16-bit, so exactness holds up to a couple of quantization steps.
    let step = 1.0 / 65535.0;
    assert!(mire::metrics::rmse_mean_aligned(&out, &clean).unwrap() < 2.0 * step);
    assert!((out.mean() - noisy.mean()).abs() < step);
}

#[test]
fn tv_correct_leaves_smooth_input() {
    let dir = tempfile::tempdir().unwrap();
    let col: Vec<f64> = (0..12).map(|r| r as f64 / 11.0).collect();
    write(
        dir.path(),
        "in.pgm",
        &Image::from_columns(&vec![col; 9]).unwrap(),
        BitDepth::Eight,
    );
    ok(&["tv-correct", "in.pgm", "out.pgm"], dir.path());
    assert_eq!(
        fs::read(dir.path().join("in.pgm")).unwrap(),
        fs::read(dir.path().join("out.pgm")).unwrap()
    );
}

#[test]
fn simulate_with_zero_stds_copies_input() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "in.png", &striped(10, 10), BitDepth::Sixteen);
    ok(
        &[
            "simulate",
            "in.png",
            "out.png",
            "--gain-std",
            "0",
            "--offset-std",
            "0",
            "--noise-std",
            "0",
            "--ground-truth",
            "t.json",
        ],
        dir.path(),
    );
    assert_eq!(
        read_image(&dir.path().join("in.png")).unwrap(),
        read_image(&dir.path().join("out.png")).unwrap()
    );
    let truth: mire::simulate::NuGroundTruth =
        serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(truth.gains, vec![1.0; 10]);
    assert_eq!(truth.offsets, vec![0.0; 10]);
}

#[test]
fn evaluate_prints_rmse() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "a.pgm",
        &Image::new(1, 2, vec![0.0, 0.0]).unwrap(),
        BitDepth::Eight,
    );
    write(
        dir.path(),
        "b.pgm",
        &Image::new(1, 2, vec![0.2, 0.4]).unwrap(),
        BitDepth::Eight,
    );
    let value: f64 = ok(&["evaluate", "a.pgm", "b.pgm"], dir.path())
        .trim()
        .parse()
        .unwrap();
    assert!((value - 0.1f64.sqrt()).abs() < 1e-12, "{value}");
    assert_eq!(ok(&["evaluate", "a.pgm", "a.pgm"], dir.path()).trim(), "0");
}

#[test]
fn sweep_rows_and_saved_images() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "in.pgm", &striped(24, 16), BitDepth::Sixteen);
    ok(
        &[
            "sweep",
            "in.pgm",
            "--grid",
            "1.5",
            "--csv",
            "one.csv",
            "--save-dir",
            "frames",
        ],
        dir.path(),
    );
    let text = fs::read_to_string(dir.path().join("one.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("sigma,tv_norm\n1.5,"));
    assert!(dir.path().join("frames/sigma_1.5.pgm").exists());

    write(
        dir.path(),
        "flat.pgm",
        &Image::filled(8, 8, 0.5).unwrap(),
        BitDepth::Eight,
    );
    let stdout = ok(&["sweep", "flat.pgm"], dir.path());
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.ends_with(",0")));
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = mire_bin(
        &["correct", "nope.pgm", "out.pgm", "--sigma", "1"],
        dir.path(),
    );
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.pgm"));

    write(dir.path(), "in.pgm", &striped(6, 6), BitDepth::Eight);
    assert!(!mire_bin(
        &["correct", "in.pgm", "out.tif", "--sigma", "1"],
        dir.path()
    )
    .status
    .success());
    assert!(!mire_bin(
        &["correct", "in.pgm", "out.pgm", "--sigma", "-2"],
        dir.path()
    )
    .status
    .success());
    assert!(!mire_bin(
        &["correct", "in.pgm", "out.pgm", "--auto", "--grid", "2,1"],
        dir.path()
    )
    .status
    .success());
    assert!(!mire_bin(&["correct", "in.pgm", "out.pgm"], dir.path())
        .status
        .success());
    assert!(!dir.path().join("out.pgm").exists());

    fs::write(dir.path().join("bad.pgm"), b"P5\n4 4\n255\n\x00\x01").unwrap();
    let truncated = mire_bin(&["tv-correct", "bad.pgm", "out.pgm"], dir.path());
    assert!(!truncated.status.success());
    assert!(String::from_utf8_lossy(&truncated.stderr).contains("truncated"));
}
