//! Runs the built binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn multifit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multifit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, extra: &[&str]) {
    let out = dir.to_str().unwrap();
    let mut args = vec!["generate", "--model", "homography", "--out", out];
    args.extend_from_slice(extra);
    let o = multifit(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn report(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn without_timings(mut v: serde_json::Value) -> serde_json::Value {
    v["timings"] = serde_json::Value::Null;
    v["total_ms"] = serde_json::Value::Null;
    v
}

#[test]
fn sdf_finds_two_planes() {
    let dir = tempfile::tempdir().unwrap();
    generate(
        dir.path(),
        &[
            "--inliers",
            "150,150",
            "--outliers",
            "60",
            "--noise",
            "0.5",
            "--seed",
            "2",
        ],
    );
    let o = multifit(&[
        "fit",
        "--method",
        "sdf",
        "--model",
        "homography",
        "--image1",
        &path(dir.path(), "view1.ppm"),
        "--image2",
        &path(dir.path(), "view2.ppm"),
        "--matches",
        &path(dir.path(), "scene.matches"),
        "--inlier-scale",
        "2.0",
        "--num-structures",
        "2",
        "--superpixels",
        "150",
    ]);
    let r = report(&o);
    assert_eq!(r["instances"].as_array().unwrap().len(), 2);
    assert_eq!(r["method"], "sdf");
    assert!(r["mean_sampson_error"].is_number());
}

#[test]
fn seeded_ransac_reports_repeat() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--inliers", "120,100", "--outliers", "100"]);
    let m = path(dir.path(), "scene.matches");
    let args = [
        "fit",
        "--method",
        "ransac",
        "--model",
        "homography",
        "--matches",
        &m,
        "--inlier-scale",
        "3",
        "--num-structures",
        "2",
        "--seed",
        "7",
    ];
    let a = without_timings(report(&multifit(&args)));
    let b = without_timings(report(&multifit(&args)));
    assert_eq!(a, b);
    assert_eq!(a["seed"], 7);
}

#[test]
fn thread_count_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &["--inliers", "150,120", "--outliers", "80", "--seed", "5"]);
    let (v1, v2, m) = (
        path(dir.path(), "view1.ppm"),
        path(dir.path(), "view2.ppm"),
        path(dir.path(), "scene.matches"),
    );
    let args = [
        "fit",
        "--method",
        "sdf",
        "--model",
        "homography",
        "--image1",
        &v1,
        "--image2",
        &v2,
        "--matches",
        &m,
        "--inlier-scale",
        "3",
        "--num-structures",
        "2",
    ];
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_multifit"))
            .args(args)
            .env("MULTIFIT_THREADS", threads)
            .output()
            .unwrap();
        without_timings(report(&o))
    };
    let one = run("1");
    assert_eq!(run("4"), one);
    assert_eq!(run("8"), one);
}

#[test]
fn csv_report_has_header_and_row() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &[]);
    let out = path(dir.path(), "report.csv");
    let o = multifit(&[
        "fit",
        "--method",
        "prosac",
        "--model",
        "homography",
        "--matches",
        &path(dir.path(), "scene.matches"),
        "--inlier-scale",
        "3",
        "--format",
        "csv",
        "--out",
        &out,
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("method,model,dataset"));
    assert!(lines[1].starts_with("prosac,"));
}

#[test]
fn sdf_without_images_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &[]);
    let m = path(dir.path(), "scene.matches");
    let o = multifit(&[
        "fit",
        "--method",
        "sdf",
        "--model",
        "homography",
        "--matches",
        &m,
        "--inlier-scale",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(multifit(&["fit", "--bogus"]).status.code(), Some(2));
}

#[test]
fn malformed_match_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = path(dir.path(), "bad.matches");
    std::fs::write(&m, "MULTIFIT-MATCHES v1\n1 2 3 4 0.5\n1 2 x 4 0.5\n").unwrap();
    let o = multifit(&[
        "fit",
        "--method",
        "ransac",
        "--model",
        "homography",
        "--matches",
        &m,
        "--inlier-scale",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.matches:3:"));
}

#[test]
fn scattered_matches_give_no_hypotheses() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), &[]);
    let m = path(dir.path(), "sparse.matches");
    // one match per far-apart superpixel, so no group reaches four members
    let records: String = (0..6)
        .map(|i| format!("{} {} {} {} 0.5\n", 20 + 50 * i, 30 + 30 * i, 22 + 50 * i, 31 + 30 * i))
        .collect();
    std::fs::write(&m, format!("MULTIFIT-MATCHES v1\n{records}")).unwrap();
    let o = multifit(&[
        "fit",
        "--method",
        "sdf",
        "--model",
        "homography",
        "--image1",
        &path(dir.path(), "view1.ppm"),
        "--image2",
        &path(dir.path(), "view2.ppm"),
        "--matches",
        &m,
        "--inlier-scale",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}
