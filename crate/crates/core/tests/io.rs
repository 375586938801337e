//! File formats and the report schema.

use multifit::geometry::ModelKind;
use multifit::io::{self, run_fit, FitArgs, Method, RunReport};
use multifit::synthetic::{generate_scene, SceneSpec};
use serde_json::Value;

const GOLDEN_KEYS: &str = include_str!("golden/report_keys.txt");

fn key_paths(v: &Value, prefix: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                out.push(path.clone());
                key_paths(child, &path, out);
            }
        }
        Value::Array(items) => {
            if let Some(first) = items.first() {
                key_paths(first, &format!("{prefix}[]"), out);
            }
        }
        _ => {}
    }
}

#[test]
fn saved_scene_loads_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let scene = generate_scene(&SceneSpec::random(
        ModelKind::FundamentalMatrix,
        320,
        240,
        &[100, 80],
        70,
        0.7,
        5,
    ))
    .unwrap();
    let path = dir.path().join("scene.matches");
    io::save_matches(&path, &scene.correspondences).unwrap();
    io::save_labels(io::labels_sidecar(&path), &scene.labels).unwrap();
    let back = io::load_matches(&path).unwrap();
    assert_eq!(back, scene.correspondences);
    assert_eq!(
        io::load_labels(io::labels_sidecar(&path), back.len()).unwrap(),
        scene.labels
    );

    io::save_rgb(dir.path().join("a.ppm"), scene.width, scene.height, &scene.rgb1).unwrap();
    let (a, _) = scene.images().unwrap();
    assert_eq!(io::load_image(dir.path().join("a.ppm")).unwrap(), a);
}

#[test]
fn report_keys_match_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let scene = generate_scene(&SceneSpec::random(
        ModelKind::Homography,
        320,
        240,
        &[150, 120],
        80,
        0.5,
        1,
    ))
    .unwrap();
    let path = dir.path().join("scene.matches");
    io::save_matches(&path, &scene.correspondences).unwrap();
    io::save_labels(io::labels_sidecar(&path), &scene.labels).unwrap();
    let mut args = FitArgs::new(Method::Ransac, ModelKind::Homography, &path, 1.5);
    args.num_structures = 2;
    let report = run_fit(&args).unwrap();

    let value: Value = serde_json::from_str(&report.to_json()).unwrap();
    let mut keys = Vec::new();
    key_paths(&value, "", &mut keys);
    keys.sort();
    let golden: Vec<&str> = GOLDEN_KEYS.lines().filter(|l| !l.is_empty()).collect();
    assert_eq!(keys, golden);
    assert_eq!(RunReport::from_json(&report.to_json()).unwrap(), report);
}
