//! Single-worker against all-worker runs of the parallel stages. Build with
//! `--no-default-features` to time the sequential fallback instead.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use multifit::geometry::ModelKind;
use multifit::par;
use multifit::pipeline::{sdf_fit, FitConfig};
use multifit::superpixel::{slic_segment, SlicConfig};
use multifit::synthetic::{generate_scene, LabeledScene, SceneSpec};

fn scene() -> LabeledScene {
    generate_scene(&SceneSpec::random(
        ModelKind::Homography,
        640,
        480,
        &[400, 300],
        300,
        0.5,
        0,
    ))
    .expect("scene")
}

/// Runs `f` on one worker, or on the default pool when `single` is false.
fn on_pool(single: bool, f: impl FnOnce() + Send) {
    if single {
        par::with_threads(1, f)
    } else {
        f()
    }
}

const ARMS: [(&str, bool); 2] = [("one_worker", true), ("default_pool", false)];

fn slic(c: &mut Criterion) {
    let s = scene();
    let (img, _) = s.images().expect("images");
    let cfg = SlicConfig::with_superpixels(150);
    let mut g = c.benchmark_group("slic_640x480");
    g.sample_size(20);
    for (name, single) in ARMS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            on_pool(single, || b.iter(|| slic_segment(black_box(&img), &cfg).expect("slic")));
        });
    }
    g.finish();
}

fn fit(c: &mut Criterion) {
    let s = scene();
    let (a, b2) = s.images().expect("images");
    let cfg = FitConfig::new(ModelKind::Homography, 1.5, 2);
    let mut g = c.benchmark_group("sdf_fit_640x480");
    g.sample_size(10);
    for (name, single) in ARMS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            on_pool(single, || {
                b.iter(|| sdf_fit(&a, &b2, black_box(&s.correspondences), &cfg).expect("fit"))
            });
        });
    }
    g.finish();
}

criterion_group!(benches, slic, fit);
criterion_main!(benches);
