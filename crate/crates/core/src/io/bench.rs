use std::time::{Duration, Instant};

use serde::Serialize;

use super::Method;
use crate::baselines::{prosac_fit, ransac_fit, BaselineConfig};
use crate::geometry::ModelKind;
use crate::pipeline::{sdf_fit, FitConfig, FitError, FitResult};
use crate::synthetic::{generate_scene, mean_sampson_error, LabeledScene, Rect, SceneSpec};

/// Outlier fractions of the built-in outlier sweep.
pub const OUTLIER_SWEEP: [f64; 8] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7];

/// Superpixel counts of the built-in superpixel sweep.
pub const SUPERPIXEL_SWEEP: [usize; 6] = [50, 100, 150, 200, 250, 300];

/// Runs per cell; the reported time is their median.
pub const TIMING_REPEATS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Every method over [`OUTLIER_SWEEP`].
    Outliers,
    /// The superpixel method over [`SUPERPIXEL_SWEEP`].
    Superpixels,
}

impl Sweep {
    pub const fn name(self) -> &'static str {
        match self {
            Sweep::Outliers => "outliers",
            Sweep::Superpixels => "superpixels",
        }
    }
}

/// Scene and method grid. Scenes hold one structure whose inliers fill a
/// square patch in the middle of the image.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSuite {
    pub sweeps: Vec<Sweep>,
    pub kind: ModelKind,
    pub methods: Vec<Method>,
    pub width: usize,
    pub height: usize,
    /// Side of the inlier patch, pixels.
    pub patch: f64,
    pub correspondences: usize,
    pub noise_sigma: f64,
    pub inlier_scale: f64,
    /// Outlier fraction of the superpixel sweep scenes.
    pub superpixel_sweep_outliers: f64,
    pub seed: u64,
    pub repeats: usize,
}

impl BenchSuite {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            sweeps: vec![Sweep::Outliers, Sweep::Superpixels],
            kind,
            methods: vec![Method::Sdf, Method::Ransac, Method::Prosac],
            width: 640,
            height: 480,
            patch: 48.0,
            correspondences: 500,
            noise_sigma: 0.5,
            inlier_scale: 1.5,
            superpixel_sweep_outliers: 0.3,
            seed: 0,
            repeats: TIMING_REPEATS,
        }
    }

    /// The scene for one outlier fraction.
    pub fn scene(&self, outlier_ratio: f64) -> Result<LabeledScene, String> {
        let (cx, cy) = (self.width as f64 / 2.0, self.height as f64 / 2.0);
        let h = self.patch / 2.0;
        let outliers = (self.correspondences as f64 * outlier_ratio).round() as usize;
        let inliers = self.correspondences - outliers.min(self.correspondences);
        let spec = SceneSpec::with_regions(
            self.kind,
            self.width,
            self.height,
            &[(Rect::new(cx - h, cy - h, cx + h, cy + h), inliers)],
            outliers,
            self.noise_sigma,
            self.seed,
        );
        generate_scene(&spec).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub sweep: &'static str,
    pub method: &'static str,
    pub model: &'static str,
    /// Outlier fraction or superpixel count.
    pub parameter: f64,
    pub instances: usize,
    pub mean_sampson_error: Option<f64>,
    pub median_ms: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).expect("row serializes");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
    }

    pub fn rows_for(&self, sweep: Sweep, method: Method) -> impl Iterator<Item = &BenchRow> {
        self.rows
            .iter()
            .filter(move |r| r.sweep == sweep.name() && r.method == method.name())
    }
}

/// Runs every cell of `suite`. A failing cell is recorded with its error and
/// the suite moves on.
pub fn run_benchmark(suite: &BenchSuite) -> BenchReport {
    let mut report = BenchReport::default();
    for &sweep in &suite.sweeps {
        match sweep {
            Sweep::Outliers => {
                for &ratio in &OUTLIER_SWEEP {
                    let scene = suite.scene(ratio);
                    for &method in &suite.methods {
                        report.rows.push(cell(suite, sweep, method, ratio, &scene, None));
                    }
                }
            }
            Sweep::Superpixels => {
                if !suite.methods.contains(&Method::Sdf) {
                    continue;
                }
                let scene = suite.scene(suite.superpixel_sweep_outliers);
                for &m in &SUPERPIXEL_SWEEP {
                    report
                        .rows
                        .push(cell(suite, sweep, Method::Sdf, m as f64, &scene, Some(m)));
                }
            }
        }
    }
    report
}

fn cell(
    suite: &BenchSuite,
    sweep: Sweep,
    method: Method,
    parameter: f64,
    scene: &Result<LabeledScene, String>,
    superpixels: Option<usize>,
) -> BenchRow {
    let mut row = BenchRow {
        sweep: sweep.name(),
        method: method.name(),
        model: suite.kind.name(),
        parameter,
        instances: 0,
        mean_sampson_error: None,
        median_ms: None,
        error: None,
    };
    let scene = match scene {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.clone());
            return row;
        }
    };
    let superpixels = superpixels.unwrap_or(crate::superpixel::SlicConfig::default().superpixels);
    let mut times = Vec::with_capacity(suite.repeats.max(1));
    let mut last = None;
    for _ in 0..suite.repeats.max(1) {
        let start = Instant::now();
        let r = fit_once(suite, method, scene, superpixels);
        times.push(start.elapsed());
        match r {
            Ok(r) => last = Some(r),
            Err(e) => {
                row.error = Some(e.to_string());
                return row;
            }
        }
    }
    let result = last.expect("at least one run");
    times.sort();
    row.instances = result.instances.len();
    row.mean_sampson_error = Some(mean_sampson_error(
        &result.instances,
        &scene.correspondences,
        &scene.labels,
    ))
    .filter(|e| e.is_finite());
    row.median_ms = Some(median(&times).as_secs_f64() * 1e3);
    row
}

fn fit_once(
    suite: &BenchSuite,
    method: Method,
    scene: &LabeledScene,
    superpixels: usize,
) -> Result<FitResult, FitError> {
    let data = &scene.correspondences;
    match method {
        Method::Sdf => {
            let (a, b) = scene.images()?;
            let mut cfg = FitConfig::new(suite.kind, suite.inlier_scale, 1);
            cfg.superpixels = superpixels;
            sdf_fit(&a, &b, data, &cfg)
        }
        Method::Ransac => ransac_fit(
            data,
            &BaselineConfig::new(suite.kind, suite.inlier_scale, 1, suite.seed),
        ),
        Method::Prosac => prosac_fit(
            data,
            &BaselineConfig::new(suite.kind, suite.inlier_scale, 1, suite.seed),
        ),
    }
}

/// Median of sorted durations; the mean of the middle pair for even counts.
fn median(sorted: &[Duration]) -> Duration {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2
    }
}
