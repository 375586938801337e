use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use super::{
    labels_sidecar, load_image, load_labels, load_matches, InstanceReport, IoError, RunReport, StageReport,
    REPORT_SCHEMA,
};
use crate::baselines::{prosac_fit, ransac_fit, BaselineConfig};
use crate::geometry::{Correspondence, ModelKind};
use crate::grouping::GroupingView;
use crate::pipeline::{sdf_fit, FitConfig, FitError, FitResult};
use crate::superpixel::SuperpixelError;
use crate::synthetic::{instance_errors, mean_sampson_error};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sdf,
    Ransac,
    Prosac,
}

impl Method {
    pub const fn name(self) -> &'static str {
        match self {
            Method::Sdf => "sdf",
            Method::Ransac => "ransac",
            Method::Prosac => "prosac",
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sdf" => Ok(Method::Sdf),
            "ransac" => Ok(Method::Ransac),
            "prosac" => Ok(Method::Prosac),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitArgs {
    pub method: Method,
    pub model: ModelKind,
    pub image1: Option<PathBuf>,
    pub image2: Option<PathBuf>,
    pub matches: PathBuf,
    /// Ground-truth labels; defaults to the match file's sidecar when it exists.
    pub labels: Option<PathBuf>,
    pub inlier_scale: f64,
    pub num_structures: usize,
    pub superpixels: usize,
    pub compactness: f64,
    pub m0: Option<usize>,
    pub grouping_view: GroupingView,
    pub seed: u64,
    pub confidence: f64,
    pub max_iters: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl FitArgs {
    pub fn new(method: Method, model: ModelKind, matches: impl Into<PathBuf>, inlier_scale: f64) -> Self {
        let sdf = FitConfig::new(model, inlier_scale, 1);
        let base = BaselineConfig::new(model, inlier_scale, 1, 0);
        Self {
            method,
            model,
            image1: None,
            image2: None,
            matches: matches.into(),
            labels: None,
            inlier_scale,
            num_structures: 1,
            superpixels: sdf.superpixels,
            compactness: sdf.compactness,
            m0: None,
            grouping_view: GroupingView::Both,
            seed: base.seed,
            confidence: base.confidence,
            max_iters: base.max_iters,
            out: None,
            format: OutputFormat::Json,
        }
    }

    fn fit_config(&self) -> FitConfig {
        let mut cfg = FitConfig::new(self.model, self.inlier_scale, self.num_structures);
        cfg.superpixels = self.superpixels;
        cfg.compactness = self.compactness;
        cfg.subset_size = self.m0;
        cfg.grouping_view = self.grouping_view;
        cfg
    }

    fn baseline_config(&self) -> BaselineConfig {
        let mut cfg = BaselineConfig::new(self.model, self.inlier_scale, self.num_structures, self.seed);
        cfg.confidence = self.confidence;
        cfg.max_iters = self.max_iters;
        cfg
    }
}

/// Failure of [`run_fit`], grouped by process exit code.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    NoHypotheses(FitError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl RunError {
    pub const fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Parse(_) => 3,
            RunError::NoHypotheses(_) => 4,
            RunError::Internal(_) => 5,
        }
    }
}

impl From<IoError> for RunError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io { .. } => RunError::Usage(e.to_string()),
            _ => RunError::Parse(e.to_string()),
        }
    }
}

impl From<FitError> for RunError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::NoHypotheses { .. } => RunError::NoHypotheses(e),
            FitError::InvalidConfig(_) | FitError::Superpixel(SuperpixelError::InvalidConfig(_)) => {
                RunError::Usage(e.to_string())
            }
            FitError::NotEnoughCorrespondences { .. }
            | FitError::InvalidCorrespondence(_)
            | FitError::Superpixel(SuperpixelError::InvalidImage(_)) => RunError::Parse(e.to_string()),
            FitError::Geometry(_) => RunError::Internal(e.to_string()),
        }
    }
}

/// Loads the inputs, runs the chosen method, and writes the report to
/// `args.out` when set.
pub fn run_fit(args: &FitArgs) -> Result<RunReport, RunError> {
    let data = load_matches(&args.matches)?;
    let labels = match &args.labels {
        Some(p) => Some(load_labels(p, data.len())?),
        None => {
            let side = labels_sidecar(&args.matches);
            if side.is_file() && side != args.matches {
                Some(load_labels(&side, data.len())?)
            } else {
                None
            }
        }
    };

    let start = Instant::now();
    let result = match args.method {
        Method::Sdf => {
            let (Some(p1), Some(p2)) = (&args.image1, &args.image2) else {
                return Err(RunError::Usage("--method sdf requires --image1 and --image2".into()));
            };
            let img1 = load_image(p1)?;
            let img2 = load_image(p2)?;
            sdf_fit(&img1, &img2, &data, &args.fit_config())?
        }
        Method::Ransac => ransac_fit(&data, &args.baseline_config())?,
        Method::Prosac => prosac_fit(&data, &args.baseline_config())?,
    };
    let total = start.elapsed();

    let report = build_report(args, &data, labels.as_deref(), &result, total.as_secs_f64() * 1e3);
    if let Some(out) = &args.out {
        write_report(&report, args.format, out)?;
    }
    Ok(report)
}

pub(crate) fn build_report(
    args: &FitArgs,
    data: &[Correspondence],
    labels: Option<&[usize]>,
    result: &FitResult,
    total_ms: f64,
) -> RunReport {
    let errors = labels.map(|l| instance_errors(&result.instances, data, l));
    let sdf = args.method == Method::Sdf;
    let cfg = args.fit_config();
    RunReport {
        schema: REPORT_SCHEMA.into(),
        method: args.method.name().into(),
        model: args.model,
        dataset: args
            .matches
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
        correspondences: data.len(),
        inlier_scale: args.inlier_scale,
        num_structures: args.num_structures,
        superpixels: sdf.then_some(args.superpixels),
        compactness: sdf.then_some(args.compactness),
        m0: sdf.then_some(cfg.m0()),
        grouping_view: sdf.then(|| args.grouping_view.name().to_string()),
        seed: (!sdf).then_some(args.seed),
        confidence: (!sdf).then_some(args.confidence),
        max_iters: (!sdf).then_some(args.max_iters),
        status: result.status,
        hypotheses: result.hypothesis_count,
        iterations: result.iterations.clone(),
        instances: result
            .instances
            .iter()
            .enumerate()
            .map(|(j, h)| InstanceReport {
                model: h.params.to_rows(),
                inlier_count: h.inlier_count(),
                sampled_subset: h.sampled_subset.clone(),
                mean_sampson_error: errors.as_ref().and_then(|e| e[j]),
            })
            .collect(),
        mean_sampson_error: labels
            .map(|l| mean_sampson_error(&result.instances, data, l))
            .filter(|e| e.is_finite()),
        timings: result
            .timings
            .iter()
            .map(|t| StageReport {
                stage: t.stage.into(),
                ms: t.duration.as_secs_f64() * 1e3,
            })
            .collect(),
        total_ms,
    }
}

fn write_report(report: &RunReport, format: OutputFormat, out: &Path) -> Result<(), RunError> {
    let text = match format {
        OutputFormat::Json => report.to_json() + "\n",
        OutputFormat::Csv => report.to_csv(),
    };
    std::fs::write(out, text).map_err(|e| RunError::Usage(format!("{}: {e}", out.display())))
}
