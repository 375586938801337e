use serde::{Deserialize, Serialize};

use crate::geometry::ModelKind;
use crate::pipeline::FitStatus;

/// Identifies the report layout; bumped whenever a field is added or removed.
pub const REPORT_SCHEMA: &str = "multifit-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    /// Canonical model matrix, row-major.
    pub model: [[f64; 3]; 3],
    pub inlier_count: usize,
    pub sampled_subset: Vec<usize>,
    /// Mean Sampson residual over the ground-truth structure matched to this
    /// instance; absent without labels or when no structure matched.
    pub mean_sampson_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub ms: f64,
}

/// Outcome of one fit. Every field is always present; options serialize as
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub method: String,
    pub model: ModelKind,
    pub dataset: String,
    pub correspondences: usize,
    pub inlier_scale: f64,
    pub num_structures: usize,
    pub superpixels: Option<usize>,
    pub compactness: Option<f64>,
    pub m0: Option<usize>,
    pub grouping_view: Option<String>,
    pub seed: Option<u64>,
    pub confidence: Option<f64>,
    pub max_iters: Option<usize>,
    pub status: FitStatus,
    /// Hypotheses generated (sdf) or samples drawn (baselines).
    pub hypotheses: usize,
    /// Samples drawn per structure (baselines only).
    pub iterations: Vec<usize>,
    pub instances: Vec<InstanceReport>,
    /// Mean Sampson residual over all ground-truth inliers.
    pub mean_sampson_error: Option<f64>,
    pub timings: Vec<StageReport>,
    pub total_ms: f64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    method: &'a str,
    model: &'a str,
    dataset: &'a str,
    correspondences: usize,
    status: &'a str,
    instances: usize,
    inlier_counts: String,
    mean_sampson_error: Option<f64>,
    total_ms: f64,
}

impl RunReport {
    /// Copy with every timing field zeroed, for run-to-run comparison.
    pub fn without_timings(&self) -> RunReport {
        let mut r = self.clone();
        for t in &mut r.timings {
            t.ms = 0.0;
        }
        r.total_ms = 0.0;
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(text)
    }

    /// Header line plus one summary row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let status = match self.status {
            FitStatus::Complete => "complete",
            FitStatus::Exhausted { .. } => "exhausted",
        };
        let counts: Vec<String> = self.instances.iter().map(|i| i.inlier_count.to_string()).collect();
        w.serialize(CsvRow {
            method: &self.method,
            model: self.model.name(),
            dataset: &self.dataset,
            correspondences: self.correspondences,
            status,
            instances: self.instances.len(),
            inlier_counts: counts.join(";"),
            mean_sampson_error: self.mean_sampson_error,
            total_ms: self.total_ms,
        })
        .expect("row serializes");
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
    }
}
