//! Superpixel-based deterministic fitting.
//!
//! The full method segments both images, groups correspondences by
//! superpixel, builds one hypothesis per combined group from its top-scored
//! members, then repeatedly selects the hypothesis with most inliers and
//! discards every remaining hypothesis whose sampled subset touches the
//! selected inlier set.

mod generate;
mod select;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, Correspondence, GeometryError, ModelKind, ModelParams, DEFAULT_DEGENERACY_TOL};
use crate::grouping::{combine_groups, partition_groups, GroupSet, GroupingView, View};
use crate::superpixel::{grid_interval, slic_segment, Image, LabelMap, SlicConfig, SuperpixelError};

pub use generate::{generate_hypotheses, Generation};
pub use select::{is_redundant, select_models, select_single, select_with_trace, SelectionStep, SelectionTrace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    /// No group produced a usable hypothesis.
    #[error("no hypotheses generated from {groups} groups ({small} below minimal size, {degenerate} degenerate); group sizes: {histogram:?}")]
    NoHypotheses {
        groups: usize,
        small: usize,
        degenerate: usize,
        /// `(group size, number of groups)` pairs, ascending by size.
        histogram: Vec<(usize, usize)>,
    },
    #[error("need at least {needed} correspondences, got {got}")]
    NotEnoughCorrespondences { needed: usize, got: usize },
    #[error("correspondence {0} has a non-finite coordinate or invalid score")]
    InvalidCorrespondence(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Superpixel(#[from] SuperpixelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl FitError {
    pub(crate) fn empty() -> Self {
        FitError::NoHypotheses {
            groups: 0,
            small: 0,
            degenerate: 0,
            histogram: Vec::new(),
        }
    }
}

/// A model hypothesis with the subset that produced it and its inliers.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub params: ModelParams,
    pub kind: ModelKind,
    /// Correspondence indices used to fit the model, in score order.
    pub sampled_subset: Vec<usize>,
    /// Ascending indices with Sampson residual within the inlier scale.
    pub inlier_set: Vec<usize>,
    pub gen_index: usize,
}

impl Hypothesis {
    pub fn inlier_count(&self) -> usize {
        self.inlier_set.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub kind: ModelKind,
    /// Sampson-distance threshold, pixels.
    pub inlier_scale: f64,
    /// Number of model instances `T` to extract.
    pub num_structures: usize,
    /// Requested superpixel count `M`.
    pub superpixels: usize,
    pub compactness: f64,
    pub slic_max_iters: usize,
    /// Subset size `m0`; `None` means `p + 2`.
    pub subset_size: Option<usize>,
    pub grouping_view: GroupingView,
    pub degeneracy_tol: f64,
    /// Least-squares refit of each selected model on its inlier set.
    pub polish: bool,
}

impl FitConfig {
    pub fn new(kind: ModelKind, inlier_scale: f64, num_structures: usize) -> Self {
        let slic = SlicConfig::default();
        Self {
            kind,
            inlier_scale,
            num_structures,
            superpixels: slic.superpixels,
            compactness: slic.compactness,
            slic_max_iters: slic.max_iters,
            subset_size: None,
            grouping_view: GroupingView::Both,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            polish: false,
        }
    }

    /// Effective subset size `m0`.
    pub fn m0(&self) -> usize {
        self.subset_size.unwrap_or(self.kind.default_subset_size())
    }

    pub fn slic(&self) -> SlicConfig {
        SlicConfig {
            superpixels: self.superpixels,
            compactness: self.compactness,
            max_iters: self.slic_max_iters,
        }
    }

    pub fn validate(&self) -> Result<(), FitError> {
        if !(self.inlier_scale > 0.0) || !self.inlier_scale.is_finite() {
            return Err(FitError::InvalidConfig(format!(
                "inlier scale must be positive, got {}",
                self.inlier_scale
            )));
        }
        if self.num_structures == 0 {
            return Err(FitError::InvalidConfig(
                "number of structures must be at least 1".into(),
            ));
        }
        if self.m0() < self.kind.min_sample_size() {
            return Err(FitError::InvalidConfig(format!(
                "subset size {} is below the minimal size {}",
                self.m0(),
                self.kind.min_sample_size()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "state")]
pub enum FitStatus {
    Complete,
    /// Candidates ran out before `requested` instances were found.
    Exhausted {
        requested: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageTiming {
    pub stage: &'static str,
    pub duration: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Selected instances, in selection order.
    pub instances: Vec<Hypothesis>,
    /// Redundant hypotheses discarded at each selection step (SDF), or
    /// correspondences removed from the pool per structure (baselines).
    pub removed_counts: Vec<usize>,
    pub status: FitStatus,
    /// Hypotheses generated (SDF) or samples drawn (baselines), total.
    pub hypothesis_count: usize,
    /// Samples drawn per structure; empty for SDF.
    pub iterations: Vec<usize>,
    pub timings: Vec<StageTiming>,
}

impl FitResult {
    pub fn total_time(&self) -> Duration {
        self.timings.iter().map(|t| t.duration).sum()
    }
}

pub(crate) fn check_correspondences(data: &[Correspondence], kind: ModelKind) -> Result<(), FitError> {
    let needed = kind.min_sample_size();
    if data.len() < needed {
        return Err(FitError::NotEnoughCorrespondences {
            needed,
            got: data.len(),
        });
    }
    if let Some(i) = data.iter().position(|c| !c.is_valid()) {
        return Err(FitError::InvalidCorrespondence(i));
    }
    Ok(())
}

/// Runs the full method on an image pair.
pub fn sdf_fit(
    image1: &Image,
    image2: &Image,
    correspondences: &[Correspondence],
    cfg: &FitConfig,
) -> Result<FitResult, FitError> {
    cfg.validate()?;
    check_correspondences(correspondences, cfg.kind)?;
    let slic = cfg.slic();
    let start = Instant::now();
    let mut segmentations: Vec<(View, LabelMap)> = Vec::new();
    for &view in cfg.grouping_view.views() {
        let img = match view {
            View::First => image1,
            View::Second => image2,
        };
        segmentations.push((view, slic_segment(img, &slic)?));
    }
    let seg_time = start.elapsed();
    let mut result = fit_segmented(&segmentations, correspondences, cfg)?;
    result.timings.insert(
        0,
        StageTiming {
            stage: "superpixels",
            duration: seg_time,
        },
    );
    Ok(result)
}

/// Runs everything after segmentation on precomputed label maps.
pub fn fit_segmented(
    segmentations: &[(View, LabelMap)],
    correspondences: &[Correspondence],
    cfg: &FitConfig,
) -> Result<FitResult, FitError> {
    cfg.validate()?;
    check_correspondences(correspondences, cfg.kind)?;

    let start = Instant::now();
    let mut groupsets: Vec<GroupSet> = Vec::with_capacity(segmentations.len());
    for (view, lm) in segmentations {
        let s = grid_interval(lm.width() * lm.height(), cfg.superpixels)?;
        let gs = partition_groups(correspondences, lm, *view, s);
        groupsets.push(combine_groups(&gs, s));
    }
    let group_time = start.elapsed();

    let start = Instant::now();
    let generation = generate_hypotheses(&groupsets, correspondences, cfg)?;
    let gen_time = start.elapsed();

    let start = Instant::now();
    let mut result = select_models(&generation.hypotheses, cfg)?;
    if cfg.polish {
        for h in &mut result.instances {
            polish(h, correspondences, cfg);
        }
    }
    let sel_time = start.elapsed();
    result.timings = vec![
        StageTiming {
            stage: "grouping",
            duration: group_time,
        },
        StageTiming {
            stage: "hypotheses",
            duration: gen_time,
        },
        StageTiming {
            stage: "selection",
            duration: sel_time,
        },
    ];
    Ok(result)
}

fn polish(h: &mut Hypothesis, data: &[Correspondence], cfg: &FitConfig) {
    let subset: Vec<Correspondence> = h.inlier_set.iter().map(|&i| data[i]).collect();
    if let Ok(params) = geometry::fit_model_with_tolerance(cfg.kind, &subset, cfg.degeneracy_tol) {
        let inliers = geometry::inlier_indices(&params, cfg.kind, data, cfg.inlier_scale);
        if inliers.len() >= h.inlier_set.len() {
            h.params = params;
            h.inlier_set = inliers;
        }
    }
}

pub(crate) fn size_histogram(sizes: impl Iterator<Item = usize>) -> Vec<(usize, usize)> {
    let mut hist = BTreeMap::new();
    for s in sizes {
        *hist.entry(s).or_insert(0) += 1;
    }
    hist.into_iter().collect()
}
