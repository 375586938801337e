//! Two-view geometric primitives: correspondences, model kinds, canonical model
//! matrices, linear solvers and Sampson residuals.
//!
//! Everything here is a pure function over immutable inputs.

mod normalize;
mod sampson;
mod solve;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use normalize::normalize_points;
pub use sampson::{inlier_indices, residuals, sampson_residual};
pub use solve::{fit_fundamental, fit_homography, fit_model, fit_model_with_tolerance};

/// Relative singular-value gap below which a design matrix is treated as rank deficient.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

/// Entries with magnitude at or below this are skipped when choosing the sign pivot.
pub const SIGN_PIVOT_EPS: f64 = 1e-8;

/// Errors raised by the solvers and normalisation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// Fewer correspondences than the solver needs.
    #[error("need at least {needed} correspondences, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },
    /// The configuration does not determine a unique model.
    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),
    /// An input coordinate was NaN or infinite.
    #[error("non-finite coordinate in input")]
    NonFinite,
}

/// A point in image coordinates (pixels).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

/// A matched feature pair across two views with its matching score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub p1: Point2,
    pub p2: Point2,
    pub score: f64,
}

impl Correspondence {
    pub const fn new(p1: Point2, p2: Point2, score: f64) -> Self {
        Self { p1, p2, score }
    }

    /// Coordinates and score are finite and the score is non-negative.
    pub fn is_valid(&self) -> bool {
        self.p1.is_finite() && self.p2.is_finite() && self.score.is_finite() && self.score >= 0.0
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.p1.scaled(k), self.p2.scaled(k), self.score)
    }
}

/// Which two-view relation is being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Homography,
    #[serde(rename = "fundamental")]
    FundamentalMatrix,
}

impl ModelKind {
    /// Minimal subset size `p`.
    pub const fn min_sample_size(self) -> usize {
        match self {
            ModelKind::Homography => 4,
            ModelKind::FundamentalMatrix => 8,
        }
    }

    /// The default subset size `p + 2`.
    pub const fn default_subset_size(self) -> usize {
        self.min_sample_size() + 2
    }

    pub const fn name(self) -> &'static str {
        match self {
            ModelKind::Homography => "homography",
            ModelKind::FundamentalMatrix => "fundamental",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "homography" | "h" => Ok(ModelKind::Homography),
            "fundamental" | "f" => Ok(ModelKind::FundamentalMatrix),
            other => Err(format!("unknown model kind `{other}`")),
        }
    }
}

/// A homogeneous 3x3 model matrix in canonical form: unit Frobenius norm and
/// the first significant entry (row-major) positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams(Matrix3<f64>);

impl ModelParams {
    /// Canonicalises an arbitrary nonzero matrix.
    pub fn new(m: Matrix3<f64>) -> Self {
        Self(canonicalize(&m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Row-major entries.
    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Self::new(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    /// Largest absolute entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &ModelParams) -> f64 {
        (self.0 - other.0).abs().max()
    }
}

/// Scales `m` to unit Frobenius norm and flips its sign so that the first entry
/// (row-major) with magnitude above [`SIGN_PIVOT_EPS`] is positive.
///
/// Applying it twice yields the bit-identical matrix.
pub fn canonicalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let norm = m.norm();
    let mut out = if norm > 0.0 && (norm - 1.0).abs() > 4.0 * f64::EPSILON {
        m / norm
    } else {
        *m
    };
    let pivot = (0..9)
        .map(|i| out[(i / 3, i % 3)])
        .find(|v| v.abs() > SIGN_PIVOT_EPS)
        .unwrap_or(0.0);
    if pivot < 0.0 {
        out = -out;
    }
    out
}
