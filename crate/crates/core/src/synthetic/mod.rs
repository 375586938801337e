//! Ground-truth scene generation and brute-force oracles for testing.
//!
//! A scene is a set of planar (homography) or rigidly moving (fundamental
//! matrix) structures, each with inliers drawn inside a rectangle of view 1,
//! plus uniformly scattered outliers. Both views are rendered as flat-coloured
//! regions so superpixels roughly follow the structures.

mod metrics;
mod oracle;
mod render;

use nalgebra::{Matrix3, Vector3};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::geometry::{fit_homography, sampson_residual, Correspondence, ModelKind, ModelParams, Point2};
use crate::superpixel::{Image, SuperpixelError};

pub use metrics::{instance_errors, match_structures, mean_sampson_error, StructureMatch};
pub use oracle::{oracle_inlier_count, oracle_select};

/// Attempts per point before giving up on placing it inside view 2.
const MAX_PLACEMENT_TRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("invalid scene: {0}")]
    InvalidSpec(String),
    #[error("structure {0} maps its region outside view 2")]
    Unplaceable(usize),
}

/// Axis-aligned rectangle in view-1 pixel coordinates, `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            Point2::new(self.x0, self.y0),
            Point2::new(self.x1, self.y0),
            Point2::new(self.x1, self.y1),
            Point2::new(self.x0, self.y1),
        ]
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x0 && p.x < self.x1 && p.y >= self.y0 && p.y < self.y1
    }

    fn area(&self) -> f64 {
        (self.x1 - self.x0).max(0.0) * (self.y1 - self.y0).max(0.0)
    }

    fn intersection(&self, o: &Rect) -> Rect {
        Rect::new(
            self.x0.max(o.x0),
            self.y0.max(o.y0),
            self.x1.min(o.x1),
            self.y1.min(o.y1),
        )
    }
}

/// How a structure moves between the views.
#[derive(Debug, Clone, PartialEq)]
pub enum Motion {
    /// A plane: `x2 ~ H x1`.
    Homography(Matrix3<f64>),
    /// A rigid body seen by `P1 = K [I | 0]` and `P2 = K [R | t]`, with
    /// depths drawn uniformly from `depth`.
    Rigid {
        intrinsics: Matrix3<f64>,
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        depth: (f64, f64),
    },
}

impl Motion {
    pub fn kind(&self) -> ModelKind {
        match self {
            Motion::Homography(_) => ModelKind::Homography,
            Motion::Rigid { .. } => ModelKind::FundamentalMatrix,
        }
    }

    /// Canonical true model.
    pub fn model(&self) -> ModelParams {
        match self {
            Motion::Homography(h) => ModelParams::new(*h),
            Motion::Rigid {
                intrinsics,
                rotation,
                translation,
                ..
            } => {
                let k_inv = intrinsics.try_inverse().unwrap_or_else(Matrix3::identity);
                ModelParams::new(k_inv.transpose() * translation.cross_matrix() * rotation * k_inv)
            }
        }
    }

    /// Maps a view-1 point (at `depth` for rigid motions) into view 2.
    fn apply(&self, p: Point2, depth: f64) -> Point2 {
        let x = Vector3::new(p.x, p.y, 1.0);
        let y = match self {
            Motion::Homography(h) => h * x,
            Motion::Rigid {
                intrinsics,
                rotation,
                translation,
                ..
            } => {
                let k_inv = intrinsics.try_inverse().unwrap_or_else(Matrix3::identity);
                let world = k_inv * x * depth;
                intrinsics * (rotation * world + translation)
            }
        };
        Point2::new(y.x / y.z, y.y / y.z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureSpec {
    pub motion: Motion,
    pub inliers: usize,
    /// Where inliers are drawn in view 1.
    pub region: Rect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub kind: ModelKind,
    pub structures: Vec<StructureSpec>,
    pub outliers: usize,
    /// Gaussian noise per coordinate, pixels.
    pub noise_sigma: f64,
    pub width: usize,
    pub height: usize,
    /// Probability that a score is informative about inlierhood.
    pub score_correlation: f64,
    pub seed: u64,
}

/// Default score correlation.
pub const DEFAULT_SCORE_CORRELATION: f64 = 0.8;

impl SceneSpec {
    /// Random scene of `kind` with one structure per entry of `inliers`, laid
    /// out as side-by-side vertical strips. Motions are drawn from `seed`.
    pub fn random(
        kind: ModelKind,
        width: usize,
        height: usize,
        inliers: &[usize],
        outliers: usize,
        noise_sigma: f64,
        seed: u64,
    ) -> Self {
        let (w, h) = (width as f64, height as f64);
        let n = inliers.len().max(1) as f64;
        let margin = 0.1;
        let strip = w * (1.0 - 2.0 * margin) / n;
        let regions: Vec<(Rect, usize)> = inliers
            .iter()
            .enumerate()
            .map(|(i, &count)| {
                let x0 = w * margin + strip * i as f64;
                let region = Rect::new(x0 + 0.04 * strip, h * margin, x0 + 0.96 * strip, h * (1.0 - margin));
                (region, count)
            })
            .collect();
        Self::with_regions(kind, width, height, &regions, outliers, noise_sigma, seed)
    }

    /// Random motions for the given `(region, inlier count)` structures.
    pub fn with_regions(
        kind: ModelKind,
        width: usize,
        height: usize,
        regions: &[(Rect, usize)],
        outliers: usize,
        noise_sigma: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05ee_d0f5_ce7e);
        let structures = regions
            .iter()
            .map(|&(region, count)| {
                let motion = match kind {
                    ModelKind::Homography => random_homography(&mut rng, &region, width, height),
                    ModelKind::FundamentalMatrix => random_rigid(&mut rng, width, height),
                };
                StructureSpec {
                    motion,
                    inliers: count,
                    region,
                }
            })
            .collect();
        Self {
            kind,
            structures,
            outliers,
            noise_sigma,
            width,
            height,
            score_correlation: DEFAULT_SCORE_CORRELATION,
            seed,
        }
    }

    /// Random scene whose inlier total is `inlier_ratio` of `total`, split
    /// evenly among `structures`.
    #[allow(clippy::too_many_arguments)]
    pub fn with_ratio(
        kind: ModelKind,
        width: usize,
        height: usize,
        structures: usize,
        total: usize,
        inlier_ratio: f64,
        noise_sigma: f64,
        seed: u64,
    ) -> Self {
        let inliers = (total as f64 * inlier_ratio).round() as usize;
        let counts: Vec<usize> = (0..structures)
            .map(|i| inliers / structures + usize::from(i < inliers % structures))
            .collect();
        Self::random(kind, width, height, &counts, total - inliers, noise_sigma, seed)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |m: String| Err(SceneError::InvalidSpec(m));
        if self.width == 0 || self.height == 0 {
            return bad("image size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.score_correlation) {
            return bad(format!("score correlation {} outside [0, 1]", self.score_correlation));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return bad(format!(
                "noise sigma {} must be finite and non-negative",
                self.noise_sigma
            ));
        }
        let bounds = Rect::new(0.0, 0.0, self.width as f64, self.height as f64);
        for (i, s) in self.structures.iter().enumerate() {
            if s.motion.kind() != self.kind {
                return bad(format!("structure {} is not a {}", i + 1, self.kind));
            }
            let r = &s.region;
            if !(r.x0 < r.x1 && r.y0 < r.y1) || r.intersection(&bounds) != *r {
                return bad(format!("region of structure {} is empty or outside the image", i + 1));
            }
            if let Motion::Rigid { depth: (a, b), .. } = s.motion {
                if !(a > 0.0 && a <= b) {
                    return bad(format!("structure {} has an invalid depth range", i + 1));
                }
            }
        }
        Ok(())
    }
}

/// Generated correspondences with ground truth and rendered views.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScene {
    pub kind: ModelKind,
    pub correspondences: Vec<Correspondence>,
    /// 0 for outliers, `k` for inliers of structure `k` (1-based).
    pub labels: Vec<usize>,
    /// Canonical true model per structure.
    pub models: Vec<ModelParams>,
    pub width: usize,
    pub height: usize,
    /// Interleaved 8-bit RGB, row-major.
    pub rgb1: Vec<u8>,
    pub rgb2: Vec<u8>,
    pub warnings: Vec<String>,
}

impl LabeledScene {
    pub fn images(&self) -> Result<(Image, Image), SuperpixelError> {
        Ok((
            Image::from_rgb8(self.width, self.height, &self.rgb1)?,
            Image::from_rgb8(self.width, self.height, &self.rgb2)?,
        ))
    }

    /// Indices labelled with structure `k`.
    pub fn structure_indices(&self, k: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == k).collect()
    }

    pub fn inlier_ratio(&self) -> f64 {
        let inliers = self.labels.iter().filter(|&&l| l != 0).count();
        inliers as f64 / self.labels.len().max(1) as f64
    }
}

/// Draws a scene from `spec`. The same spec always yields the same scene.
pub fn generate_scene(spec: &SceneSpec) -> Result<LabeledScene, SceneError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (w, h) = (spec.width as f64, spec.height as f64);
    let view2 = Rect::new(0.0, 0.0, w, h);
    let noise = Normal::new(0.0, spec.noise_sigma.max(f64::MIN_POSITIVE)).expect("finite sigma");
    let mut warnings = overlap_warnings(spec);

    let mut items: Vec<(Correspondence, usize)> = Vec::new();
    let mut clean2: Vec<Vec<Point2>> = Vec::new();
    for (s, st) in spec.structures.iter().enumerate() {
        let model = st.motion.model();
        let mut placed = Vec::with_capacity(st.inliers);
        for _ in 0..st.inliers {
            let (p1, p2) = place(&mut rng, st, &view2).ok_or(SceneError::Unplaceable(s + 1))?;
            placed.push(p2);
            let c = if spec.noise_sigma > 0.0 {
                perturb(&mut rng, &noise, &model, spec.kind, p1, p2, spec.noise_sigma)
            } else {
                Correspondence::new(p1, p2, 0.0)
            };
            items.push((c, s + 1));
        }
        clean2.push(placed);
    }
    for _ in 0..spec.outliers {
        let p1 = Point2::new(rng.random_range(0.0..w), rng.random_range(0.0..h));
        let p2 = Point2::new(rng.random_range(0.0..w), rng.random_range(0.0..h));
        items.push((Correspondence::new(p1, p2, 0.0), 0));
    }
    for (c, label) in &mut items {
        c.score = draw_score(&mut rng, *label != 0, spec.score_correlation);
    }
    items.shuffle(&mut rng);

    let (rgb1, rgb2) = render::render_views(spec, &clean2);
    if items.is_empty() {
        warnings.push("scene has no correspondences".into());
    }
    Ok(LabeledScene {
        kind: spec.kind,
        labels: items.iter().map(|(_, l)| *l).collect(),
        correspondences: items.into_iter().map(|(c, _)| c).collect(),
        models: spec.structures.iter().map(|s| s.motion.model()).collect(),
        width: spec.width,
        height: spec.height,
        rgb1,
        rgb2,
        warnings,
    })
}

fn place(rng: &mut ChaCha8Rng, st: &StructureSpec, view2: &Rect) -> Option<(Point2, Point2)> {
    let r = &st.region;
    for _ in 0..MAX_PLACEMENT_TRIES {
        let p1 = Point2::new(rng.random_range(r.x0..r.x1), rng.random_range(r.y0..r.y1));
        let depth = match st.motion {
            Motion::Rigid { depth: (a, b), .. } if a < b => rng.random_range(a..b),
            Motion::Rigid { depth: (a, _), .. } => a,
            Motion::Homography(_) => 1.0,
        };
        let p2 = st.motion.apply(p1, depth);
        if p2.is_finite() && view2.contains(p2) {
            return Some((p1, p2));
        }
    }
    None
}

/// Adds Gaussian noise to all four coordinates, redrawing until the Sampson
/// residual under the true model is within three sigma.
fn perturb(
    rng: &mut ChaCha8Rng,
    noise: &Normal<f64>,
    model: &ModelParams,
    kind: ModelKind,
    p1: Point2,
    p2: Point2,
    sigma: f64,
) -> Correspondence {
    loop {
        let c = Correspondence::new(
            Point2::new(p1.x + noise.sample(rng), p1.y + noise.sample(rng)),
            Point2::new(p2.x + noise.sample(rng), p2.y + noise.sample(rng)),
            0.0,
        );
        if sampson_residual(model, kind, &c) <= 3.0 * sigma {
            return c;
        }
    }
}

/// With probability `rho` the score separates inliers (`[0.5, 1)`) from
/// outliers (`[0, 0.5)`); otherwise it is uniform on `[0, 1)`.
fn draw_score(rng: &mut ChaCha8Rng, inlier: bool, rho: f64) -> f64 {
    let informative = rng.random::<f64>() < rho;
    let u = rng.random::<f64>();
    match (informative, inlier) {
        (false, _) => u,
        (true, true) => 0.5 + 0.5 * u,
        (true, false) => 0.5 * u,
    }
}

fn overlap_warnings(spec: &SceneSpec) -> Vec<String> {
    let mut out = Vec::new();
    for (i, a) in spec.structures.iter().enumerate() {
        for (j, b) in spec.structures.iter().enumerate().skip(i + 1) {
            let shared = a.region.intersection(&b.region).area();
            if shared >= a.region.area().min(b.region.area()) {
                out.push(format!(
                    "regions of structures {} and {} overlap entirely",
                    i + 1,
                    j + 1
                ));
            }
        }
    }
    out
}

/// A homography that moves each corner of `region` by a random offset and
/// shifts the whole region, keeping the mapped corners inside the image.
pub fn random_homography(rng: &mut impl Rng, region: &Rect, width: usize, height: usize) -> Motion {
    let (w, h) = (width as f64, height as f64);
    let jitter = 0.25 * (region.x1 - region.x0).min(region.y1 - region.y0);
    let slack_x = (region.x0.min(w - region.x1) - jitter).max(0.0);
    let slack_y = (region.y0.min(h - region.y1) - jitter).max(0.0);
    let shift = (
        rng.random_range(-1.0..=1.0) * 0.8 * slack_x,
        rng.random_range(-1.0..=1.0) * 0.8 * slack_y,
    );
    let pairs: Vec<Correspondence> = region
        .corners()
        .iter()
        .map(|&c| {
            let to = Point2::new(
                (c.x + shift.0 + rng.random_range(-jitter..=jitter)).clamp(0.0, w - 1.0),
                (c.y + shift.1 + rng.random_range(-jitter..=jitter)).clamp(0.0, h - 1.0),
            );
            Correspondence::new(c, to, 1.0)
        })
        .collect();
    let model = fit_homography(&pairs).unwrap_or_else(|_| ModelParams::new(Matrix3::identity()));
    Motion::Homography(*model.matrix())
}

/// Two calibrated cameras with a small random rotation and a mostly sideways
/// baseline, observing points at depths in `[5, 10]`.
pub fn random_rigid(rng: &mut impl Rng, width: usize, height: usize) -> Motion {
    let (w, h) = (width as f64, height as f64);
    let f = 1.2 * w.max(h);
    let intrinsics = Matrix3::new(f, 0.0, w / 2.0, 0.0, f, h / 2.0, 0.0, 0.0, 1.0);
    let mut angle = || rng.random_range(-0.05..=0.05);
    let (roll, pitch, yaw) = (angle(), angle(), angle());
    let rotation = *nalgebra::Rotation3::from_euler_angles(roll, pitch, yaw).matrix();
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let translation = Vector3::new(
        sign * rng.random_range(0.25..0.45),
        rng.random_range(-0.1..0.1),
        rng.random_range(-0.2..0.2),
    );
    Motion::Rigid {
        intrinsics,
        rotation,
        translation,
        depth: (5.0, 10.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(kind: ModelKind, sigma: f64, outliers: usize, seed: u64) -> LabeledScene {
        generate_scene(&SceneSpec::random(kind, 240, 180, &[120], outliers, sigma, seed)).unwrap()
    }

    #[test]
    fn noiseless_inliers_fit_exactly() {
        for kind in [ModelKind::Homography, ModelKind::FundamentalMatrix] {
            let s = single(kind, 0.0, 0, 3);
            for c in &s.correspondences {
                assert!(sampson_residual(&s.models[0], kind, c) <= 1e-9);
            }
        }
    }

    #[test]
    fn noisy_inliers_within_three_sigma() {
        for kind in [ModelKind::Homography, ModelKind::FundamentalMatrix] {
            let s = single(kind, 1.5, 40, 11);
            for (c, &l) in s.correspondences.iter().zip(&s.labels) {
                if l != 0 {
                    assert!(sampson_residual(&s.models[l - 1], kind, c) <= 4.5 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn label_counts_match_spec() {
        let spec = SceneSpec::random(ModelKind::Homography, 200, 150, &[30, 50], 20, 0.5, 1);
        let s = generate_scene(&spec).unwrap();
        assert_eq!(s.structure_indices(1).len(), 30);
        assert_eq!(s.structure_indices(2).len(), 50);
        assert_eq!(s.structure_indices(0).len(), 20);
    }

    #[test]
    fn inlier_ratio_example() {
        let spec = SceneSpec::with_ratio(ModelKind::Homography, 200, 150, 1, 400, 0.2626, 1.0, 5);
        let r = generate_scene(&spec).unwrap().inlier_ratio();
        assert!((r - 0.2626).abs() <= 0.01, "{r}");
    }

    #[test]
    fn perfect_scores_rank_inliers_first() {
        let mut spec = SceneSpec::random(ModelKind::Homography, 200, 150, &[60], 90, 1.0, 2);
        spec.score_correlation = 1.0;
        let s = generate_scene(&spec).unwrap();
        let mut order: Vec<usize> = (0..s.labels.len()).collect();
        order.sort_by(|&a, &b| s.correspondences[b].score.total_cmp(&s.correspondences[a].score));
        let first_outlier = order.iter().position(|&i| s.labels[i] == 0).unwrap();
        assert_eq!(first_outlier, 60);
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let spec = SceneSpec::random(ModelKind::FundamentalMatrix, 160, 120, &[40, 40], 30, 1.0, 9);
        assert_eq!(generate_scene(&spec).unwrap(), generate_scene(&spec).unwrap());
        let mut other = spec.clone();
        other.seed = 10;
        assert_ne!(
            generate_scene(&spec).unwrap().correspondences,
            generate_scene(&other).unwrap().correspondences
        );
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = SceneSpec::random(ModelKind::Homography, 100, 100, &[10], 0, 0.0, 0);
        spec.score_correlation = 1.5;
        assert!(generate_scene(&spec).is_err());
        spec.score_correlation = 0.5;
        spec.structures[0].region = Rect::new(50.0, 50.0, 150.0, 90.0);
        assert!(generate_scene(&spec).is_err());
        let mut spec = SceneSpec::random(ModelKind::Homography, 100, 100, &[10], 0, 0.0, 0);
        spec.kind = ModelKind::FundamentalMatrix;
        assert!(generate_scene(&spec).is_err());
    }

    #[test]
    fn coincident_regions_warn() {
        let mut spec = SceneSpec::random(ModelKind::Homography, 200, 150, &[10, 10], 0, 0.0, 4);
        spec.structures[1].region = spec.structures[0].region;
        let s = generate_scene(&spec).unwrap();
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn images_have_scene_size() {
        let s = single(ModelKind::Homography, 0.0, 10, 0);
        let (a, b) = s.images().unwrap();
        assert_eq!((a.width(), a.height(), b.pixel_count()), (240, 180, 240 * 180));
    }
}
