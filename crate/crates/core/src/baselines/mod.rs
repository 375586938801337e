//! Randomised reference methods: RANSAC and PROSAC with the classic
//! fit-and-remove loop for multiple structures (inliers of each accepted model
//! are removed from the pool before fitting the next).
//!
//! Both use the same solvers and residuals as the deterministic pipeline, so
//! differences come only from sampling and selection. Randomness comes from a
//! ChaCha8 stream seeded with a 64-bit seed, which reproduces across platforms.

mod prosac;
mod ransac;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{fit_model_with_tolerance, inlier_indices, Correspondence, ModelKind, DEFAULT_DEGENERACY_TOL};
use crate::pipeline::{check_correspondences, FitError, FitResult, FitStatus, Hypothesis, StageTiming};

pub use prosac::{prosac_fit, ProsacSchedule, PROSAC_GROWTH_SAMPLES};
pub use ransac::ransac_fit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub kind: ModelKind,
    pub inlier_scale: f64,
    /// Probability of drawing at least one all-inlier sample.
    pub confidence: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub num_structures: usize,
    pub degeneracy_tol: f64,
    /// `T_N` of the PROSAC growth function.
    pub prosac_growth_samples: usize,
}

impl BaselineConfig {
    pub fn new(kind: ModelKind, inlier_scale: f64, num_structures: usize, seed: u64) -> Self {
        Self {
            kind,
            inlier_scale,
            confidence: 0.99,
            max_iters: 10_000,
            seed,
            num_structures,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            prosac_growth_samples: PROSAC_GROWTH_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<(), FitError> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(FitError::InvalidConfig(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        if self.max_iters == 0 {
            return Err(FitError::InvalidConfig("max_iters must be at least 1".into()));
        }
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
        Ok(())
    }
}

/// Samples needed to draw an all-inlier minimal subset with probability
/// `confidence` when the inlier ratio is `inlier_ratio`:
/// `ceil(log(1 - confidence) / log(1 - w^p))`.
pub fn iteration_bound(confidence: f64, inlier_ratio: f64, p: usize) -> usize {
    let good = inlier_ratio.clamp(0.0, 1.0).powi(p as i32);
    if good >= 1.0 {
        return 0;
    }
    if good <= 0.0 {
        return usize::MAX;
    }
    let n = ((1.0 - confidence).ln() / (1.0 - good).ln()).ceil();
    if n.is_finite() && n < usize::MAX as f64 {
        n.max(0.0) as usize
    } else {
        usize::MAX
    }
}

/// Draws minimal samples, as positions into the current pool.
pub(crate) trait Sampler {
    fn next_sample(&mut self, rng: &mut ChaCha8Rng) -> Vec<usize>;
}

/// Outcome of one hypothesise-and-verify loop on a pool.
struct Consensus {
    sample: Vec<usize>,
    params: crate::geometry::ModelParams,
    inliers: Vec<usize>,
}

fn find_consensus(
    pool: &[Correspondence],
    sampler: &mut dyn Sampler,
    rng: &mut ChaCha8Rng,
    cfg: &BaselineConfig,
) -> (Option<Consensus>, usize) {
    let p = cfg.kind.min_sample_size();
    let mut bound = cfg.max_iters;
    let mut best: Option<Consensus> = None;
    let mut iterations = 0;
    while iterations < bound.min(cfg.max_iters) {
        iterations += 1;
        let sample = sampler.next_sample(rng);
        let subset: Vec<Correspondence> = sample.iter().map(|&i| pool[i]).collect();
        let Ok(params) = fit_model_with_tolerance(cfg.kind, &subset, cfg.degeneracy_tol) else {
            continue;
        };
        let inliers = inlier_indices(&params, cfg.kind, pool, cfg.inlier_scale);
        if best.as_ref().is_none_or(|b| inliers.len() > b.inliers.len()) {
            let ratio = inliers.len() as f64 / pool.len() as f64;
            bound = iteration_bound(cfg.confidence, ratio, p);
            best = Some(Consensus {
                sample,
                params,
                inliers,
            });
        }
    }
    (best, iterations)
}

/// Shared fit-and-remove driver. `make_sampler` receives the pool (in the
/// order the sampler should see it) and returns its sampler.
pub(crate) fn fit_and_remove(
    data: &[Correspondence],
    cfg: &BaselineConfig,
    order_pool: impl Fn(&mut Vec<usize>),
    make_sampler: impl Fn(&[Correspondence]) -> Box<dyn Sampler>,
) -> Result<FitResult, FitError> {
    cfg.validate()?;
    check_correspondences(data, cfg.kind)?;
    let start = Instant::now();
    let p = cfg.kind.min_sample_size();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pool: Vec<usize> = (0..data.len()).collect();
    let mut instances = Vec::new();
    let mut removed_counts = Vec::new();
    let mut iterations = Vec::new();
    let mut exhausted = false;

    for structure in 0..cfg.num_structures {
        if pool.len() < p {
            exhausted = true;
            break;
        }
        order_pool(&mut pool);
        let pool_data: Vec<Correspondence> = pool.iter().map(|&i| data[i]).collect();
        let mut sampler = make_sampler(&pool_data);
        let (found, used) = find_consensus(&pool_data, sampler.as_mut(), &mut rng, cfg);
        iterations.push(used);
        let Some(c) = found else {
            exhausted = true;
            break;
        };
        let inlier_set: Vec<usize> = {
            let mut v: Vec<usize> = c.inliers.iter().map(|&k| pool[k]).collect();
            v.sort_unstable();
            v
        };
        let sampled_subset = c.sample.iter().map(|&k| pool[k]).collect();
        let mut keep = vec![true; pool.len()];
        for &k in &c.inliers {
            keep[k] = false;
        }
        removed_counts.push(c.inliers.len());
        pool = pool.iter().zip(&keep).filter(|(_, &k)| k).map(|(&i, _)| i).collect();
        instances.push(Hypothesis {
            params: c.params,
            kind: cfg.kind,
            sampled_subset,
            inlier_set,
            gen_index: structure,
        });
    }
    if instances.is_empty() {
        return Err(FitError::empty());
    }
    let status = if exhausted {
        FitStatus::Exhausted {
            requested: cfg.num_structures,
            found: instances.len(),
        }
    } else {
        FitStatus::Complete
    };
    Ok(FitResult {
        instances,
        removed_counts,
        status,
        hypothesis_count: iterations.iter().sum(),
        iterations,
        timings: vec![StageTiming {
            stage: "sampling",
            duration: start.elapsed(),
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_bound() {
        assert_eq!(iteration_bound(0.99, 0.4, 4), 178);
        assert_eq!(iteration_bound(0.99, 1.0, 4), 0);
        assert_eq!(iteration_bound(0.99, 0.0, 4), usize::MAX);
        // w = 0.5, p = 8: log(0.01) / log(1 - 1/256)
        assert_eq!(iteration_bound(0.99, 0.5, 8), 1177);
    }

    #[test]
    fn config_validation() {
        let mut cfg = BaselineConfig::new(ModelKind::Homography, 1.0, 1, 0);
        assert!(cfg.validate().is_ok());
        cfg.confidence = 1.0;
        assert!(cfg.validate().is_err());
        cfg.confidence = 0.5;
        cfg.max_iters = 0;
        assert!(cfg.validate().is_err());
    }
}
