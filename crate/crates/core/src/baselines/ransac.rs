use rand::seq::index;
use rand_chacha::ChaCha8Rng;

use super::{fit_and_remove, BaselineConfig, Sampler};
use crate::geometry::Correspondence;
use crate::pipeline::{FitError, FitResult};

struct UniformSampler {
    pool: usize,
    size: usize,
}

impl Sampler for UniformSampler {
    fn next_sample(&mut self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        index::sample(rng, self.pool, self.size).into_vec()
    }
}

/// RANSAC with the adaptive stopping rule, repeated per structure on the
/// correspondences not yet explained.
pub fn ransac_fit(data: &[Correspondence], cfg: &BaselineConfig) -> Result<FitResult, FitError> {
    let size = cfg.kind.min_sample_size();
    fit_and_remove(
        data,
        cfg,
        |_| {},
        |pool| Box::new(UniformSampler { pool: pool.len(), size }),
    )
}
