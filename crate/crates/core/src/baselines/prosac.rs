//! Progressive sampling over the score-sorted pool.
//!
//! Sample `t` is drawn from the top `n` correspondences, where `n` grows
//! according to the growth function
//! `T_{n+1} = T_n (n + 1) / (n + 1 - m)`, `T'_{n+1} = T'_n + ceil(T_{n+1} - T_n)`,
//! starting from `T_m = T_N * prod_{i<m} (m - i) / (N - i)` and `T'_m = 1`.
//! While `t <= T'_n` every sample contains the `n`-th correspondence.

use rand::seq::index;
use rand_chacha::ChaCha8Rng;

use super::{fit_and_remove, BaselineConfig, Sampler};
use crate::geometry::Correspondence;
use crate::pipeline::{FitError, FitResult};

/// Default `T_N`: samples after which sampling becomes uniform over the pool.
pub const PROSAC_GROWTH_SAMPLES: usize = 200_000;

/// Growth schedule state.
#[derive(Debug, Clone)]
pub struct ProsacSchedule {
    m: usize,
    pool: usize,
    /// Current prefix size `n`.
    n: usize,
    /// `T_n` as a real number.
    t_n: f64,
    /// `T'_n`.
    t_prime: usize,
    /// Samples drawn so far.
    t: usize,
}

impl ProsacSchedule {
    pub fn new(m: usize, pool: usize, growth_samples: usize) -> Self {
        let mut t_n = growth_samples as f64;
        for i in 0..m {
            t_n *= (m - i) as f64 / (pool - i) as f64;
        }
        Self {
            m,
            pool,
            n: m,
            t_n,
            t_prime: 1,
            t: 0,
        }
    }

    /// Advances to the next sample; returns `(n, include_nth)`.
    pub fn advance(&mut self) -> (usize, bool) {
        self.t += 1;
        if self.t > self.t_prime && self.n < self.pool {
            let next = self.t_n * (self.n + 1) as f64 / (self.n + 1 - self.m) as f64;
            self.t_prime += (next - self.t_n).ceil().max(1.0) as usize;
            self.t_n = next;
            self.n += 1;
        }
        (self.n, self.t <= self.t_prime)
    }

    pub fn prefix(&self) -> usize {
        self.n
    }
}

struct ProsacSampler {
    schedule: ProsacSchedule,
}

impl Sampler for ProsacSampler {
    fn next_sample(&mut self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let m = self.schedule.m;
        let (n, include_nth) = self.schedule.advance();
        if include_nth {
            let mut s = index::sample(rng, n - 1, m - 1).into_vec();
            s.push(n - 1);
            s
        } else {
            index::sample(rng, n, m).into_vec()
        }
    }
}

/// PROSAC with the adaptive stopping rule, repeated per structure on the
/// correspondences not yet explained. The pool is ordered by non-ascending
/// score, ties by ascending index.
pub fn prosac_fit(data: &[Correspondence], cfg: &BaselineConfig) -> Result<FitResult, FitError> {
    let m = cfg.kind.min_sample_size();
    let growth = cfg.prosac_growth_samples;
    fit_and_remove(
        data,
        cfg,
        |pool| pool.sort_by(|&a, &b| data[b].score.total_cmp(&data[a].score).then(a.cmp(&b))),
        |pool| {
            Box::new(ProsacSampler {
                schedule: ProsacSchedule::new(m, pool.len(), growth),
            })
        },
    )
}
