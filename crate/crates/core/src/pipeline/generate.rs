use crate::geometry::{fit_model_with_tolerance, inlier_indices, Correspondence, ModelParams};
use crate::grouping::{sort_group, Group, GroupSet};
use crate::par;

use super::{size_histogram, FitConfig, FitError, Hypothesis};

/// Hypotheses in generation order plus bookkeeping on skipped groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub hypotheses: Vec<Hypothesis>,
    pub groups: usize,
    /// Groups with fewer than `p` members.
    pub skipped_small: usize,
    /// Groups whose subset did not determine a model.
    pub skipped_degenerate: usize,
}

enum Outcome {
    Small,
    Degenerate,
    Fitted(ModelParams, Vec<usize>, Vec<usize>),
}

/// One hypothesis per group with at least `p` members, fitted to its
/// `min(m0, size)` highest-scored correspondences.
///
/// Groups are visited in the order of `groupsets` and of the groups within
/// each set; `gen_index` numbers the successful fits in that order.
pub fn generate_hypotheses(
    groupsets: &[GroupSet],
    correspondences: &[Correspondence],
    cfg: &FitConfig,
) -> Result<Generation, FitError> {
    let groups: Vec<&Group> = groupsets.iter().flat_map(|gs| gs.groups.iter()).collect();
    let p = cfg.kind.min_sample_size();
    let m0 = cfg.m0();

    let outcomes = par::map(&groups, |g| {
        if g.members.len() < p {
            return Outcome::Small;
        }
        let order = sort_group(g, correspondences);
        let subset: Vec<usize> = order.iter().take(m0).map(|&pos| g.members[pos]).collect();
        let points: Vec<Correspondence> = subset.iter().map(|&i| correspondences[i]).collect();
        match fit_model_with_tolerance(cfg.kind, &points, cfg.degeneracy_tol) {
            Ok(params) => {
                let inliers = inlier_indices(&params, cfg.kind, correspondences, cfg.inlier_scale);
                Outcome::Fitted(params, subset, inliers)
            }
            Err(_) => Outcome::Degenerate,
        }
    });

    let mut hypotheses = Vec::new();
    let (mut small, mut degenerate) = (0, 0);
    for outcome in outcomes {
        match outcome {
            Outcome::Small => small += 1,
            Outcome::Degenerate => degenerate += 1,
            Outcome::Fitted(params, sampled_subset, inlier_set) => {
                let gen_index = hypotheses.len();
                hypotheses.push(Hypothesis {
                    params,
                    kind: cfg.kind,
                    sampled_subset,
                    inlier_set,
                    gen_index,
                });
            }
        }
    }
    if hypotheses.is_empty() {
        return Err(FitError::NoHypotheses {
            groups: groups.len(),
            small,
            degenerate,
            histogram: size_histogram(groups.iter().map(|g| g.members.len())),
        });
    }
    Ok(Generation {
        hypotheses,
        groups: groups.len(),
        skipped_small: small,
        skipped_degenerate: degenerate,
    })
}
