//! Deliberately naive reference implementations, kept independent of the
//! optimised production paths they are compared against.

use std::collections::HashSet;

use crate::geometry::{sampson_residual, Correspondence, ModelKind, ModelParams};
use crate::pipeline::{FitError, Hypothesis, SelectionStep, SelectionTrace};

/// Correspondences with Sampson residual at most `scale`, by a plain loop.
pub fn oracle_inlier_count(model: &ModelParams, kind: ModelKind, data: &[Correspondence], scale: f64) -> usize {
    let mut count = 0;
    for c in data {
        if sampson_residual(model, kind, c) <= scale {
            count += 1;
        }
    }
    count
}

/// Literal simulation of the selection loop: pick the most-supported
/// remaining hypothesis (earliest on ties), then drop every remaining one
/// whose sampled subset meets the selected inlier set.
pub fn oracle_select(hypotheses: &[Hypothesis], t: usize) -> Result<SelectionTrace, FitError> {
    if hypotheses.is_empty() {
        return Err(FitError::NoHypotheses {
            groups: 0,
            small: 0,
            degenerate: 0,
            histogram: Vec::new(),
        });
    }
    let mut remaining: Vec<&Hypothesis> = hypotheses.iter().collect();
    let mut trace = SelectionTrace::default();
    for _ in 0..t {
        if remaining.is_empty() {
            trace.exhausted = true;
            break;
        }
        let mut best = remaining[0];
        for h in &remaining {
            let more = h.inlier_set.len() > best.inlier_set.len();
            let tie_earlier = h.inlier_set.len() == best.inlier_set.len() && h.gen_index < best.gen_index;
            if more || tie_earlier {
                best = h;
            }
        }
        let inliers: HashSet<usize> = best.inlier_set.iter().copied().collect();
        let mut removed = Vec::new();
        let mut kept = Vec::new();
        for h in remaining {
            if h.gen_index == best.gen_index {
                continue;
            }
            let subset: HashSet<usize> = h.sampled_subset.iter().copied().collect();
            if subset.intersection(&inliers).next().is_some() {
                removed.push(h.gen_index);
            } else {
                kept.push(h);
            }
        }
        removed.sort();
        trace.steps.push(SelectionStep {
            selected: best.gen_index,
            removed,
        });
        remaining = kept;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use nalgebra::Matrix3;

    #[test]
    fn identity_counts_every_exact_pair() {
        let data: Vec<_> = (0..7)
            .map(|i| {
                let p = Point2::new(i as f64, (i * i) as f64);
                Correspondence::new(p, p, 0.5)
            })
            .collect();
        let id = ModelParams::new(Matrix3::identity());
        assert_eq!(oracle_inlier_count(&id, ModelKind::Homography, &data, 1e-3), 7);
    }

    #[test]
    fn empty_selection_errors() {
        assert!(oracle_select(&[], 2).is_err());
    }
}
